#include "skelattack/error.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace skelattack {

namespace {

std::string parse_message(const std::filesystem::path& path, std::string_view field,
                          std::string_view what) {
  std::string msg = path.string();
  if (!field.empty()) {
    msg += ": field '";
    msg += field;
    msg += "'";
  }
  msg += ": ";
  msg += what;
  return msg;
}

}  // namespace

ParseError::ParseError(const std::filesystem::path& path, std::string_view field,
                       std::string_view what)
    : ValidationError(parse_message(path, field, what)) {}

void fail_validation(const std::string& message) { throw ValidationError(message); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace skelattack
