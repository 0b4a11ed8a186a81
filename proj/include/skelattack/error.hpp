#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace skelattack {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented invariant (shape, index range, label...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be decoded. The message carries the path and field.
class ParseError : public ValidationError {
 public:
  ParseError(const std::filesystem::path& path, std::string_view field, std::string_view what);
};

/// Filesystem failure (missing file, unwritable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void fail_validation(const std::string& message);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace skelattack
