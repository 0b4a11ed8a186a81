#include <cstdio>
#include <sstream>

#include "skelattack/error.hpp"
#include "skelattack/metrics.hpp"

namespace skelattack {

namespace {

std::string printf_str(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string full(double v) { return printf_str("%.17g", v); }

std::string percent(double fraction) { return printf_str("%.1f%%", 100.0 * fraction); }

// SR prints like the published tables: "100%", "73.9%".
std::string rate(double fraction) {
  std::string s = percent(fraction);
  if (s.size() > 3 && s.compare(s.size() - 3, 3, ".0%") == 0) s.erase(s.size() - 3, 2);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv(const std::string& row) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const char c = row[i];
    if (quoted) {
      if (c == '"' && i + 1 < row.size() && row[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\n' && c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail_validation("malformed number '" + s + "' in report row");
  }
  if (pos != s.size()) fail_validation("malformed number '" + s + "' in report row");
  return v;
}

}  // namespace

std::string report_csv_header() { return "model,mode,gamma,dBB,dAA,dSS,SR,l2,N"; }

std::string report_csv_row(const BatchReport& r) {
  std::ostringstream os;
  os << csv_field(r.tag.model_id) << ',' << mode_name(r.tag.mode) << ',' << full(r.tag.gamma) << ',' << full(r.dBB)
     << ',' << full(r.dAA) << ',' << full(r.dSS) << ',' << full(r.sr) << ',' << full(r.l2) << ',' << r.n;
  return os.str();
}

BatchReport parse_report_csv_row(const std::string& row) {
  const auto f = split_csv(row);
  if (f.size() != 9) fail_validation("report row must have 9 fields");
  BatchReport r;
  r.tag.model_id = f[0];
  r.tag.mode = parse_mode(f[1]);
  r.tag.gamma = parse_double(f[2]);
  r.dBB = parse_double(f[3]);
  r.dAA = parse_double(f[4]);
  r.dSS = parse_double(f[5]);
  r.sr = parse_double(f[6]);
  r.l2 = parse_double(f[7]);
  r.n = static_cast<std::size_t>(parse_double(f[8]));
  return r;
}

nlohmann::json sample_metrics_to_json(const SampleMetrics& m) {
  return {{"dBB", m.dBB}, {"dAA", m.dAA}, {"dSS", m.dSS}, {"l2", m.l2}};
}

SampleMetrics sample_metrics_from_json(const nlohmann::json& j) {
  return {j.at("dBB").get<double>(), j.at("dAA").get<double>(), j.at("dSS").get<double>(), j.at("l2").get<double>()};
}

nlohmann::json report_to_json(const BatchReport& r) {
  return {{"model", r.tag.model_id}, {"mode", mode_name(r.tag.mode)}, {"gamma", r.tag.gamma},
          {"N", r.n},                {"dBB", r.dBB},                 {"dAA", r.dAA},
          {"dSS", r.dSS},            {"SR", r.sr},                   {"l2", r.l2}};
}

BatchReport report_from_json(const nlohmann::json& j) {
  BatchReport r;
  try {
    r.tag.model_id = j.at("model").get<std::string>();
    r.tag.mode = parse_mode(j.at("mode").get<std::string>());
    r.tag.gamma = j.at("gamma").get<double>();
    r.n = j.at("N").get<std::size_t>();
    r.dBB = j.at("dBB").get<double>();
    r.dAA = j.at("dAA").get<double>();
    r.dSS = j.at("dSS").get<double>();
    r.sr = j.at("SR").get<double>();
    r.l2 = j.at("l2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail_validation(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string format_report_table(std::span<const std::string> labels, std::span<const BatchReport> reports) {
  if (labels.size() != reports.size()) fail_validation("one label per report row required");
  std::size_t width = 8;
  for (const auto& l : labels) width = std::max(width, l.size() + 2);
  char buf[256];
  std::ostringstream os;
  std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s %7s %6s %5s\n", static_cast<int>(width), "", "dB/B", "dA/A",
                "dS/S", "SR", "l2", "N");
  os << buf;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s %7s %6.2f %5zu\n", static_cast<int>(width), labels[i].c_str(),
                  percent(r.dBB).c_str(), percent(r.dAA).c_str(), percent(r.dSS).c_str(), rate(r.sr).c_str(), r.l2,
                  r.n);
    os << buf;
  }
  return os.str();
}

}  // namespace skelattack
