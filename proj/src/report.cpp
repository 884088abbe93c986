#include "bridgebound/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bridgebound/errors.hpp"

namespace bridgebound {

std::string format_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

// Numbers go in bare when finite, quoted otherwise.
std::string json_number(double x) {
  if (!std::isfinite(x)) return "\"" + format_float(x) + "\"";
  return format_float(x);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string report_to_json(const BoundReport& r) {
  std::ostringstream os;
  os << "{\"constants\":{";
  bool first = true;
  for (const auto& [k, v] : r.constants) {  // std::map iterates in key order
    if (!first) os << ",";
    first = false;
    os << json_string(k) << ":" << json_number(v);
  }
  os << "},\"degenerate\":" << (r.degenerate ? "true" : "false");
  os << ",\"lhs\":" << json_number(r.lhs);
  os << ",\"name\":" << json_string(r.name);
  os << ",\"numerical_slack\":" << json_number(r.numerical_slack);
  os << ",\"pass\":" << (r.pass ? "true" : "false");
  os << ",\"rhs\":" << json_number(r.rhs);
  os << ",\"slack\":" << json_number(r.slack);
  os << "}";
  return os.str();
}

std::string reports_to_json(const std::vector<BoundReport>& reports) {
  std::string out = "[\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    out += "  " + report_to_json(reports[i]);
    if (i + 1 < reports.size()) out += ",";
    out += "\n";
  }
  out += "]\n";
  return out;
}

std::string summary_csv(const std::vector<BoundReport>& reports) {
  std::string out = "name,lhs,rhs,slack,pass\n";
  for (const auto& r : reports) {
    out += r.name + "," + format_float(r.lhs) + "," + format_float(r.rhs) + "," +
           format_float(r.slack) + "," + (r.pass ? "1" : "0") + "\n";
  }
  return out;
}

std::string decay_csv(const DecayCurve& curve) {
  std::string out = "n,H_n,bound_n\n";
  for (const auto& e : curve.entries)
    out += std::to_string(e.n) + "," + format_float(e.h) + "," + format_float(e.bound) + "\n";
  return out;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::string out = "n,residual_mu,residual_eta,kl,gauge\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + format_float(r.residual_mu) + "," +
           format_float(r.residual_eta) + "," + format_float(r.kl) + "," +
           format_float(r.gauge) + "\n";
  }
  return out;
}

std::string field_csv(const MatrixField& f) {
  const int d = static_cast<int>(f.support.cols());
  std::string header;
  for (int a = 0; a < d; ++a) header += "x" + std::to_string(a) + ",";
  std::string out;
  bool wrote_header = false;
  for (size_t i = 0; i < f.values.size(); ++i) {
    const auto& v = f.values[i];
    if (!wrote_header) {
      std::string cols = header;
      for (int r = 0; r < v.rows(); ++r)
        for (int c = 0; c < v.cols(); ++c)
          cols += "v" + std::to_string(r) + std::to_string(c) + ",";
      cols.pop_back();
      out = cols + "\n";
      wrote_header = true;
    }
    std::string row;
    for (int a = 0; a < d; ++a) row += format_float(f.support(i, a)) + ",";
    for (int r = 0; r < v.rows(); ++r)
      for (int c = 0; c < v.cols(); ++c) row += format_float(v(r, c)) + ",";
    row.pop_back();
    out += row + "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << content;
  if (!f) throw ConfigError("write failed: " + path);
}

}  // namespace bridgebound
