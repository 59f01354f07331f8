#include "mpet/table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mpet {

namespace {

// "%.{digits}E" with the exponent rewritten as E-1 / E16.
std::string compact_exponent(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*E", digits, v);
  std::string s(buf);
  const auto e = s.find('E');
  std::string mant = s.substr(0, e);
  const int exp = std::stoi(s.substr(e + 1));
  return mant + "E" + std::to_string(exp);
}

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_field(const std::string& f) {
  std::string out;
  for (char c : f) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string format_sci(double v) {
  if (v == 0.0) return "0";
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  return compact_exponent(v, 1);
}

std::string format_param(double v) {
  if (v == 0.0) return "0";
  std::string s = compact_exponent(v, 1);
  const auto dot0 = s.find(".0E");
  if (dot0 != std::string::npos) s.erase(dot0, 2);
  return s;
}

std::string format_factor(double v) {
  if (v < 0.005) return "<0.01";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string format_h(int n) { return "1/" + std::to_string(n); }

void emit_table(const Table& t, OutputFormat format, std::ostream& os) {
  for (const auto& r : t.rows)
    if (r.size() != t.header.size()) throw std::invalid_argument("emit_table: ragged row");
  auto line = [&](const std::vector<std::string>& cells) {
    if (format == OutputFormat::Csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    } else {
      os << '|';
      for (const auto& c : cells) os << ' ' << md_field(c) << " |";
    }
    os << '\n';
  };
  line(t.header);
  if (format == OutputFormat::Markdown) {
    os << '|';
    for (std::size_t i = 0; i < t.header.size(); ++i) os << " --- |";
    os << '\n';
  }
  for (const auto& r : t.rows) line(r);
}

}  // namespace mpet
