#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mpet/config.hpp"

namespace mpet {

/// Rectangular text table; every row has header.size() cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Two significant digits, "2.1E-1" style (no '+', no leading exponent
/// zeros); "0" for zero.
std::string format_sci(double v);
/// Sweep coordinates: "1E16", "5E-10", "2.5E3", "0".
std::string format_param(double v);
/// Convergence factors with two decimals; "<0.01" below 0.005.
std::string format_factor(double v);
/// "1/N".
std::string format_h(int n);

/// RFC-4180 CSV (CRLF-free: rows end in '\n', fields quoted only when they
/// contain ',', '"' or a line break) or a GitHub markdown table. Both carry
/// the same cell strings.
void emit_table(const Table& t, OutputFormat format, std::ostream& os);

}  // namespace mpet
