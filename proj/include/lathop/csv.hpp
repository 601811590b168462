#pragma once

#include <string>
#include <vector>

namespace lathop::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// 17 significant digits, round-trips every double.
std::string format_double(double v);

/// Numeric CSV with one header line. Throws InputError on ragged rows or
/// non-numeric cells.
Table parse(const std::string& text);

}  // namespace lathop::csv
