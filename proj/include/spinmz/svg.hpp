#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spinmz::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal line chart. Output is deterministic: coordinates are formatted at
// fixed precision, so identical inputs give byte-identical files.
struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;  // skips non-positive points
  int width = 860;
  int height = 520;
};

void write_chart(const Chart& chart, std::ostream& out);  // throws ValidationError

}  // namespace spinmz::svg
