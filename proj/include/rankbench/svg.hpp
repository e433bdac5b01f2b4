#ifndef RANKBENCH_SVG_HPP
#define RANKBENCH_SVG_HPP

#include <string>
#include <vector>

#include "rankbench/common.hpp"

namespace rankbench::svg {

struct Series {
  std::string label;
  Vector x;
  Vector y;
};

/// Horizontal bars of median rank (best at top) with IQR whiskers.
std::string ranked_bars(const std::vector<std::string>& names, const Vector& median, const Vector& iqr,
                        const std::string& title);

std::string line_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                      const std::string& y_label);

/// Point density as hexagonal bin counts, shaded by count.
std::string hexbin(const Vector& x, const Vector& y, const std::string& title, const std::string& x_label,
                   const std::string& y_label, int grid = 20);

/// Vertical bars with [low, high] error bars.
std::string bars_with_ci(const std::vector<std::string>& labels, const Vector& values, const Vector& low,
                         const Vector& high, const std::string& title, const std::string& y_label);

/// Vertical bars with a dashed reference line at 1.
std::string ratio_bars(const std::vector<std::string>& labels, const Vector& ratios, const std::string& title);

}  // namespace rankbench::svg

#endif  // RANKBENCH_SVG_HPP
