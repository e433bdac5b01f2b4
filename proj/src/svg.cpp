#include "rankbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace rankbench::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

Range range_of(const Vector& v) {
  Range r{v.size() ? v.minCoeff() : 0.0, v.size() ? v.maxCoeff() : 1.0};
  return r;
}

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  std::ostringstream& body() { return body_; }

  void axes(const std::string& title, const std::string& x_label, const std::string& y_label, bool x_ticks = true) {
    auto& o = body_;
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\"" << num(kWidth - kRight)
      << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
        << label_num(yv) << "</text>\n";
      if (x_ticks) {
        const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
        o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kHeight - kBottom + 14)
          << "\" text-anchor=\"middle\" font-size=\"10\">" << label_num(xv) << "</text>\n";
      }
    }
    o << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
    o << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << num((kTop + kHeight - kBottom) / 2) << ")\">" << escape(y_label)
      << "</text>\n";
  }

  std::string str() const {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
    return o.str();
  }

 private:
  Range x_, y_;
  std::ostringstream body_;
};

std::string vertical_bars(const std::vector<std::string>& labels, const Vector& values, const Vector* low,
                          const Vector* high, const std::string& title, const std::string& y_label,
                          double reference) {
  const auto n = static_cast<Index>(labels.size());
  Range y{0.0, 0.0};
  for (Index i = 0; i < n; ++i) {
    y.include(values(i));
    if (low) y.include((*low)(i));
    if (high) y.include((*high)(i));
  }
  if (std::isfinite(reference)) y.include(reference);
  y.pad();
  Canvas c({0.0, static_cast<double>(std::max<Index>(n, 1))}, y);
  c.axes(title, "", y_label, false);
  auto& o = c.body();
  for (Index i = 0; i < n; ++i) {
    const double x0 = c.px(static_cast<double>(i) + 0.15);
    const double x1 = c.px(static_cast<double>(i) + 0.85);
    const double top = c.py(std::max(values(i), 0.0));
    const double base = c.py(std::min(values(i), 0.0));
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(top) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(base - top) << "\" fill=\"" << kPalette[i % 10] << "\"/>\n";
    if (low && high) {
      const double xm = 0.5 * (x0 + x1);
      o << "<line x1=\"" << num(xm) << "\" y1=\"" << num(c.py((*low)(i))) << "\" x2=\"" << num(xm) << "\" y2=\""
        << num(c.py((*high)(i))) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
      for (double yv : {(*low)(i), (*high)(i)}) {
        o << "<line x1=\"" << num(xm - 6) << "\" y1=\"" << num(c.py(yv)) << "\" x2=\"" << num(xm + 6) << "\" y2=\""
          << num(c.py(yv)) << "\" stroke=\"black\"/>\n";
      }
    }
    const double xl = 0.5 * (x0 + x1);
    o << "<text x=\"" << num(xl) << "\" y=\"" << num(kHeight - kBottom + 14)
      << "\" text-anchor=\"end\" font-size=\"10\" transform=\"rotate(-30 " << num(xl) << ' '
      << num(kHeight - kBottom + 14) << ")\">" << escape(labels[static_cast<std::size_t>(i)]) << "</text>\n";
  }
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(c.py(0.0)) << "\" x2=\"" << num(kWidth - kRight) << "\" y2=\""
    << num(c.py(0.0)) << "\" stroke=\"gray\"/>\n";
  if (std::isfinite(reference)) {
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(c.py(reference)) << "\" x2=\"" << num(kWidth - kRight)
      << "\" y2=\"" << num(c.py(reference)) << "\" stroke=\"black\" stroke-dasharray=\"5,4\"/>\n";
  }
  return c.str();
}

}  // namespace

std::string ranked_bars(const std::vector<std::string>& names, const Vector& median, const Vector& iqr,
                        const std::string& title) {
  const auto n = static_cast<Index>(names.size());
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return median(a) < median(b); });
  Range x{0.0, 1.0};
  for (Index i = 0; i < n; ++i) x.include(median(i) + 0.5 * iqr(i));
  x.hi += 0.5;
  Canvas c(x, {0.0, static_cast<double>(std::max<Index>(n, 1))});
  auto& o = c.body();
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
    o << "<text x=\"" << num(c.px(xv)) << "\" y=\"" << num(kHeight - kBottom + 14)
      << "\" text-anchor=\"middle\" font-size=\"10\">" << label_num(xv) << "</text>\n";
  }
  o << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
    << "\" text-anchor=\"middle\" font-size=\"12\">median rank (whiskers: IQR)</text>\n";
  const double slot = 1.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Index i = order[k];
    const double row = static_cast<double>(n) - static_cast<double>(k) - slot;
    const double y0 = c.py(row + 0.85);
    const double y1 = c.py(row + 0.15);
    const double x0 = c.px(0.0);
    const double x1 = c.px(median(i));
    o << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(y1 - y0) << "\" fill=\"#1f77b4\"/>\n";
    const double ym = 0.5 * (y0 + y1);
    o << "<line x1=\"" << num(c.px(median(i) - 0.5 * iqr(i))) << "\" y1=\"" << num(ym) << "\" x2=\""
      << num(c.px(median(i) + 0.5 * iqr(i))) << "\" y2=\"" << num(ym) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(ym + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
      << escape(names[static_cast<std::size_t>(i)]) << "</text>\n";
  }
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\"" << num(kWidth - kRight)
    << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
  return c.str();
}

std::string line_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                      const std::string& y_label) {
  Range x{0.0, 0.0}, y{0.0, 0.0};
  bool first = true;
  for (const auto& s : series) {
    if (s.x.size() == 0) continue;
    const Range rx = range_of(s.x), ry = range_of(s.y);
    if (first) {
      x = rx;
      y = ry;
      first = false;
    } else {
      x.include(rx.lo), x.include(rx.hi), y.include(ry.lo), y.include(ry.hi);
    }
  }
  x.pad();
  y.pad();
  Canvas c(x, y);
  c.axes(title, x_label, y_label);
  auto& o = c.body();
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    o << "<polyline fill=\"none\" stroke=\"" << kPalette[k % 10] << "\" stroke-width=\"2\" points=\"";
    for (Index i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << num(c.px(s.x(i))) << ',' << num(c.py(s.y(i)));
    o << "\"/>\n";
    o << "<text x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(kTop + 14.0 * static_cast<double>(k + 1))
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << kPalette[k % 10] << "\">" << escape(s.label)
      << "</text>\n";
  }
  return c.str();
}

std::string hexbin(const Vector& x, const Vector& y, const std::string& title, const std::string& x_label,
                   const std::string& y_label, int grid) {
  Range rx = range_of(x), ry = range_of(y);
  rx.pad();
  ry.pad();
  Canvas c(rx, ry);
  c.axes(title, x_label, y_label);
  // Pointy-top hexagons on a pixel lattice.
  const double plot_w = kWidth - kLeft - kRight;
  const double r = plot_w / (std::sqrt(3.0) * std::max(grid, 1));
  const double w = std::sqrt(3.0) * r;
  const double h = 1.5 * r;
  std::map<std::pair<long, long>, int> counts;
  for (Index i = 0; i < x.size(); ++i) {
    const double px = c.px(x(i)) - kLeft;
    const double py = c.py(y(i)) - kTop;
    const long row = std::lround(py / h);
    // Nearest centre among the surrounding rows and columns.
    double best = 1e300;
    std::pair<long, long> cell{row, 0};
    for (long dr = -1; dr <= 1; ++dr) {
      const long rr = row + dr;
      const double sh = (rr % 2 != 0) ? 0.5 * w : 0.0;
      for (long dc = -1; dc <= 1; ++dc) {
        const long cc = std::lround((px - sh) / w) + dc;
        const double cx = cc * w + sh, cy = rr * h;
        const double d = (px - cx) * (px - cx) + (py - cy) * (py - cy);
        if (d < best) {
          best = d;
          cell = {rr, cc};
        }
      }
    }
    ++counts[cell];
  }
  int max_count = 1;
  for (const auto& [cell, n] : counts) max_count = std::max(max_count, n);
  auto& o = c.body();
  for (const auto& [cell, n] : counts) {
    const double sh = (cell.first % 2 != 0) ? 0.5 * w : 0.0;
    const double cx = kLeft + static_cast<double>(cell.second) * w + sh;
    const double cy = kTop + static_cast<double>(cell.first) * h;
    const double t = std::log1p(n) / std::log1p(max_count);
    const int shade = static_cast<int>(std::lround(230.0 * (1.0 - t)));
    o << "<polygon points=\"";
    for (int k = 0; k < 6; ++k) {
      const double a = M_PI / 180.0 * (60.0 * k - 30.0);
      o << (k ? " " : "") << num(cx + r * std::cos(a)) << ',' << num(cy + r * std::sin(a));
    }
    o << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"none\"><title>" << n << "</title></polygon>\n";
  }
  o << "<text x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(kTop + 12)
    << "\" text-anchor=\"end\" font-size=\"10\">max count " << max_count << "</text>\n";
  return c.str();
}

std::string bars_with_ci(const std::vector<std::string>& labels, const Vector& values, const Vector& low,
                         const Vector& high, const std::string& title, const std::string& y_label) {
  return vertical_bars(labels, values, &low, &high, title, y_label, NAN);
}

std::string ratio_bars(const std::vector<std::string>& labels, const Vector& ratios, const std::string& title) {
  return vertical_bars(labels, ratios, nullptr, nullptr, title, "uncertainty ratio", 1.0);
}

}  // namespace rankbench::svg
