#include "rankbench/effects.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "rankbench/parallel.hpp"
#include "rankbench/stats.hpp"

namespace rankbench {

namespace {

// Bin index for value v: edges[b] < v <= edges[b + 1], with the minimum in
// bin 0 and anything outside the edges clamped to the end bins.
Index bin_of(const std::vector<double>& edges, double v) {
  const auto it = std::lower_bound(edges.begin() + 1, edges.end() - 1, v);
  return static_cast<Index>(it - (edges.begin() + 1));
}

bool is_constant(const Eigen::Ref<const Vector>& column) { return column.minCoeff() == column.maxCoeff(); }

struct LineFit {
  double sse = 0.0;
};

// Weighted least-squares line through points [lo, hi].
LineFit fit_line(const Vector& x, const Vector& y, const Vector& w, Index lo, Index hi) {
  double sw = 0, sx = 0, sy = 0;
  for (Index i = lo; i <= hi; ++i) {
    sw += w(i);
    sx += w(i) * x(i);
    sy += w(i) * y(i);
  }
  if (sw <= 0.0) return {};
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (Index i = lo; i <= hi; ++i) {
    sxx += w(i) * (x(i) - mx) * (x(i) - mx);
    sxy += w(i) * (x(i) - mx) * (y(i) - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  LineFit fit;
  for (Index i = lo; i <= hi; ++i) {
    const double r = y(i) - (my + slope * (x(i) - mx));
    fit.sse += w(i) * r * r;
  }
  return fit;
}

double population_sd(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const Eigen::Map<const Vector> m(v.data(), static_cast<Index>(v.size()));
  return std::sqrt(stats::variance(m));
}

}  // namespace

double AleCurve::interpolate(double x) const {
  const Index k = bin_edges.size();
  if (x <= bin_edges(0)) return edge_values(0);
  if (x >= bin_edges(k - 1)) return edge_values(k - 1);
  const auto* begin = bin_edges.data();
  const auto* it = std::upper_bound(begin, begin + k, x);
  const Index hi = it - begin;
  const Index lo = hi - 1;
  const double t = (x - bin_edges(lo)) / (bin_edges(hi) - bin_edges(lo));
  return edge_values(lo) + t * (edge_values(hi) - edge_values(lo));
}

Vector AleCurve::interpolate(const Eigen::Ref<const Vector>& x) const {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out(i) = interpolate(x(i));
  return out;
}

AleCurve AleCurve::flat(std::string feature, double at) {
  AleCurve c;
  c.feature = std::move(feature);
  c.bin_edges = Vector::Constant(2, at);
  c.bin_edges(1) = std::nextafter(at, std::numeric_limits<double>::infinity());
  c.bin_centers = Vector::Constant(1, at);
  c.values = Vector::Zero(1);
  c.edge_values = Vector::Zero(2);
  c.bin_counts = Vector::Zero(1);
  return c;
}

AleCurve compute_ale(const PredictFn& f, const Dataset& data, const std::string& feature, int n_bins) {
  if (n_bins < 2) throw InvalidArgument("compute_ale: n_bins must be >= 2");
  const Index j = data.index_of(feature);
  const auto column = data.features().col(j);
  if (is_constant(column)) throw InvalidArgument("compute_ale: feature '" + feature + "' is constant");
  const Index n = data.rows();

  // Quantile edges with duplicates removed.
  std::vector<double> edges;
  for (int k = 0; k <= n_bins; ++k) {
    const double q = stats::quantile(column, static_cast<double>(k) / n_bins);
    if (edges.empty() || q > edges.back()) edges.push_back(q);
  }
  // Merge empty bins into their left neighbour by dropping their left edge.
  for (bool merged = true; merged && edges.size() > 2;) {
    merged = false;
    std::vector<Index> counts(edges.size() - 1, 0);
    for (Index i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(bin_of(edges, column(i)))];
    for (std::size_t b = 1; b < counts.size(); ++b) {
      if (counts[b] == 0) {
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(b));
        merged = true;
        break;
      }
    }
  }
  const auto n_real_bins = static_cast<Index>(edges.size() - 1);

  std::vector<Index> bin(static_cast<std::size_t>(n));
  Matrix lower = data.features();
  Matrix upper = data.features();
  for (Index i = 0; i < n; ++i) {
    const Index b = bin_of(edges, column(i));
    bin[static_cast<std::size_t>(i)] = b;
    lower(i, j) = edges[static_cast<std::size_t>(b)];
    upper(i, j) = edges[static_cast<std::size_t>(b + 1)];
  }
  const Vector delta = f(upper) - f(lower);

  Vector sums = Vector::Zero(n_real_bins);
  Vector counts = Vector::Zero(n_real_bins);
  for (Index i = 0; i < n; ++i) {
    sums(bin[static_cast<std::size_t>(i)]) += delta(i);
    counts(bin[static_cast<std::size_t>(i)]) += 1.0;
  }

  AleCurve curve;
  curve.feature = feature;
  curve.bin_edges = Eigen::Map<const Vector>(edges.data(), static_cast<Index>(edges.size()));
  curve.bin_counts = counts;
  curve.edge_values = Vector::Zero(n_real_bins + 1);
  for (Index b = 0; b < n_real_bins; ++b) {
    const double local = counts(b) > 0 ? sums(b) / counts(b) : 0.0;
    curve.edge_values(b + 1) = curve.edge_values(b) + local;
  }
  Vector effect = curve.interpolate(column);
  curve.center_constant = effect.mean();
  curve.edge_values.array() -= curve.center_constant;
  effect.array() -= curve.center_constant;
  curve.variance = stats::variance(effect);
  curve.bin_centers = 0.5 * (curve.bin_edges.head(n_real_bins) + curve.bin_edges.tail(n_real_bins));
  curve.values = 0.5 * (curve.edge_values.head(n_real_bins) + curve.edge_values.tail(n_real_bins));
  return curve;
}

std::vector<AleCurve> compute_all_ale(const PredictFn& f, const Dataset& data, int n_bins) {
  std::vector<AleCurve> curves;
  curves.reserve(static_cast<std::size_t>(data.cols()));
  for (Index j = 0; j < data.cols(); ++j) {
    const auto& name = data.feature_names()[static_cast<std::size_t>(j)];
    const auto column = data.features().col(j);
    curves.push_back(is_constant(column) ? AleCurve::flat(name, column(0)) : compute_ale(f, data, name, n_bins));
  }
  return curves;
}

Vector first_order_predict(std::span<const AleCurve> curves, double f0, const Matrix& x) {
  if (static_cast<Index>(curves.size()) != x.cols()) {
    throw InvalidArgument("first_order_predict: expected one curve per feature (" + std::to_string(x.cols()) +
                          "), got " + std::to_string(curves.size()));
  }
  Vector out = Vector::Constant(x.rows(), f0);
  for (Index j = 0; j < x.cols(); ++j) out += curves[static_cast<std::size_t>(j)].interpolate(x.col(j));
  return out;
}

namespace {

double ias_from(const Vector& pred, std::span<const AleCurve> curves, const Matrix& x) {
  const double f0 = pred.mean();
  const double denom = (pred.array() - f0).square().sum();
  if (!(denom > 0.0)) throw InvalidArgument("ias: model output is constant on the data");
  const Vector first = first_order_predict(curves, f0, x);
  return (pred - first).squaredNorm() / denom;
}

}  // namespace

double ias(const PredictFn& f, const Dataset& data, int n_bins) {
  const auto curves = compute_all_ale(f, data, n_bins);
  return ias_from(f(data.features()), curves, data.features());
}

MecResult mec_feature(const AleCurve& curve, double epsilon) {
  const Vector& x = curve.bin_centers;
  const Vector& y = curve.values;
  const Index k = x.size();
  const Vector w = (curve.bin_counts.size() == k && curve.bin_counts.sum() > 0.0) ? curve.bin_counts
                                                                                  : Vector::Ones(k);
  MecResult result;
  const double my = w.dot(y) / w.sum();
  const double ss_tot = (w.array() * (y.array() - my).square()).sum();
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (k < 2 || ss_tot <= 1e-24 * scale * scale * w.sum()) return result;

  struct Segment {
    Index lo, hi;
    double sse;
  };
  std::vector<Segment> segments{{0, k - 1, fit_line(x, y, w, 0, k - 1).sse}};
  auto r_squared = [&] {
    double sse = 0.0;
    for (const auto& s : segments) sse += s.sse;
    return 1.0 - sse / ss_tot;
  };
  while (r_squared() <= 1.0 - epsilon && static_cast<Index>(segments.size()) < k) {
    auto worst = std::max_element(segments.begin(), segments.end(),
                                  [](const Segment& a, const Segment& b) { return a.sse < b.sse; });
    if (worst->hi - worst->lo < 1 || worst->sse <= 0.0) break;
    Index best_split = worst->lo;
    double best_sse = std::numeric_limits<double>::infinity();
    double best_left = 0.0, best_right = 0.0;
    for (Index s = worst->lo; s < worst->hi; ++s) {
      const double left = fit_line(x, y, w, worst->lo, s).sse;
      const double right = fit_line(x, y, w, s + 1, worst->hi).sse;
      if (left + right < best_sse) {
        best_sse = left + right;
        best_split = s;
        best_left = left;
        best_right = right;
      }
    }
    const Segment right{best_split + 1, worst->hi, best_right};
    *worst = {worst->lo, best_split, best_left};
    segments.insert(worst + 1, right);
  }
  result.segments = static_cast<int>(segments.size());
  for (std::size_t s = 0; s + 1 < segments.size(); ++s) result.knots.push_back(x(segments[s].hi));
  return result;
}

double mec(std::span<const AleCurve> curves, double epsilon) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& c : curves) {
    if (c.variance <= 0.0) continue;
    weighted += c.variance * mec_feature(c, epsilon).segments;
    total += c.variance;
  }
  if (!(total > 0.0)) throw InvalidArgument("mec: every ALE curve has zero variance");
  return weighted / total;
}

ComplexityReport complexity_report(const PredictFn& f, const Dataset& data, int n_boot, std::uint64_t seed,
                                   int n_bins, double epsilon) {
  if (n_boot < 1) throw InvalidArgument("complexity_report: n_boot must be >= 1");
  const auto boots = static_cast<std::size_t>(n_boot);
  std::vector<double> ias_values(boots), mec_values(boots);
  Matrix per_feature(data.cols(), n_boot);
  parallel_for(boots, [&](std::size_t b) {
    const Dataset replicate = bootstrap(data, derive_seed(seed, b));
    const auto curves = compute_all_ale(f, replicate, n_bins);
    ias_values[b] = ias_from(f(replicate.features()), curves, replicate.features());
    mec_values[b] = mec(curves, epsilon);
    for (std::size_t j = 0; j < curves.size(); ++j) {
      per_feature(static_cast<Index>(j), static_cast<Index>(b)) =
          curves[j].variance > 0.0 ? mec_feature(curves[j], epsilon).segments : 1.0;
    }
  });
  ComplexityReport report;
  report.n_boot = n_boot;
  const Eigen::Map<const Vector> iv(ias_values.data(), n_boot);
  const Eigen::Map<const Vector> mv(mec_values.data(), n_boot);
  report.ias_mean = iv.mean();
  report.ias_sd = population_sd(ias_values);
  report.mec_mean = mv.mean();
  report.mec_sd = population_sd(mec_values);
  for (Index j = 0; j < data.cols(); ++j) {
    report.per_feature_mec.emplace_back(data.feature_names()[static_cast<std::size_t>(j)], per_feature.row(j).mean());
  }
  return report;
}

Vector ale_variance_scores(const PredictFn& f, const Dataset& data, int n_bins) {
  Vector scores = Vector::Zero(data.cols());
  for (Index j = 0; j < data.cols(); ++j) {
    const auto& name = data.feature_names()[static_cast<std::size_t>(j)];
    if (is_constant(data.features().col(j))) {
      std::cerr << "warning: feature '" << name << "' is constant; excluded from ALE variance scores\n";
      continue;
    }
    scores(j) = compute_ale(f, data, name, n_bins).variance;
  }
  return scores;
}

}  // namespace rankbench
