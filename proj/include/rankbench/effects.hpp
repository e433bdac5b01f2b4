#ifndef RANKBENCH_EFFECTS_HPP
#define RANKBENCH_EFFECTS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankbench/common.hpp"
#include "rankbench/dataset.hpp"
#include "rankbench/models.hpp"

namespace rankbench {

inline constexpr int kDefaultAleBins = 30;
inline constexpr double kDefaultMecEpsilon = 0.05;

/// First-order accumulated local effect of one feature on the model output.
///
/// The accumulated effect is tabulated at the quantile bin edges; the curve is
/// piecewise linear between edges and constant beyond the outermost edges.
/// `values` are the same curve read at the bin centers. Both are centered so
/// that the mean effect over the rows used to build the curve is zero.
struct AleCurve {
  std::string feature;
  Vector bin_edges;
  Vector bin_centers;
  Vector values;
  Vector edge_values;
  Vector bin_counts;
  double center_constant = 0.0;
  double variance = 0.0;

  double interpolate(double x) const;
  Vector interpolate(const Eigen::Ref<const Vector>& x) const;

  /// Zero effect, used for features that are constant in the data.
  static AleCurve flat(std::string feature, double at);
};

struct MecResult {
  int segments = 1;
  std::vector<double> knots;  // bin centers that end a segment
};

struct ComplexityReport {
  double ias_mean = 0.0;
  double ias_sd = 0.0;
  double mec_mean = 0.0;
  double mec_sd = 0.0;
  std::vector<std::pair<std::string, double>> per_feature_mec;
  int n_boot = 0;
};

AleCurve compute_ale(const PredictFn& f, const Dataset& data, const std::string& feature,
                     int n_bins = kDefaultAleBins);

/// One curve per column; constant columns get a flat curve.
std::vector<AleCurve> compute_all_ale(const PredictFn& f, const Dataset& data, int n_bins = kDefaultAleBins);

/// f0 + sum_j ALE_j(x_j); curves[j] belongs to column j.
Vector first_order_predict(std::span<const AleCurve> curves, double f0, const Matrix& x);

/// Share of the model's variation around its mean prediction that the sum of
/// first-order effects leaves unexplained.
double ias(const PredictFn& f, const Dataset& data, int n_bins = kDefaultAleBins);

/// Greedy piecewise-linear segmentation of an ALE curve: split the
/// worst-fitting segment at its best bin center until the weighted R^2 of the
/// segmentation exceeds 1 - epsilon.
MecResult mec_feature(const AleCurve& curve, double epsilon = kDefaultMecEpsilon);

/// Variance-weighted mean of per-feature segment counts.
double mec(std::span<const AleCurve> curves, double epsilon = kDefaultMecEpsilon);

ComplexityReport complexity_report(const PredictFn& f, const Dataset& data, int n_boot = 100,
                                   std::uint64_t seed = 0, int n_bins = kDefaultAleBins,
                                   double epsilon = kDefaultMecEpsilon);

/// ALE variance per feature; constant features score 0 and are reported on
/// stderr.
Vector ale_variance_scores(const PredictFn& f, const Dataset& data, int n_bins = kDefaultAleBins);

inline AleCurve compute_ale(const Predictor& p, const Dataset& data, const std::string& feature,
                            int n_bins = kDefaultAleBins) {
  return compute_ale(p.as_function(), data, feature, n_bins);
}
inline double ias(const Predictor& p, const Dataset& data, int n_bins = kDefaultAleBins) {
  return ias(p.as_function(), data, n_bins);
}
inline ComplexityReport complexity_report(const Predictor& p, const Dataset& data, int n_boot = 100,
                                          std::uint64_t seed = 0, int n_bins = kDefaultAleBins,
                                          double epsilon = kDefaultMecEpsilon) {
  return complexity_report(p.as_function(), data, n_boot, seed, n_bins, epsilon);
}
inline Vector ale_variance_scores(const Predictor& p, const Dataset& data, int n_bins = kDefaultAleBins) {
  return ale_variance_scores(p.as_function(), data, n_bins);
}

}  // namespace rankbench

#endif  // RANKBENCH_EFFECTS_HPP
