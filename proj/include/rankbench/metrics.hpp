#ifndef RANKBENCH_METRICS_HPP
#define RANKBENCH_METRICS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rankbench/common.hpp"

namespace rankbench {

using VectorRef = Eigen::Ref<const Vector>;

/// Contingency-table summaries at descending probability thresholds.
/// A row is forecast "yes" when p >= threshold. SR is 0 when nothing is
/// forecast.
struct PerformanceDiagram {
  Vector thresholds;
  Vector pod;
  Vector sr;
  Vector csi;
};

struct FitStats {
  double kendall_tau = 0.0;
  double log_pearson = 0.0;
  double r2 = 0.0;
  double mse = 0.0;
  Index n = 0;
};

inline constexpr int kDefaultThresholds = 200;

/// P(random positive scores above random negative), ties counted 1/2.
double roc_auc(VectorRef y, VectorRef p);

double brier_skill_score(VectorRef y, VectorRef p);

PerformanceDiagram performance_curve(VectorRef y, VectorRef p, int n_thresholds = kDefaultThresholds);

/// Area under success ratio versus probability of detection, normalized
/// against the base rate: (AUPDC - b) / (1 - b).
double naupdc(VectorRef y, VectorRef p, int n_thresholds = kDefaultThresholds);

/// Maximum critical success index over thresholds, normalized as
/// (CSI_max - b) / (1 - b).
double ncsi(VectorRef y, VectorRef p, int n_thresholds = kDefaultThresholds);

/// Verification metrics available to permutation importance and retraining
/// experiments. All are "higher is better".
enum class Metric { kNaupdc, kAuc, kBss, kNcsi };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);
const std::vector<std::string>& metric_names();
double evaluate(Metric m, VectorRef y, VectorRef p);

/// Bootstrap means of Kendall tau-b, Pearson after log-transform of the
/// performance, and R^2 / MSE of a least-squares polynomial fit of
/// performance on min-max scaled importance.
FitStats association_stats(VectorRef importance, VectorRef performance, int degree = 5, int n_boot = 100,
                           std::uint64_t seed = 0);

/// Single-sample versions of the statistics averaged by association_stats.
FitStats association_point(VectorRef importance, VectorRef performance, int degree = 5);

/// log(x - min(x) + eps), eps = 1e-3 of the range.
Vector log_shift(VectorRef x);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile interval of the bootstrap distribution of the mean.
Interval bootstrap_ci(VectorRef samples, int n_boot, double level, std::uint64_t seed);

/// Percentile interval of an already-computed bootstrap distribution.
Interval percentile_interval(VectorRef distribution, double level);

}  // namespace rankbench

#endif  // RANKBENCH_METRICS_HPP
