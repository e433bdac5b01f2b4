#include "rankbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankbench/stats.hpp"

namespace rankbench {

namespace {

struct ClassCounts {
  Index positives = 0;
  Index negatives = 0;
};

ClassCounts check_binary(VectorRef y, VectorRef p, const char* op) {
  if (y.size() != p.size()) throw InvalidArgument(std::string(op) + ": length mismatch");
  ClassCounts c;
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) == 1.0) {
      ++c.positives;
    } else if (y(i) == 0.0) {
      ++c.negatives;
    } else {
      throw InvalidArgument(std::string(op) + ": targets must be 0 or 1");
    }
  }
  if (c.positives == 0 || c.negatives == 0) {
    throw InvalidArgument(std::string(op) + ": both classes must be present");
  }
  return c;
}

// Hits and forecast counts for "p >= t" at each threshold, from one sort.
struct Tables {
  Vector thresholds;
  std::vector<Index> hits;
  std::vector<Index> yes;
  Index positives = 0;
};

Tables contingency(VectorRef y, VectorRef p, int n_thresholds) {
  if (n_thresholds < 2) throw InvalidArgument("performance_curve: need at least 2 thresholds");
  const Index n = y.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return p(a) > p(b); });
  std::vector<Index> cum_hits(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t k = 0; k < order.size(); ++k) cum_hits[k + 1] = cum_hits[k] + (y(order[k]) == 1.0);

  Tables t;
  t.positives = cum_hits.back();
  t.thresholds.resize(n_thresholds);
  t.hits.resize(static_cast<std::size_t>(n_thresholds));
  t.yes.resize(static_cast<std::size_t>(n_thresholds));
  const double denom = static_cast<double>(n_thresholds - 1);
  for (int k = 0; k < n_thresholds; ++k) {
    const double threshold = static_cast<double>(n_thresholds - 1 - k) / denom;
    // number of rows with p >= threshold (p sorted descending)
    const auto it = std::partition_point(order.begin(), order.end(), [&](Index i) { return p(i) >= threshold; });
    const auto yes = static_cast<std::size_t>(it - order.begin());
    t.thresholds(k) = threshold;
    t.yes[static_cast<std::size_t>(k)] = static_cast<Index>(yes);
    t.hits[static_cast<std::size_t>(k)] = cum_hits[yes];
  }
  return t;
}

}  // namespace

double roc_auc(VectorRef y, VectorRef p) {
  const auto c = check_binary(y, p, "roc_auc");
  const Vector ranks = stats::average_ranks(p);
  double pos_rank_sum = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) == 1.0) pos_rank_sum += ranks(i);
  }
  const auto n1 = static_cast<double>(c.positives);
  const auto n0 = static_cast<double>(c.negatives);
  return (pos_rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

double brier_skill_score(VectorRef y, VectorRef p) {
  check_binary(y, p, "brier_skill_score");
  const double bs = (p - y).squaredNorm() / static_cast<double>(y.size());
  const double b = y.mean();
  const double climo = b * (1.0 - b);
  return 1.0 - bs / climo;
}

PerformanceDiagram performance_curve(VectorRef y, VectorRef p, int n_thresholds) {
  check_binary(y, p, "performance_curve");
  const Tables t = contingency(y, p, n_thresholds);
  PerformanceDiagram d;
  d.thresholds = t.thresholds;
  d.pod.resize(n_thresholds);
  d.sr.resize(n_thresholds);
  d.csi.resize(n_thresholds);
  for (int k = 0; k < n_thresholds; ++k) {
    const auto hits = static_cast<double>(t.hits[static_cast<std::size_t>(k)]);
    const auto yes = static_cast<double>(t.yes[static_cast<std::size_t>(k)]);
    const auto pos = static_cast<double>(t.positives);
    const double misses = pos - hits;
    const double false_alarms = yes - hits;
    d.pod(k) = hits / pos;
    d.sr(k) = yes > 0 ? hits / yes : 0.0;
    const double denom = hits + misses + false_alarms;
    d.csi(k) = denom > 0 ? hits / denom : 0.0;
  }
  return d;
}

double naupdc(VectorRef y, VectorRef p, int n_thresholds) {
  check_binary(y, p, "naupdc");
  const Tables t = contingency(y, p, n_thresholds);
  const auto pos = static_cast<double>(t.positives);
  std::vector<std::pair<double, double>> points;  // (pod, sr)
  for (std::size_t k = 0; k < t.yes.size(); ++k) {
    if (t.yes[k] == 0) continue;
    const auto hits = static_cast<double>(t.hits[k]);
    points.emplace_back(hits / pos, hits / static_cast<double>(t.yes[k]));
  }
  std::sort(points.begin(), points.end());
  // keep the maximum SR at each POD (sorted ascending, so the last of a run)
  std::vector<std::pair<double, double>> curve;
  for (const auto& pt : points) {
    if (!curve.empty() && curve.back().first == pt.first) {
      curve.back().second = std::max(curve.back().second, pt.second);
    } else {
      curve.push_back(pt);
    }
  }
  double area = curve.front().first * curve.front().second;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += 0.5 * (curve[k].first - curve[k - 1].first) * (curve[k].second + curve[k - 1].second);
  }
  const double b = y.mean();
  return (area - b) / (1.0 - b);
}

double ncsi(VectorRef y, VectorRef p, int n_thresholds) {
  const PerformanceDiagram d = performance_curve(y, p, n_thresholds);
  const double b = y.mean();
  return (d.csi.maxCoeff() - b) / (1.0 - b);
}

Metric parse_metric(const std::string& name) {
  if (name == "naupdc") return Metric::kNaupdc;
  if (name == "auc") return Metric::kAuc;
  if (name == "bss") return Metric::kBss;
  if (name == "ncsi") return Metric::kNcsi;
  throw InvalidArgument("unknown metric '" + name + "' (valid: naupdc, auc, bss, ncsi)");
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::kNaupdc: return "naupdc";
    case Metric::kAuc: return "auc";
    case Metric::kBss: return "bss";
    case Metric::kNcsi: return "ncsi";
  }
  return "naupdc";
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"naupdc", "auc", "bss", "ncsi"};
  return names;
}

double evaluate(Metric m, VectorRef y, VectorRef p) {
  switch (m) {
    case Metric::kNaupdc: return naupdc(y, p);
    case Metric::kAuc: return roc_auc(y, p);
    case Metric::kBss: return brier_skill_score(y, p);
    case Metric::kNcsi: return ncsi(y, p);
  }
  return naupdc(y, p);
}

Vector log_shift(VectorRef x) {
  const double lo = x.minCoeff();
  const double range = x.maxCoeff() - lo;
  const double eps = 1e-3 * range;
  return (x.array() - lo + eps).log();
}

FitStats association_point(VectorRef importance, VectorRef performance, int degree) {
  FitStats s;
  s.n = importance.size();
  s.kendall_tau = stats::kendall_tau_b(importance, performance);
  s.log_pearson = stats::pearson(importance, log_shift(performance));
  const double lo = importance.minCoeff();
  const double range = importance.maxCoeff() - lo;
  const Vector scaled = (importance.array() - lo) / range;
  const auto fit = stats::polyfit(scaled, performance, degree);
  s.r2 = fit.r2;
  s.mse = fit.mse;
  return s;
}

FitStats association_stats(VectorRef importance, VectorRef performance, int degree, int n_boot,
                           std::uint64_t seed) {
  const Index n = importance.size();
  if (performance.size() != n) throw InvalidArgument("association_stats: length mismatch");
  if (degree < 1) throw InvalidArgument("association_stats: degree must be >= 1");
  if (n < degree + 2) throw InvalidArgument("association_stats: need at least degree + 2 pairs");
  if (n_boot < 1) throw InvalidArgument("association_stats: n_boot must be >= 1");
  if (importance.maxCoeff() == importance.minCoeff() || performance.maxCoeff() == performance.minCoeff()) {
    throw InvalidArgument("association_stats: zero variance input");
  }
  FitStats mean;
  Vector imp(n), perf(n);
  for (int b = 0; b < n_boot; ++b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    for (int attempt = 0;; ++attempt) {
      for (Index i = 0; i < n; ++i) {
        const auto r = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        imp(i) = importance(r);
        perf(i) = performance(r);
      }
      if (imp.maxCoeff() > imp.minCoeff() && perf.maxCoeff() > perf.minCoeff()) break;
      if (attempt > 1000) throw Error("association_stats: degenerate bootstrap resamples");
    }
    const FitStats s = association_point(imp, perf, degree);
    mean.kendall_tau += s.kendall_tau;
    mean.log_pearson += s.log_pearson;
    mean.r2 += s.r2;
    mean.mse += s.mse;
  }
  const auto nb = static_cast<double>(n_boot);
  mean.kendall_tau /= nb;
  mean.log_pearson /= nb;
  mean.r2 /= nb;
  mean.mse /= nb;
  mean.n = n;
  return mean;
}

Interval percentile_interval(VectorRef distribution, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  return {stats::quantile(distribution, tail), stats::quantile(distribution, 1.0 - tail)};
}

Interval bootstrap_ci(VectorRef samples, int n_boot, double level, std::uint64_t seed) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("bootstrap_ci: level must lie in (0, 1)");
  if (samples.size() < 2) throw InvalidArgument("bootstrap_ci: need at least 2 samples");
  if (n_boot < 1) throw InvalidArgument("bootstrap_ci: n_boot must be >= 1");
  const Index n = samples.size();
  Vector means(n_boot);
  Rng rng(seed);
  for (int b = 0; b < n_boot; ++b) {
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) sum += samples(static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
    means(b) = sum / static_cast<double>(n);
  }
  return percentile_interval(means, level);
}

}  // namespace rankbench
