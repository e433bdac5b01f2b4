#ifndef RANKBENCH_FAITHFULNESS_HPP
#define RANKBENCH_FAITHFULNESS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankbench/dataset.hpp"
#include "rankbench/metrics.hpp"
#include "rankbench/models.hpp"
#include "rankbench/rankings.hpp"

namespace rankbench {

/// One retrained feature subset. Totals are indexed like the report's
/// method list.
struct FaithfulnessRecord {
  std::vector<std::string> subset;
  int subset_size = 0;
  double performance = 0.0;
  Vector raw_total;
  Vector scaled_total;
};

struct FaithfulnessReport {
  std::vector<std::string> methods;
  std::vector<FitStats> fit_stats;  // per method
  std::vector<FaithfulnessRecord> records;
  std::string metric;
  int n_subsets = 0;
  int failures = 0;
  ModelConfig model;
  std::uint64_t seed = 0;
  Index n_features = 0;
};

struct ExperimentOptions {
  int n_subsets = 5000;
  Metric metric = Metric::kNaupdc;
  double test_fraction = 0.25;
  int degree = 5;
  int n_boot = 100;
  std::uint64_t seed = 0;
};

/// Sum of the card's scores over the named features.
double total_importance(const RankingScorecard& card, const std::vector<std::string>& names);

/// Min-max scaling to [0, 1]; a constant vector maps to 0.5 everywhere.
Vector min_max_scale(const Vector& v);

/// Retrains on random feature subsets (size uniform in [1, P-1], members
/// uniform) and relates each subset's test-split performance to every card's
/// total importance over the subset.
FaithfulnessReport run_experiment(const Dataset& data, const ModelConfig& model_cfg,
                                  std::span<const RankingScorecard> cards, const ExperimentOptions& options);

struct ParetoPoint {
  int subset_size = 0;
  int count = 0;
  double mean = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

/// Performance aggregated by subset size, ascending.
std::vector<ParetoPoint> pareto_curve(const FaithfulnessReport& report);

struct TopBottomResult {
  double delta = 0.0;
  Interval ci;
  double top_performance = 0.0;
  double bottom_performance = 0.0;
  std::vector<std::string> top;
  std::vector<std::string> bottom;
};

/// Trains on the card's k best and k worst features and compares their
/// performance on the same (training) rows; the interval bootstraps those
/// rows.
TopBottomResult topk_bottomk(const Dataset& data, const ModelConfig& model_cfg, const RankingScorecard& card,
                             int k = 15, Metric metric = Metric::kNaupdc, int n_boot = 1000, std::uint64_t seed = 0);

struct IncrementalCurves {
  Vector best;   // best[k - 1]: top-k features
  Vector worst;  // worst[k - 1]: bottom-k features
};

IncrementalCurves incremental_curves(const Dataset& data, const ModelConfig& model_cfg,
                                     const RankingScorecard& card, int k_max = 15,
                                     Metric metric = Metric::kNaupdc, std::uint64_t seed = 0);

/// Feature names ordered by rank (best first).
std::vector<std::string> names_by_rank(const RankingScorecard& card);

}  // namespace rankbench

#endif  // RANKBENCH_FAITHFULNESS_HPP
