#ifndef RANKBENCH_SELECTION_HPP
#define RANKBENCH_SELECTION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rankbench/dataset.hpp"
#include "rankbench/effects.hpp"
#include "rankbench/metrics.hpp"
#include "rankbench/models.hpp"

namespace rankbench {

inline constexpr double kDefaultSelectionC = 0.0075;
inline constexpr double kDefaultCoefficientCutoff = 1e-5;

/// Features whose standardized L1-logistic coefficient exceeds `cutoff` in
/// magnitude, in column order.
std::vector<std::string> l1_select(const Dataset& data, double C = kDefaultSelectionC,
                                   double cutoff = kDefaultCoefficientCutoff, std::uint64_t seed = 0);

Dataset manual_filter(const Dataset& data, const std::vector<std::string>& drop);

/// Bootstrap-mean test-set scores of one model.
struct MetricTable {
  double naupdc = 0.0;
  double ncsi = 0.0;
  double auc = 0.0;
  double bss = 0.0;
};

struct SelectionReport {
  std::vector<std::string> retained;
  std::vector<std::string> dropped_manual;
  std::vector<std::string> dropped_l1;
  double C = kDefaultSelectionC;
  double cutoff = kDefaultCoefficientCutoff;
  MetricTable before;
  MetricTable after;
  /// Paired bootstrap (same resampled test rows) of NAUPDC(reduced) - NAUPDC(full).
  double naupdc_difference = 0.0;
  Interval naupdc_difference_ci;
  ComplexityReport complexity_before;
  ComplexityReport complexity_after;
  int n_boot = 0;
};

struct CompareOptions {
  double test_fraction = 0.25;
  int n_boot = 1000;
  int complexity_boot = 100;
  int ale_bins = kDefaultAleBins;
  double mec_epsilon = kDefaultMecEpsilon;
  std::uint64_t seed = 0;
};

/// Trains full and reduced models on one shared training split and compares
/// their test-set scores and training-set complexity. Fills `retained` with
/// the reduced features and `dropped_l1` with the remainder.
SelectionReport compare_models(const Dataset& data_full, const Dataset& data_reduced,
                               const ModelConfig& model_cfg_full, const ModelConfig& model_cfg_reduced,
                               const CompareOptions& options);

/// Manual removal, then L1 selection, then compare_models.
SelectionReport reduce_and_compare(const Dataset& data, const std::vector<std::string>& manual_drop, double C,
                                   double cutoff, const ModelConfig& model_cfg_full,
                                   const ModelConfig& model_cfg_reduced, const CompareOptions& options);

}  // namespace rankbench

#endif  // RANKBENCH_SELECTION_HPP
