#ifndef RANKBENCH_DATASET_HPP
#define RANKBENCH_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rankbench/common.hpp"

namespace rankbench {

/// Immutable tabular data: feature matrix, binary target and unique feature
/// names. Construction validates every invariant, so a Dataset in hand is
/// always usable by downstream metrics (finite values, both classes present).
class Dataset {
 public:
  Dataset(Matrix features, Vector target, std::vector<std::string> feature_names);

  const Matrix& features() const { return features_; }
  const Vector& target() const { return target_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  Index rows() const { return features_.rows(); }
  Index cols() const { return features_.cols(); }
  double base_rate() const { return base_rate_; }

  /// Column index of a feature; throws InvalidArgument if absent.
  Index index_of(const std::string& name) const;

  /// Rows in the given order (duplicates allowed, as in a resample).
  Dataset take_rows(const std::vector<Index>& rows) const;

 private:
  Matrix features_;
  Vector target_;
  std::vector<std::string> names_;
  double base_rate_ = 0.0;
};

struct CorrelationBlock {
  std::vector<Index> features;
  double rho = 0.0;
};

struct InteractionTerm {
  Index first = 0;
  Index second = 0;
  double strength = 0.0;
};

/// Recipe for a synthetic dataset with planted log-odds coefficients.
/// Signal features come first (one per weight), followed by noise features.
struct SyntheticSpec {
  Index n_samples = 2000;
  std::vector<double> signal_weights;
  Index noise_features = 0;
  std::vector<CorrelationBlock> correlation_blocks;
  std::vector<InteractionTerm> interaction_pairs;
  double intercept = 0.0;
  std::uint64_t seed = 0;

  Index n_features() const {
    return static_cast<Index>(signal_weights.size()) + noise_features;
  }
  /// Throws InvalidArgument on a violated invariant.
  void validate() const;
};

/// Weights halving from `first`: first, first/2, first/4, ...
std::vector<double> pareto_weights(Index count, double first = 4.0);

struct SyntheticData {
  Dataset data;
  Vector true_weights;  // one per feature, zero for noise features
};

struct CorrelationSummary {
  Matrix rho;
  double avg_feature_corr = 0.0;
  double avg_target_corr = 0.0;
};

struct FeaturePair {
  std::string first;
  std::string second;
  double rho = 0.0;
};

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column);
void write_csv(const Dataset& data, const std::filesystem::path& path,
               const std::string& target_column = "target");

/// Stratified split; returns (train, test).
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed);

/// Row indices of the stratified split, (train, test), each sorted ascending.
std::pair<std::vector<Index>, std::vector<Index>> split_indices(const Dataset& data,
                                                                double test_fraction,
                                                                std::uint64_t seed);

inline constexpr int kMaxBootstrapAttempts = 1000;

/// Rows drawn with replacement, redrawn until both classes are present.
Dataset bootstrap(const Dataset& data, std::uint64_t seed);
std::vector<Index> bootstrap_indices(const Dataset& data, std::uint64_t seed);

CorrelationSummary correlation_summary(const Dataset& data);

/// Pairs of distinct features with |rho| >= threshold, in row-major order of
/// the upper triangle.
std::vector<FeaturePair> correlated_pairs(const Dataset& data, double threshold);

SyntheticData generate(const SyntheticSpec& spec);

/// Column projection in the given order.
Dataset subset(const Dataset& data, const std::vector<std::string>& names);

}  // namespace rankbench

#endif  // RANKBENCH_DATASET_HPP
