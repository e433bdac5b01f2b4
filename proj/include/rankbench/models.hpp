#ifndef RANKBENCH_MODELS_HPP
#define RANKBENCH_MODELS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rankbench/common.hpp"
#include "rankbench/dataset.hpp"

namespace rankbench {

/// Elastic-net logistic regression settings. `C` follows the scikit-learn
/// convention: it scales the summed log-loss, so the per-example penalty
/// weight is 1 / (C * n).
struct LogRegConfig {
  double C = 1.0;
  double l1_ratio = 0.0;
  int max_iter = 1000;
  double tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;

  // Reduced-feature-set hyperparameters for the severe weather models.
  static LogRegConfig tornado() { return {0.1, 0.0001}; }
  static LogRegConfig severe_hail() { return {0.01, 0.01}; }
  static LogRegConfig severe_wind() { return {0.01, 0.001}; }
};

enum class ClassWeight { kNone, kBalanced };

struct ForestConfig {
  int n_trees = 500;
  int max_depth = 20;
  int max_features = 5;
  int min_samples_leaf = 5;
  int min_samples_split = 8;
  std::string criterion = "entropy";
  ClassWeight class_weight = ClassWeight::kBalanced;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;

  // Reduced-feature-set hyperparameters for the road surface model.
  static ForestConfig road_surface() { return {}; }
};

using ModelConfig = std::variant<LogRegConfig, ForestConfig>;

enum class ModelKind { kLogReg, kForest };

struct LogisticModel {
  Vector mean;           // per-feature standardization
  Vector scale;
  Vector coefficients;   // standardized space
  double intercept = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Flat array tree. Internal nodes have left/right >= 0; leaves have -1.
/// `value` is the weighted class-1 fraction at the node, `weight` its
/// weighted sample mass, `impurity` its entropy in bits.
struct DecisionTree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;
  std::vector<double> weight;
  std::vector<double> impurity;

  std::size_t size() const { return feature.size(); }
  bool is_leaf(std::size_t node) const { return left[node] < 0; }
  /// Index of the leaf reached by a row.
  template <typename Row>
  std::size_t leaf_for(const Row& x) const {
    std::size_t node = 0;
    while (!is_leaf(node)) {
      node = static_cast<std::size_t>(x(feature[node]) <= threshold[node] ? left[node] : right[node]);
    }
    return node;
  }
};

struct ForestModel {
  std::vector<DecisionTree> trees;
};

/// A fitted classifier bound to the feature names it was trained on.
/// Copies share the (immutable) fitted parameters.
class Predictor {
 public:
  Predictor(LogisticModel model, std::vector<std::string> feature_names);
  Predictor(ForestModel model, std::vector<std::string> feature_names);

  ModelKind kind() const;
  const std::vector<std::string>& feature_names() const { return names_; }
  Index n_features() const { return static_cast<Index>(names_.size()); }

  Vector predict(const Matrix& x) const;
  PredictFn as_function() const;

  const LogisticModel& logreg() const;
  const ForestModel& forest() const;

 private:
  std::shared_ptr<const std::variant<LogisticModel, ForestModel>> model_;
  std::vector<std::string> names_;
};

Predictor fit_logreg(const Dataset& train, const LogRegConfig& cfg);
Predictor fit_forest(const Dataset& train, const ForestConfig& cfg);
Predictor fit(const Dataset& train, const ModelConfig& cfg);

/// Fits on a feature subset; forest max_features is capped at the subset's
/// feature count so that Table A1 settings remain usable on small subsets.
Predictor fit_subset_model(const Dataset& train, const ModelConfig& cfg);

/// Row-wise probabilities; throws on a column-count mismatch.
Vector predict(const Predictor& p, const Matrix& x);

/// Penalized objective of a fitted logistic model on `data` (standardized
/// with the model's own parameters), under `cfg`'s penalty.
double elastic_net_objective(const LogisticModel& model, const Dataset& data, const LogRegConfig& cfg);

/// Standardized-space coefficients, intercept excluded.
Vector coefficients(const Predictor& p);

/// Mean-over-trees entropy decrease per feature, normalized to sum 1.
Vector gini_importance(const Predictor& p);

struct PathAttribution {
  Matrix contributions;  // rows x features
  Vector bias;           // per row; identical across rows
};

/// Decomposes each forest prediction into root value plus per-split changes
/// credited to the split feature: bias + row sum == predict, exactly.
PathAttribution tree_path_attribution(const Predictor& p, const Matrix& x);

}  // namespace rankbench

#endif  // RANKBENCH_MODELS_HPP
