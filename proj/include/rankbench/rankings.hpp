#ifndef RANKBENCH_RANKINGS_HPP
#define RANKBENCH_RANKINGS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankbench/common.hpp"
#include "rankbench/dataset.hpp"
#include "rankbench/metrics.hpp"
#include "rankbench/models.hpp"

namespace rankbench {

/// Importance methods attribute model skill; relevance methods attribute the
/// prediction itself.
enum class ScoreKind { kImportance, kRelevance };

struct RankingScorecard {
  std::string method;
  std::vector<std::string> feature_names;
  Vector scores;           // higher = more important
  std::vector<int> ranks;  // 1 = most important
  ScoreKind kind = ScoreKind::kImportance;
  int n_repeats = 0;
  std::uint64_t seed = 0;
};

/// Ranks by descending score; equal scores keep feature order.
std::vector<int> ranks_from_scores(const Vector& scores);

RankingScorecard make_scorecard(std::string method, std::vector<std::string> feature_names, Vector scores,
                                ScoreKind kind, int n_repeats = 0, std::uint64_t seed = 0);

enum class Direction { kBackward, kForward };
enum class Pass { kSingle, kMulti };

inline constexpr int kDefaultSinglePassRepeats = 30;
inline constexpr int kDefaultMultiPassRepeats = 10;
inline constexpr int kDefaultBackgroundSize = 100;

/// Permutation importance in its four variants.
///
/// Repeat r shuffles a feature's column with a permutation that depends only
/// on (seed, r, feature name), so single- and multi-pass runs with the same seed and repeat
/// count see identical draws and agree on the first selected feature.
/// Multi-pass ranks follow the greedy selection order; the score of a feature
/// is the metric change at the round it was selected.
RankingScorecard permutation_importance(const PredictFn& f, const Dataset& data, Metric metric,
                                        Direction direction, Pass pass, int n_permute, std::uint64_t seed);

/// Per-instance interventional Shapley values by permutation sampling.
/// Each sampled ordering (paired with its reverse) adds features one at a
/// time; absent features take background values and the coalition value is
/// the mean prediction over the background rows. Rows of the result sum to
/// f(x) - mean f(background) exactly.
Matrix shapley_values(const PredictFn& f, const Matrix& instances, const Matrix& background, int n_samples,
                      std::uint64_t seed);

/// Mean |Shapley value| over up to `n_instances` sampled rows.
RankingScorecard shapley_relevance(const PredictFn& f, const Dataset& data, int n_samples, std::uint64_t seed,
                                   int n_instances = 100, int background_size = kDefaultBackgroundSize);

enum class SageLoss { kCrossEntropy, kSquaredError };
SageLoss parse_sage_loss(const std::string& name);

/// Shapley decomposition of the reduction in expected loss. Each sample draws
/// one evaluation row and one ordering; revealing a feature replaces its
/// background values with the row's value.
Vector sage_values(const PredictFn& f, const Matrix& x, const Vector& y, const Matrix& background, SageLoss loss,
                   int n_samples, std::uint64_t seed);

RankingScorecard sage_importance(const PredictFn& f, const Dataset& data, const std::string& loss, int n_samples,
                                 std::uint64_t seed, int background_size = kDefaultBackgroundSize);

/// Weighted ridge surrogate around one instance; returns the per-feature
/// slopes in the feature's own units.
Vector lime_explain(const PredictFn& f, const Eigen::Ref<const Vector>& instance, const Vector& feature_sd,
                    int n_perturb, double kernel_width, Rng& rng);

/// Mean |surrogate slope| over up to `n_instances` sampled rows. A
/// non-positive kernel width selects the default 0.75 * sqrt(P).
RankingScorecard lime_relevance(const PredictFn& f, const Dataset& data, int n_perturb, double kernel_width,
                                std::uint64_t seed, int n_instances = 50);

RankingScorecard coefficient_ranking(const Predictor& p);
RankingScorecard gini_ranking(const Predictor& p);
RankingScorecard tree_path_ranking(const Predictor& p, const Dataset& data);
RankingScorecard ale_variance_ranking(const PredictFn& f, const Dataset& data, int n_bins = 30);

struct AggregatedRanking {
  std::vector<std::string> feature_names;
  std::vector<std::string> methods;
  Eigen::MatrixXd ranks;  // features x methods
  Vector median;
  Vector iqr;
};

AggregatedRanking aggregate(std::span<const RankingScorecard> cards);

/// Median-weighted rank uncertainty over the top_k features by median rank:
/// (sum IQR_j / median_j) / (sum median_j).
double rank_uncertainty(const AggregatedRanking& agg, int top_k = 10);

/// Rank uncertainty of the three named methods divided by the mean over all
/// three-method combinations.
double uncertainty_ratio(std::span<const RankingScorecard> cards, const std::vector<std::string>& top3,
                         int top_k = 10);

/// Settings for computing any ranking method by name.
struct RankingOptions {
  Metric metric = Metric::kNaupdc;
  int n_permute = kDefaultSinglePassRepeats;
  int n_permute_multipass = kDefaultMultiPassRepeats;
  int shap_samples = 64;
  int shap_instances = 100;
  int sage_samples = 512;
  std::string sage_loss = "cross_entropy";
  int lime_perturb = 500;
  int lime_instances = 50;
  double lime_kernel_width = 0.0;
  int background_size = kDefaultBackgroundSize;
  int ale_bins = 30;
  std::uint64_t seed = 0;
};

/// Valid method names, in canonical order.
const std::vector<std::string>& ranking_methods();

/// Computes one method's scorecard; model-specific methods require the
/// matching model kind.
RankingScorecard compute_ranking(const std::string& method, const Predictor& model, const Dataset& data,
                                 const RankingOptions& options);

}  // namespace rankbench

#endif  // RANKBENCH_RANKINGS_HPP
