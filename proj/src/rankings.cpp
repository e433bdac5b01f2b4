#include "rankbench/rankings.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "rankbench/effects.hpp"
#include "rankbench/stats.hpp"

namespace rankbench {

std::vector<int> ranks_from_scores(const Vector& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores(a) > scores(b); });
  std::vector<int> ranks(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[static_cast<std::size_t>(order[r])] = static_cast<int>(r + 1);
  return ranks;
}

RankingScorecard make_scorecard(std::string method, std::vector<std::string> feature_names, Vector scores,
                                ScoreKind kind, int n_repeats, std::uint64_t seed) {
  if (static_cast<Index>(feature_names.size()) != scores.size()) {
    throw InvalidArgument("scorecard: one score per feature required");
  }
  RankingScorecard card;
  card.method = std::move(method);
  card.feature_names = std::move(feature_names);
  card.ranks = ranks_from_scores(scores);
  card.scores = std::move(scores);
  card.kind = kind;
  card.n_repeats = n_repeats;
  card.seed = seed;
  return card;
}

RankingScorecard coefficient_ranking(const Predictor& p) {
  return make_scorecard("coefficients", p.feature_names(), coefficients(p).cwiseAbs(), ScoreKind::kRelevance);
}

RankingScorecard gini_ranking(const Predictor& p) {
  return make_scorecard("gini", p.feature_names(), gini_importance(p), ScoreKind::kImportance);
}

RankingScorecard tree_path_ranking(const Predictor& p, const Dataset& data) {
  const auto attribution = tree_path_attribution(p, data.features());
  return make_scorecard("tree_interpreter", p.feature_names(),
                        attribution.contributions.cwiseAbs().colwise().mean().transpose(), ScoreKind::kRelevance);
}

RankingScorecard ale_variance_ranking(const PredictFn& f, const Dataset& data, int n_bins) {
  return make_scorecard("ale_variance", data.feature_names(), ale_variance_scores(f, data, n_bins),
                        ScoreKind::kRelevance);
}

AggregatedRanking aggregate(std::span<const RankingScorecard> cards) {
  if (cards.size() < 2) throw InvalidArgument("aggregate: need at least two scorecards");
  const auto& names = cards.front().feature_names;
  const auto p = static_cast<Index>(names.size());
  AggregatedRanking agg;
  agg.feature_names = names;
  agg.ranks.resize(p, static_cast<Index>(cards.size()));
  for (std::size_t m = 0; m < cards.size(); ++m) {
    if (cards[m].feature_names != names) {
      throw InvalidArgument("aggregate: scorecard '" + cards[m].method + "' covers a different feature set");
    }
    agg.methods.push_back(cards[m].method);
    for (Index j = 0; j < p; ++j) agg.ranks(j, static_cast<Index>(m)) = cards[m].ranks[static_cast<std::size_t>(j)];
  }
  agg.median.resize(p);
  agg.iqr.resize(p);
  for (Index j = 0; j < p; ++j) {
    agg.median(j) = stats::median(agg.ranks.row(j));
    agg.iqr(j) = stats::iqr(agg.ranks.row(j));
  }
  return agg;
}

double rank_uncertainty(const AggregatedRanking& agg, int top_k) {
  const Index p = agg.median.size();
  if (top_k < 1 || top_k > p) throw InvalidArgument("rank_uncertainty: top_k must lie in [1, P]");
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return agg.median(a) < agg.median(b); });
  double weighted = 0.0;
  double median_sum = 0.0;
  for (int k = 0; k < top_k; ++k) {
    const Index j = order[static_cast<std::size_t>(k)];
    if (agg.median(j) <= 0.0) throw InvalidArgument("rank_uncertainty: median rank must be positive");
    weighted += agg.iqr(j) / agg.median(j);
    median_sum += agg.median(j);
  }
  return weighted / median_sum;
}

double uncertainty_ratio(std::span<const RankingScorecard> cards, const std::vector<std::string>& top3,
                         int top_k) {
  const std::size_t m = cards.size();
  if (m < 4) throw InvalidArgument("uncertainty_ratio: need at least four methods");
  if (top3.size() != 3 || std::set<std::string>(top3.begin(), top3.end()).size() != 3) {
    throw InvalidArgument("uncertainty_ratio: exactly three distinct methods must be named");
  }
  auto find = [&](const std::string& name) {
    for (std::size_t i = 0; i < m; ++i)
      if (cards[i].method == name) return i;
    throw InvalidArgument("uncertainty_ratio: method '" + name + "' not among the scorecards");
  };
  auto triple = [&](std::size_t a, std::size_t b, std::size_t c) {
    const std::vector<RankingScorecard> chosen{cards[a], cards[b], cards[c]};
    return rank_uncertainty(aggregate(chosen), top_k);
  };
  const double numerator = triple(find(top3[0]), find(top3[1]), find(top3[2]));
  double total = 0.0;
  int combos = 0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        total += triple(a, b, c);
        ++combos;
      }
  const double denominator = total / combos;
  if (denominator == 0.0) {
    throw Error("uncertainty_ratio: every method combination agrees exactly (zero expected uncertainty)");
  }
  return numerator / denominator;
}

const std::vector<std::string>& ranking_methods() {
  static const std::vector<std::string> methods{"bmp",  "bsp",  "fmp",          "fsp",  "ale_variance",    "shap",
                                                "sage", "lime", "coefficients", "gini", "tree_interpreter"};
  return methods;
}

RankingScorecard compute_ranking(const std::string& method, const Predictor& model, const Dataset& data,
                                 const RankingOptions& o) {
  const PredictFn f = model.as_function();
  if (method == "bsp")
    return permutation_importance(f, data, o.metric, Direction::kBackward, Pass::kSingle, o.n_permute, o.seed);
  if (method == "bmp")
    return permutation_importance(f, data, o.metric, Direction::kBackward, Pass::kMulti, o.n_permute_multipass,
                                  o.seed);
  if (method == "fsp")
    return permutation_importance(f, data, o.metric, Direction::kForward, Pass::kSingle, o.n_permute, o.seed);
  if (method == "fmp")
    return permutation_importance(f, data, o.metric, Direction::kForward, Pass::kMulti, o.n_permute_multipass,
                                  o.seed);
  if (method == "ale_variance") return ale_variance_ranking(f, data, o.ale_bins);
  if (method == "shap")
    return shapley_relevance(f, data, o.shap_samples, o.seed, o.shap_instances, o.background_size);
  if (method == "sage") return sage_importance(f, data, o.sage_loss, o.sage_samples, o.seed, o.background_size);
  if (method == "lime")
    return lime_relevance(f, data, o.lime_perturb, o.lime_kernel_width, o.seed, o.lime_instances);
  if (method == "coefficients") return coefficient_ranking(model);
  if (method == "gini") return gini_ranking(model);
  if (method == "tree_interpreter") return tree_path_ranking(model, data);
  std::string valid;
  for (const auto& m : ranking_methods()) valid += (valid.empty() ? "" : ", ") + m;
  throw InvalidArgument("unknown ranking method '" + method + "' (valid: " + valid + ")");
}

}  // namespace rankbench
