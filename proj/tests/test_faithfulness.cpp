#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rankbench/faithfulness.hpp"
#include "rankbench/stats.hpp"

using namespace rankbench;

namespace {

SyntheticData pareto_data(Index p, Index n, std::uint64_t seed, Index noise = 0) {
  SyntheticSpec spec;
  spec.n_samples = n;
  spec.signal_weights = pareto_weights(p);
  spec.noise_features = noise;
  spec.intercept = -1.0;
  spec.seed = seed;
  return generate(spec);
}

RankingScorecard oracle_card(const SyntheticData& s) {
  return make_scorecard("oracle", s.data.feature_names(), s.true_weights.cwiseAbs(), ScoreKind::kImportance);
}

RankingScorecard random_card(const Dataset& d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Vector s(d.cols());
  for (Index j = 0; j < s.size(); ++j) s(j) = nd(gen);
  return make_scorecard("random", d.feature_names(), s, ScoreKind::kImportance);
}

RankingScorecard flat_card(const Dataset& d) {
  return make_scorecard("flat", d.feature_names(), Vector::Constant(d.cols(), 0.7), ScoreKind::kImportance);
}

ModelConfig logreg() {
  LogRegConfig c;
  c.C = 1.0;
  return c;
}

ExperimentOptions options(int n_subsets, std::uint64_t seed) {
  ExperimentOptions o;
  o.n_subsets = n_subsets;
  o.n_boot = 20;
  o.seed = seed;
  return o;
}

double spearman(const Vector& x, const Vector& y) {
  return stats::pearson(stats::average_ranks(x), stats::average_ranks(y));
}

}  // namespace

TEST(MinMax, RangeAndConstantConvention) {
  const Vector v = (Vector(5) << 3.0, -1.0, 7.0, 2.0, 7.0).finished();
  const Vector s = min_max_scale(v);
  EXPECT_DOUBLE_EQ(s.minCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(s.maxCoeff(), 1.0);
  EXPECT_DOUBLE_EQ(s(0), 0.5);
  for (Index a = 0; a < 5; ++a)
    for (Index b = 0; b < 5; ++b)
      if (v(a) < v(b)) EXPECT_LT(s(a), s(b));
  EXPECT_EQ(min_max_scale(Vector::Constant(4, 2.5)), Vector::Constant(4, 0.5));
}

TEST(TotalImportance, SumsNamedScoresMonotonically) {
  const auto s = pareto_data(5, 200, 1);
  const auto card = oracle_card(s);
  std::vector<std::string> chosen;
  double previous = 0.0;
  for (const auto& name : {"x3", "x0", "x4", "x1"}) {
    chosen.push_back(name);
    const double t = total_importance(card, chosen);
    EXPECT_GE(t, previous);
    previous = t;
  }
  EXPECT_DOUBLE_EQ(total_importance(card, {"x0", "x1"}), 4.0 + 2.0);
  EXPECT_THROW(total_importance(card, {"y"}), InvalidArgument);
}

TEST(NamesByRank, OrdersBestFirst) {
  const auto card =
      make_scorecard("m", {"a", "b", "c", "d"}, (Vector(4) << 0.1, 0.9, 0.5, 0.9).finished(), ScoreKind::kImportance);
  EXPECT_EQ(names_by_rank(card), (std::vector<std::string>{"b", "d", "c", "a"}));
}

TEST(Experiment, RecordInvariantsAndReproducibility) {
  const auto s = pareto_data(6, 800, 2);
  const std::vector<RankingScorecard> cards{oracle_card(s), random_card(s.data, 3), flat_card(s.data)};
  const auto report = run_experiment(s.data, logreg(), cards, options(120, 4));
  ASSERT_EQ(report.records.size(), 120u);
  ASSERT_EQ(report.fit_stats.size(), 3u);
  EXPECT_EQ(report.methods, (std::vector<std::string>{"oracle", "random", "flat"}));
  for (const auto& fs : report.fit_stats) EXPECT_EQ(fs.n, 120);
  std::set<int> sizes;
  for (const auto& r : report.records) {
    EXPECT_GE(r.subset_size, 1);
    EXPECT_LE(r.subset_size, 5);
    EXPECT_EQ(static_cast<int>(r.subset.size()), r.subset_size);
    EXPECT_EQ(std::set<std::string>(r.subset.begin(), r.subset.end()).size(), r.subset.size());
    for (std::size_t c = 0; c < cards.size(); ++c) {
      EXPECT_NEAR(r.raw_total(static_cast<Index>(c)), total_importance(cards[c], r.subset), 1e-12);
    }
    EXPECT_TRUE(std::isfinite(r.performance));
    sizes.insert(r.subset_size);
  }
  EXPECT_EQ(sizes.size(), 5u);
  for (Index c = 0; c < 3; ++c) {
    double lo = 1.0, hi = 0.0;
    for (const auto& r : report.records) {
      lo = std::min(lo, r.scaled_total(c));
      hi = std::max(hi, r.scaled_total(c));
    }
    EXPECT_DOUBLE_EQ(lo, 0.0);
    EXPECT_DOUBLE_EQ(hi, 1.0);
  }

  const auto again = run_experiment(s.data, logreg(), cards, options(120, 4));
  for (std::size_t r = 0; r < report.records.size(); ++r) {
    EXPECT_EQ(again.records[r].subset, report.records[r].subset);
    EXPECT_EQ(again.records[r].performance, report.records[r].performance);
  }
  EXPECT_EQ(again.fit_stats[0].r2, report.fit_stats[0].r2);
  EXPECT_EQ(again.fit_stats[1].kendall_tau, report.fit_stats[1].kendall_tau);
}

TEST(Experiment, FlatCardTracksSubsetSize) {
  const auto s = pareto_data(6, 800, 5);
  const std::vector<RankingScorecard> cards{flat_card(s.data)};
  const auto report = run_experiment(s.data, logreg(), cards, options(150, 6));
  Vector size(150), perf(150), scaled(150);
  for (Index r = 0; r < 150; ++r) {
    const auto& rec = report.records[static_cast<std::size_t>(r)];
    size(r) = rec.subset_size;
    perf(r) = rec.performance;
    scaled(r) = rec.scaled_total(0);
    EXPECT_NEAR(scaled(r), (rec.subset_size - 1) / 4.0, 1e-12);
  }
  EXPECT_NEAR(association_point(scaled, perf).kendall_tau, oracle::kendall(size, perf), 1e-12);
  EXPECT_NEAR(report.fit_stats[0].kendall_tau, oracle::kendall(size, perf), 0.05);
}

TEST(Experiment, OracleCardBeatsRandomCard) {
  const auto s = pareto_data(8, 1500, 7);
  const std::vector<RankingScorecard> cards{oracle_card(s), random_card(s.data, 8)};
  const auto report = run_experiment(s.data, logreg(), cards, options(300, 9));
  EXPECT_GE(report.fit_stats[0].r2, report.fit_stats[1].r2 + 0.3);
  EXPECT_GE(report.fit_stats[0].kendall_tau, report.fit_stats[1].kendall_tau + 0.2);
}

TEST(Experiment, RandomCardHasNoRankCorrelationOnAverage) {
  const auto s = pareto_data(6, 800, 10);
  double mean_tau = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::vector<RankingScorecard> cards{random_card(s.data, 20 + seed)};
    mean_tau += run_experiment(s.data, logreg(), cards, options(150, 30 + seed)).fit_stats[0].kendall_tau / 5.0;
  }
  EXPECT_LT(std::abs(mean_tau), 0.1);
}

TEST(Experiment, Errors) {
  const auto s = pareto_data(6, 300, 11);
  const std::vector<RankingScorecard> cards{oracle_card(s)};
  EXPECT_THROW(run_experiment(s.data, logreg(), cards, options(0, 1)), InvalidArgument);
  const std::vector<RankingScorecard> none;
  EXPECT_THROW(run_experiment(s.data, logreg(), none, options(10, 1)), InvalidArgument);
  const auto small = subset(s.data, {"x0", "x1"});
  const std::vector<RankingScorecard> small_cards{flat_card(small)};
  EXPECT_THROW(run_experiment(small, logreg(), small_cards, options(10, 1)), InvalidArgument);
  EXPECT_THROW(run_experiment(small, logreg(), cards, options(10, 1)), InvalidArgument);
}

TEST(Pareto, AggregatesBySizeAndRises) {
  const auto s = pareto_data(6, 1000, 12);
  const std::vector<RankingScorecard> cards{oracle_card(s)};
  const auto report = run_experiment(s.data, logreg(), cards, options(200, 13));
  const auto curve = pareto_curve(report);
  ASSERT_EQ(curve.size(), 5u);
  int total = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    EXPECT_EQ(curve[i].subset_size, static_cast<int>(i) + 1);
    total += curve[i].count;
    std::vector<double> v;
    for (const auto& r : report.records)
      if (r.subset_size == curve[i].subset_size) v.push_back(r.performance);
    double mean = 0.0;
    for (double x : v) mean += x / v.size();
    EXPECT_NEAR(curve[i].mean, mean, 1e-12);
    EXPECT_NEAR(curve[i].q10, oracle::quantile(v, 0.1), 1e-12);
    EXPECT_NEAR(curve[i].q90, oracle::quantile(v, 0.9), 1e-12);
  }
  EXPECT_EQ(total, 200);
  EXPECT_GT(curve.back().mean, curve.front().mean);

  FaithfulnessReport one;
  one.records.resize(3);
  for (int k = 0; k < 3; ++k) {
    one.records[static_cast<std::size_t>(k)].subset_size = 2;
    one.records[static_cast<std::size_t>(k)].performance = 0.1 * k;
  }
  const auto single = pareto_curve(one);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_DOUBLE_EQ(single[0].mean, 0.1);
}

TEST(TopBottom, FullSetGivesZeroAndOracleSeparates) {
  const auto s = pareto_data(6, 1000, 14);
  const auto card = oracle_card(s);
  const auto same = topk_bottomk(s.data, logreg(), card, 6, Metric::kNaupdc, 100, 1);
  EXPECT_EQ(same.delta, 0.0);
  EXPECT_EQ(same.ci.low, 0.0);
  EXPECT_EQ(same.ci.high, 0.0);

  const auto r = topk_bottomk(s.data, logreg(), card, 2, Metric::kNaupdc, 200, 2);
  EXPECT_EQ(r.top, (std::vector<std::string>{"x0", "x1"}));
  EXPECT_EQ(r.bottom, (std::vector<std::string>{"x4", "x5"}));
  EXPECT_GT(r.delta, 0.0);
  EXPECT_GT(r.ci.low, 0.0);
  EXPECT_LE(r.ci.low, r.delta);
  EXPECT_GE(r.ci.high, r.delta);
  EXPECT_THROW(topk_bottomk(s.data, logreg(), card, 7), InvalidArgument);
  EXPECT_THROW(topk_bottomk(s.data, logreg(), card, 0), InvalidArgument);
}

TEST(Incremental, FullPrefixMatchesAndOracleCurveRises) {
  const auto s = pareto_data(6, 1500, 15);
  const auto card = oracle_card(s);
  const auto curves = incremental_curves(s.data, logreg(), card, 6, Metric::kNaupdc, 3);
  ASSERT_EQ(curves.best.size(), 6);
  EXPECT_EQ(curves.best(5), curves.worst(5));
  EXPECT_GE(curves.best(0), curves.worst(0));
  EXPECT_GT(spearman(Vector::LinSpaced(6, 1, 6), curves.best), 0.8);
  EXPECT_THROW(incremental_curves(s.data, logreg(), card, 7), InvalidArgument);

  const auto other = make_scorecard("o", {"a", "b", "c", "d", "e", "f"}, Vector::Ones(6), ScoreKind::kImportance);
  EXPECT_THROW(incremental_curves(s.data, logreg(), other, 3), InvalidArgument);
}
