#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rankbench/metrics.hpp"
#include "rankbench/stats.hpp"

using namespace rankbench;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Labels drawn from the forecast probabilities, so the forecasts are calibrated.
std::pair<Vector, Vector> calibrated(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector y(n), p(n);
  for (Index i = 0; i < n; ++i) {
    p(i) = uniform01(rng);
    y(i) = uniform01(rng) < p(i) ? 1.0 : 0.0;
  }
  return {y, p};
}

// Probabilities on a 0.02 grid so thresholds hit exact ties.
std::pair<Vector, Vector> gridded(Index n, std::uint64_t seed) {
  auto [y, p] = calibrated(n, seed);
  for (Index i = 0; i < n; ++i) p(i) = std::round(p(i) * 50.0) / 50.0;
  return {y, p};
}

}  // namespace

TEST(Auc, UnitCases) {
  const Vector y = vec({0, 0, 1, 1});
  EXPECT_DOUBLE_EQ(roc_auc(y, vec({0.1, 0.2, 0.8, 0.9})), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(y, vec({0.3, 0.3, 0.3, 0.3})), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc(y, vec({0.1, 0.4, 0.35, 0.8})), 0.75);
  EXPECT_DOUBLE_EQ(oracle::auc(y, vec({0.1, 0.4, 0.35, 0.8})), 0.75);
}

TEST(Auc, MatchesPairwiseOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [y, p] = gridded(300, seed);
    EXPECT_NEAR(roc_auc(y, p), oracle::auc(y, p), 1e-12);
  }
}

TEST(Auc, ComplementAndMonotoneInvariance) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [y, p] = gridded(200, seed);
    const Vector q = Vector::Ones(p.size()) - p;
    EXPECT_NEAR(roc_auc(y, p) + roc_auc(y, q), 1.0, 1e-12);
    const Vector cubed = p.array().cube();
    const Vector expd = p.array().exp();
    EXPECT_NEAR(roc_auc(y, cubed), roc_auc(y, p), 1e-12);
    EXPECT_NEAR(roc_auc(y, expd), roc_auc(y, p), 1e-12);
  }
}

TEST(Bss, UnitCases) {
  const Vector y = vec({0, 1});
  EXPECT_DOUBLE_EQ(brier_skill_score(y, vec({0, 1})), 1.0);
  EXPECT_DOUBLE_EQ(brier_skill_score(y, vec({0.5, 0.5})), 0.0);
  EXPECT_NEAR(brier_skill_score(y, vec({0.2, 0.6})), 0.6, 1e-12);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [yy, p] = calibrated(100, seed);
    EXPECT_NEAR(brier_skill_score(yy, p), oracle::brier_skill(yy, p), 1e-12);
  }
}

TEST(PerformanceCurve, Endpoints) {
  const auto [y, p] = calibrated(500, 3);
  const auto d = performance_curve(y, p);
  ASSERT_EQ(d.thresholds.size(), kDefaultThresholds);
  // Descending thresholds: the first is 1, the last 0.
  EXPECT_DOUBLE_EQ(d.thresholds(0), 1.0);
  EXPECT_DOUBLE_EQ(d.thresholds(kDefaultThresholds - 1), 0.0);
  EXPECT_DOUBLE_EQ(d.pod(kDefaultThresholds - 1), 1.0);
  EXPECT_NEAR(d.sr(kDefaultThresholds - 1), y.mean(), 1e-12);
  EXPECT_DOUBLE_EQ(d.pod(0), 0.0);
  EXPECT_DOUBLE_EQ(d.sr(0), 0.0);
}

TEST(PerformanceCurve, MatchesContingencyEnumeration) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [y, p] = gridded(40, seed);
    const auto d = performance_curve(y, p, 21);
    const auto t = oracle::thresholds(21);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto c = oracle::contingency(y, p, t[k]);
      const auto i = static_cast<Index>(k);
      EXPECT_NEAR(d.pod(i), c.hits / (c.hits + c.misses), 1e-12);
      const double sr = c.hits + c.false_alarms > 0 ? c.hits / (c.hits + c.false_alarms) : 0.0;
      EXPECT_NEAR(d.sr(i), sr, 1e-12);
      EXPECT_LE(d.csi(i), std::min(d.pod(i), d.sr(i)) + 1e-12);
    }
  }
}

TEST(Naupdc, PerfectAndSeparable) {
  EXPECT_DOUBLE_EQ(naupdc(vec({0, 1, 0, 1}), vec({0, 1, 0, 1})), 1.0);
  const Vector y = vec({0, 1, 0, 1});
  const Vector p = vec({0.1, 0.9, 0.2, 0.8});
  EXPECT_NEAR(naupdc(y, p), oracle::naupdc(y, p), 1e-12);
  EXPECT_NEAR(naupdc(y, p), 1.0, 1e-12);
}

TEST(Naupdc, MatchesEnumerationOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [y, p] = gridded(150, seed);
    EXPECT_NEAR(naupdc(y, p), oracle::naupdc(y, p), 1e-12);
    EXPECT_LE(naupdc(y, p), 1.0 + 1e-12);
  }
}

TEST(Naupdc, RandomForecastsNearZero) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Index n = 20000;
    Vector y(n), p(n);
    for (Index i = 0; i < n; ++i) {
      y(i) = uniform01(rng) < 0.3 ? 1.0 : 0.0;
      p(i) = uniform01(rng);
    }
    const double v = naupdc(y, p);
    EXPECT_NEAR(v, 0.0, 0.05);
    total += v;
  }
  EXPECT_NEAR(total / 20.0, 0.0, 0.02);
}

TEST(Ncsi, UnitCases) {
  EXPECT_DOUBLE_EQ(ncsi(vec({0, 1, 0, 1}), vec({0, 1, 0, 1})), 1.0);
  EXPECT_NEAR(ncsi(vec({0, 1, 0, 0}), vec({0.25, 0.25, 0.25, 0.25})), 0.0, 1e-12);
  const Vector y = vec({0, 1, 1, 0, 1, 0});
  const Vector p = vec({0.1, 0.7, 0.4, 0.5, 0.9, 0.2});
  EXPECT_NEAR(ncsi(y, p), oracle::ncsi(y, p), 1e-12);
}

TEST(Ncsi, MatchesEnumerationAndIsBounded) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [y, p] = gridded(120, seed);
    EXPECT_NEAR(ncsi(y, p), oracle::ncsi(y, p), 1e-12);
    EXPECT_LE(ncsi(y, p), 1.0);
  }
  // Equal to 1 only for a perfect table.
  const Vector y = vec({0, 1, 1, 0});
  EXPECT_LT(ncsi(y, vec({0.1, 0.9, 0.4, 0.6})), 1.0);
}

TEST(Metrics, ClimatologyAndPerfect) {
  const auto [y, p] = calibrated(400, 9);
  const Vector clim = Vector::Constant(y.size(), y.mean());
  EXPECT_NEAR(brier_skill_score(y, clim), 0.0, 1e-12);
  EXPECT_NEAR(ncsi(y, clim), 0.0, 1e-12);
  EXPECT_NEAR(naupdc(y, clim), 0.0, 0.02);
  for (Metric m : {Metric::kAuc, Metric::kBss, Metric::kNaupdc, Metric::kNcsi}) {
    EXPECT_DOUBLE_EQ(evaluate(m, y, y), 1.0) << metric_name(m);
  }
}

TEST(Metrics, RejectsBadInput) {
  EXPECT_THROW(roc_auc(vec({0, 0}), vec({0.1, 0.2})), InvalidArgument);
  EXPECT_THROW(roc_auc(vec({0, 1}), vec({0.1})), InvalidArgument);
  EXPECT_THROW(parse_metric("accuracy"), InvalidArgument);
  EXPECT_EQ(parse_metric("ncsi"), Metric::kNcsi);
}

TEST(Kendall, MatchesQuadraticOracleWithTies) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Index n = 60;
    Vector x(n), y(n);
    for (Index i = 0; i < n; ++i) {
      x(i) = static_cast<double>(uniform_index(rng, 8));
      y(i) = static_cast<double>(uniform_index(rng, 5)) + 0.1 * x(i);
    }
    EXPECT_NEAR(stats::kendall_tau_b(x, y), oracle::kendall(x, y), 1e-12);
  }
}

TEST(Association, IdentityAndReversal) {
  const Vector x = Vector::LinSpaced(30, 0.0, 1.0);
  const auto id = association_stats(x, x, 5, 50, 1);
  EXPECT_NEAR(id.kendall_tau, 1.0, 1e-12);
  EXPECT_NEAR(id.r2, 1.0, 1e-9);
  EXPECT_NEAR(id.mse, 0.0, 1e-12);
  const Vector rev = -x;
  EXPECT_NEAR(association_stats(x, rev, 5, 50, 1).kendall_tau, -1.0, 1e-12);
}

TEST(Association, SixPointTauMatchesOracle) {
  const Vector imp = vec({0.1, 0.4, 0.2, 0.9, 0.5, 0.7});
  const Vector perf = vec({0.2, 0.3, 0.5, 0.8, 0.6, 0.4});
  EXPECT_NEAR(association_point(imp, perf).kendall_tau, oracle::kendall(imp, perf), 1e-12);
  // In importance order the performances read .2 .5 .3 .6 .4 .8: 3 of 15 pairs discordant.
  EXPECT_NEAR(oracle::kendall(imp, perf), 9.0 / 15.0, 1e-12);
}

TEST(Association, TauInvariantUnderMonotoneTransforms) {
  Rng rng(4);
  Vector imp(80), perf(80);
  for (Index i = 0; i < 80; ++i) {
    imp(i) = uniform01(rng);
    perf(i) = imp(i) + 0.3 * uniform01(rng);
  }
  const double tau = association_point(imp, perf).kendall_tau;
  const Vector imp_cubed = imp.array().cube();
  const Vector perf_exp = perf.array().exp();
  EXPECT_NEAR(association_point(imp_cubed, perf_exp).kendall_tau, tau, 1e-12);
}

TEST(Association, R2NonDecreasingInDegree) {
  Rng rng(6);
  Vector imp(100), perf(100);
  for (Index i = 0; i < 100; ++i) {
    imp(i) = uniform01(rng);
    perf(i) = std::sin(3.0 * imp(i)) + 0.2 * standard_normal(rng);
  }
  double previous = -1.0;
  for (int degree = 1; degree <= 6; ++degree) {
    const double r2 = association_point(imp, perf, degree).r2;
    EXPECT_GE(r2, previous - 1e-12);
    previous = r2;
  }
}

TEST(BootstrapCi, ConstantHasZeroWidth) {
  const auto ci = bootstrap_ci(Vector::Constant(50, 3.0), 200, 0.95, 1);
  EXPECT_DOUBLE_EQ(ci.low, 3.0);
  EXPECT_DOUBLE_EQ(ci.high, 3.0);
}

TEST(BootstrapCi, NormalMeanWidth) {
  Rng rng(17);
  Vector s(1000);
  for (Index i = 0; i < s.size(); ++i) s(i) = standard_normal(rng);
  const auto ci = bootstrap_ci(s, 2000, 0.95, 3);
  const double half = 0.5 * (ci.high - ci.low);
  EXPECT_NEAR(half, 1.96 / std::sqrt(1000.0), 0.2 * 1.96 / std::sqrt(1000.0));
  const auto again = bootstrap_ci(s, 2000, 0.95, 3);
  EXPECT_EQ(ci.low, again.low);
  EXPECT_EQ(ci.high, again.high);
  EXPECT_THROW(bootstrap_ci(s, 100, 1.5, 3), InvalidArgument);
}
