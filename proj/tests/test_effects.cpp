#include <gtest/gtest.h>

#include "rankbench/effects.hpp"
#include "rankbench/stats.hpp"

using namespace rankbench;

namespace {

Dataset uniform_data(Index n, Index p, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Matrix x(n, p);
  for (Index i = 0; i < x.size(); ++i) x(i) = lo + (hi - lo) * uniform01(rng);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = i % 2;
  std::vector<std::string> names;
  for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  return Dataset(x, y, names);
}

PredictFn linear(Vector beta) {
  return [beta](const Matrix& x) -> Vector { return x * beta; };
}

PredictFn product01() {
  return [](const Matrix& x) -> Vector { return x.col(0).cwiseProduct(x.col(1)); };
}

AleCurve synthetic_curve(const Vector& values) {
  AleCurve c;
  c.feature = "f";
  const Index k = values.size();
  c.bin_centers = Vector::LinSpaced(k, 0.0, static_cast<double>(k - 1));
  c.values = values;
  c.bin_counts = Vector::Ones(k);
  c.variance = stats::variance(values);
  return c;
}

}  // namespace

TEST(Ale, LinearModelRecoversSlope) {
  const auto d = uniform_data(2000, 3, 1);
  const Vector beta = (Vector(3) << 2.0, -0.5, 0.0).finished();
  for (Index j = 0; j < 3; ++j) {
    const auto c = compute_ale(linear(beta), d, d.feature_names()[static_cast<std::size_t>(j)]);
    const Vector resid = c.values - beta(j) * c.bin_centers;
    EXPECT_LT(resid.maxCoeff() - resid.minCoeff(), 1e-9);
    // Edge values lie exactly on the line too.
    const Vector edge_resid = c.edge_values - beta(j) * c.bin_edges;
    EXPECT_LT(edge_resid.maxCoeff() - edge_resid.minCoeff(), 1e-9);
  }
  const auto zero = compute_ale(linear(beta), d, "x2");
  EXPECT_LT(zero.values.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ale, CenteredOverRows) {
  const auto d = uniform_data(1500, 2, 2);
  const auto f = [](const Matrix& x) -> Vector { return (x.col(0).array() * 3.0).tanh() + x.col(1).array().square(); };
  for (const auto& name : d.feature_names()) {
    const auto c = compute_ale(f, d, name);
    EXPECT_NEAR(c.interpolate(d.features().col(d.index_of(name))).mean(), 0.0, 1e-9);
    EXPECT_GT(c.variance, 0.0);
  }
}

TEST(Ale, ProductEffectsStayInsideMonteCarloBand) {
  // With independent zero-mean inputs, the main effect of x0 in x0*x1 is
  // zero; the estimate is a cumulative sum of per-bin means of x1.
  const auto d = uniform_data(20000, 2, 3);
  const auto c = compute_ale(product01(), d, "x0");
  const double var_x1 = 1.0 / 3.0;
  double band = 0.0;
  double cumulative = 0.0;
  for (Index b = 0; b + 1 < c.bin_edges.size(); ++b) {
    const double width = c.bin_edges(b + 1) - c.bin_edges(b);
    cumulative += width * width * var_x1 / c.bin_counts(b);
    band = std::max(band, std::sqrt(cumulative));
  }
  EXPECT_LT(c.values.cwiseAbs().maxCoeff(), 2.0 * 3.0 * band);
}

TEST(Ale, EmptyBinsAreMerged) {
  // Heavily tied column: quantile edges collapse.
  Matrix x(100, 1);
  Vector y(100);
  for (Index i = 0; i < 100; ++i) {
    x(i, 0) = i < 80 ? 0.0 : static_cast<double>(i);
    y(i) = i % 2;
  }
  const Dataset d(x, y, {"t"});
  const auto c = compute_ale(linear(Vector::Ones(1)), d, "t", 10);
  EXPECT_GT(c.bin_counts.minCoeff(), 0.0);
  EXPECT_EQ(c.bin_counts.sum(), 100.0);
}

TEST(Ale, RejectsConstantFeatureAndUnknownName) {
  Matrix x(4, 2);
  x << 1, 0, 2, 0, 3, 0, 4, 0;
  Vector y(4);
  y << 0, 1, 0, 1;
  const Dataset d(x, y, {"a", "flat"});
  EXPECT_THROW(compute_ale(linear(Vector::Ones(2)), d, "flat"), InvalidArgument);
  EXPECT_THROW(compute_ale(linear(Vector::Ones(2)), d, "nope"), InvalidArgument);
  const auto all = compute_all_ale(linear(Vector::Ones(2)), d, 2);
  EXPECT_EQ(all[1].values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FirstOrder, ZeroEffectsGiveMean) {
  const auto d = uniform_data(300, 2, 4);
  const std::vector<AleCurve> flat{AleCurve::flat("x0", 0.0), AleCurve::flat("x1", 0.0)};
  const Vector out = first_order_predict(flat, 0.7, d.features());
  EXPECT_EQ(out, Vector::Constant(300, 0.7));
  EXPECT_THROW(first_order_predict(std::span<const AleCurve>(flat).first(1), 0.7, d.features()), InvalidArgument);
}

TEST(FirstOrder, AdditiveModelReproduced) {
  const auto d = uniform_data(3000, 3, 5);
  const auto f = [](const Matrix& x) -> Vector {
    return 2.0 * x.col(0) + x.col(1).array().square().matrix() - 0.5 * x.col(2);
  };
  const auto curves = compute_all_ale(f, d, 40);
  const Vector pred = f(d.features());
  const Vector first = first_order_predict(curves, pred.mean(), d.features());
  // Linear terms are exact; the quadratic one is piecewise-linear within bins.
  EXPECT_LT((first - pred).cwiseAbs().maxCoeff(), 2e-3);
  const auto lin = compute_all_ale(linear((Vector(3) << 1, 2, 3).finished()), d, 30);
  const Vector lp = d.features() * Vector(Vector::LinSpaced(3, 1, 3));
  EXPECT_LT((first_order_predict(lin, lp.mean(), d.features()) - lp).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Ias, AdditiveIsZeroAndProductIsOne) {
  const auto d = uniform_data(5000, 5, 6);
  const Vector beta = (Vector(5) << 1, -2, 0.5, 3, 0.1).finished();
  EXPECT_LE(ias(linear(beta), d), 1e-6);
  // i.i.d. draws: the estimated main effects carry O(1/n) noise, so the
  // score scatters around 1 by a few 1e-4 and may sit slightly above it.
  const auto prod = uniform_data(20000, 2, 7);
  const double v = ias(product01(), prod);
  EXPECT_GE(v, 0.9);
  EXPECT_LE(v, 1.0 + 5e-3);
}

TEST(Ias, SignSymmetricDrawsGiveExactlyOneForProduct) {
  // Every (a, b) comes with (-a, b), (a, -b) and (-a, -b): per-bin means of
  // the other input vanish, so both main effects are zero.
  const auto base = uniform_data(2500, 2, 9);
  Matrix x(4 * base.rows(), 2);
  for (Index i = 0; i < base.rows(); ++i) {
    const double a = base.features()(i, 0), b = base.features()(i, 1);
    x.row(4 * i) << a, b;
    x.row(4 * i + 1) << -a, b;
    x.row(4 * i + 2) << a, -b;
    x.row(4 * i + 3) << -a, -b;
  }
  Vector y(x.rows());
  for (Index i = 0; i < y.size(); ++i) y(i) = i % 2;
  const Dataset d(x, y, {"x0", "x1"});
  EXPECT_NEAR(ias(product01(), d), 1.0, 1e-9);
}

TEST(Ias, NonNegativeAndRejectsConstantModel) {
  const auto d = uniform_data(500, 2, 8);
  const auto f = [](const Matrix& x) -> Vector {
    return (x.col(0).array() + 0.5 * x.col(0).array() * x.col(1).array()).matrix();
  };
  EXPECT_GE(ias(f, d), 0.0);
  const auto constant = [](const Matrix& x) -> Vector { return Vector::Constant(x.rows(), 0.3); };
  EXPECT_THROW(ias(constant, d), InvalidArgument);
}

TEST(Mec, LinearCurveIsOneSegment) {
  const auto c = synthetic_curve(Vector::LinSpaced(30, -1.0, 2.0));
  const auto r = mec_feature(c);
  EXPECT_EQ(r.segments, 1);
  EXPECT_TRUE(r.knots.empty());
}

TEST(Mec, HingeIsTwoSegmentsWithKnotAtHinge) {
  Vector v(30);
  for (Index i = 0; i < 30; ++i) v(i) = std::max(0.0, static_cast<double>(i) - 12.0);
  const auto r = mec_feature(synthetic_curve(v));
  EXPECT_EQ(r.segments, 2);
  ASSERT_EQ(r.knots.size(), 1u);
  EXPECT_NEAR(r.knots[0], 12.0, 1.0);
}

TEST(Mec, HingeFromModel) {
  const auto d = uniform_data(6000, 1, 9);
  const auto f = [](const Matrix& x) -> Vector { return (x.col(0).array() - 0.3).max(0.0).matrix(); };
  const auto c = compute_ale(f, d, "x0");
  const auto r = mec_feature(c);
  EXPECT_EQ(r.segments, 2);
  ASSERT_EQ(r.knots.size(), 1u);
  const double bin = (c.bin_edges.tail(1)(0) - c.bin_edges(0)) / static_cast<double>(c.bin_centers.size());
  EXPECT_NEAR(r.knots[0], 0.3, bin * 1.01);
}

TEST(Mec, SegmentCountBoundedAndReachesTolerance) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    Vector v(25);
    for (Index i = 0; i < 25; ++i) v(i) = standard_normal(rng);
    const auto c = synthetic_curve(v);
    const auto r = mec_feature(c, 0.05);
    EXPECT_GE(r.segments, 1);
    EXPECT_LE(r.segments, 25);
    EXPECT_EQ(r.knots.size(), static_cast<std::size_t>(r.segments - 1));
    EXPECT_TRUE(std::is_sorted(r.knots.begin(), r.knots.end()));
  }
}

TEST(Mec, VarianceWeightedAverage) {
  const auto line = synthetic_curve(Vector::LinSpaced(30, 0.0, 1.0));
  Vector hinge_v(30);
  for (Index i = 0; i < 30; ++i) hinge_v(i) = std::max(0.0, static_cast<double>(i) - 15.0);
  auto hinge = synthetic_curve(hinge_v);
  const auto flat = synthetic_curve(Vector::Zero(30));
  const std::vector<AleCurve> linear_only{line, line};
  EXPECT_DOUBLE_EQ(mec(linear_only), 1.0);
  // A dominant hinge among flat curves.
  const std::vector<AleCurve> dominant{hinge, flat, flat};
  EXPECT_DOUBLE_EQ(mec(dominant), 2.0);
  // Equal variance, one linear and one flat-rise-fall curve.
  Vector tent(30);
  for (Index i = 0; i < 30; ++i) tent(i) = i < 10 ? 0.0 : (i < 20 ? 3.0 * (i - 10) : 30.0 - 3.0 * (i - 20));
  auto three = synthetic_curve(tent);
  ASSERT_EQ(mec_feature(three).segments, 3);
  auto one = line;
  one.variance = three.variance;
  const std::vector<AleCurve> mixed{one, three};
  EXPECT_DOUBLE_EQ(mec(mixed), 2.0);
}

TEST(Complexity, AdditiveModelHasZeroInteraction) {
  const auto d = uniform_data(2000, 3, 11);
  const auto r = complexity_report(linear((Vector(3) << 1, 2, -1).finished()), d, 5, 3);
  EXPECT_LE(r.ias_mean, 1e-6);
  EXPECT_LE(r.ias_sd, 1e-6);
  EXPECT_DOUBLE_EQ(r.mec_mean, 1.0);
  EXPECT_DOUBLE_EQ(r.mec_sd, 0.0);
  ASSERT_EQ(r.per_feature_mec.size(), 3u);
  EXPECT_EQ(r.per_feature_mec[1].first, "x1");
}

TEST(Complexity, SingleReplicateAndDeterminism) {
  const auto d = uniform_data(800, 2, 12);
  const auto f = [](const Matrix& x) -> Vector {
    return (x.col(0).array().sin() + x.col(0).array() * x.col(1).array()).matrix();
  };
  const auto one = complexity_report(f, d, 1, 4);
  EXPECT_DOUBLE_EQ(one.ias_sd, 0.0);
  EXPECT_DOUBLE_EQ(one.mec_sd, 0.0);
  const auto a = complexity_report(f, d, 4, 9);
  const auto b = complexity_report(f, d, 4, 9);
  EXPECT_EQ(a.ias_mean, b.ias_mean);
  EXPECT_EQ(a.mec_mean, b.mec_mean);
  EXPECT_GT(a.ias_mean, 0.0);
}

TEST(AleVariance, ScalesWithSquaredSlope) {
  const auto d = uniform_data(20000, 3, 13);
  const Vector s = ale_variance_scores(linear((Vector(3) << 2.0, 1.0, 0.0).finished()), d);
  const double var0 = stats::variance(d.features().col(0));
  const double var1 = stats::variance(d.features().col(1));
  EXPECT_NEAR(s(0) / s(1), 4.0 * var0 / var1, 1e-6);
  EXPECT_NEAR(s(0) / s(1), 4.0, 0.2);
  EXPECT_LT(s(2), 1e-20);
}

TEST(AleVariance, ConstantFeatureScoresZero) {
  Matrix x(50, 2);
  Vector y(50);
  for (Index i = 0; i < 50; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 1.0;
    y(i) = i % 2;
  }
  const Vector s = ale_variance_scores(linear(Vector::Ones(2)), Dataset(x, y, {"a", "const"}));
  EXPECT_GT(s(0), 0.0);
  EXPECT_EQ(s(1), 0.0);
}
