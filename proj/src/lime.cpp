#include <algorithm>
#include <cmath>

#include "rankbench/rankings.hpp"

namespace rankbench {

namespace {

constexpr double kPerturbScale = 0.5;
constexpr double kRidge = 1e-6;

}  // namespace

Vector lime_explain(const PredictFn& f, const Eigen::Ref<const Vector>& instance, const Vector& feature_sd,
                    int n_perturb, double kernel_width, Rng& rng) {
  const Index p = instance.size();
  if (n_perturb < p + 2) throw InvalidArgument("lime: n_perturb must exceed the feature count + 1");
  if (!(kernel_width > 0.0)) throw InvalidArgument("lime: kernel width must be positive");
  std::vector<Index> active;
  for (Index j = 0; j < p; ++j) {
    if (feature_sd(j) > 0.0) active.push_back(j);
  }
  const auto q = static_cast<Index>(active.size());

  Matrix samples = instance.transpose().replicate(n_perturb, 1);
  Matrix design(n_perturb, q + 1);  // standardized offsets plus intercept
  Vector weight(n_perturb);
  for (Index s = 0; s < n_perturb; ++s) {
    double d2 = 0.0;
    for (Index a = 0; a < q; ++a) {
      const Index j = active[static_cast<std::size_t>(a)];
      const double z = kPerturbScale * standard_normal(rng);
      samples(s, j) += z * feature_sd(j);
      design(s, a) = z;
      d2 += z * z;
    }
    design(s, q) = 1.0;
    weight(s) = std::exp(-d2 / (kernel_width * kernel_width));
  }
  const Vector target = f(samples);

  Matrix gram = design.transpose() * weight.asDiagonal() * design;
  const double ridge = kRidge * std::max(1.0, weight.sum());
  for (Index a = 0; a < q; ++a) gram(a, a) += ridge;  // intercept unpenalized
  const Vector rhs = design.transpose() * weight.asDiagonal() * target;
  const Eigen::LDLT<Matrix> solver(gram);
  if (solver.info() != Eigen::Success || !solver.isPositive()) {
    throw Error("lime: singular surrogate system");
  }
  const Vector theta = solver.solve(rhs);
  if (!theta.allFinite()) throw Error("lime: singular surrogate system");

  Vector slopes = Vector::Zero(p);
  for (Index a = 0; a < q; ++a) {
    const Index j = active[static_cast<std::size_t>(a)];
    slopes(j) = theta(a) / feature_sd(j);
  }
  return slopes;
}

RankingScorecard lime_relevance(const PredictFn& f, const Dataset& data, int n_perturb, double kernel_width,
                                std::uint64_t seed, int n_instances) {
  const Index p = data.cols();
  if (kernel_width <= 0.0) kernel_width = 0.75 * std::sqrt(static_cast<double>(p));
  const Matrix centered = data.features().rowwise() - data.features().colwise().mean();
  const Vector sd = (centered.colwise().squaredNorm() / static_cast<double>(data.rows())).cwiseSqrt().transpose();
  Rng rng(seed);
  auto rows = random_permutation(data.rows(), rng);
  rows.resize(static_cast<std::size_t>(std::min<Index>(data.rows(), n_instances)));
  std::sort(rows.begin(), rows.end());
  Vector scores = Vector::Zero(p);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    Rng local(derive_seed(seed, k + 1));
    scores += lime_explain(f, data.features().row(rows[k]).transpose(), sd, n_perturb, kernel_width, local)
                  .cwiseAbs();
  }
  scores /= static_cast<double>(rows.size());
  return make_scorecard("lime", data.feature_names(), std::move(scores), ScoreKind::kRelevance, n_perturb, seed);
}

}  // namespace rankbench
