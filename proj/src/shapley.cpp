#include <algorithm>
#include <cmath>

#include "rankbench/parallel.hpp"
#include "rankbench/rankings.hpp"

namespace rankbench {

namespace {

// Up to `count` distinct rows, chosen uniformly without replacement.
std::vector<Index> sample_rows(Index n, int count, Rng& rng) {
  auto perm = random_permutation(n, rng);
  perm.resize(static_cast<std::size_t>(std::min<Index>(n, count)));
  std::sort(perm.begin(), perm.end());
  return perm;
}

Matrix gather_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

// Walks one ordering: starting from the background block, reveals features of
// `instance` one at a time and reports the mean prediction after each step.
// Returns P + 1 values (empty coalition first).
Vector coalition_path(const PredictFn& f, const Eigen::Ref<const Eigen::RowVectorXd>& instance,
                      const Matrix& background, const std::vector<Index>& order) {
  const Index m = background.rows();
  const Index p = background.cols();
  // Stack every coalition along the ordering into one batch.
  Matrix stacked(m * (p + 1), p);
  Matrix block = background;
  stacked.topRows(m) = block;
  for (Index k = 0; k < p; ++k) {
    block.col(order[static_cast<std::size_t>(k)]).setConstant(instance(order[static_cast<std::size_t>(k)]));
    stacked.middleRows((k + 1) * m, m) = block;
  }
  const Vector pred = f(stacked);
  Vector means(p + 1);
  for (Index k = 0; k <= p; ++k) means(k) = pred.segment(k * m, m).mean();
  return means;
}

double loss_value(SageLoss loss, double y, double p) {
  if (loss == SageLoss::kSquaredError) return (y - p) * (y - p);
  const double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
}

}  // namespace

Matrix shapley_values(const PredictFn& f, const Matrix& instances, const Matrix& background, int n_samples,
                      std::uint64_t seed) {
  if (background.rows() == 0) throw InvalidArgument("shapley_values: background set is empty");
  if (n_samples < 1) throw InvalidArgument("shapley_values: n_samples must be >= 1");
  if (background.cols() != instances.cols()) throw InvalidArgument("shapley_values: column mismatch");
  const Index p = instances.cols();
  Matrix phi = Matrix::Zero(instances.rows(), p);
  parallel_for(static_cast<std::size_t>(instances.rows()), [&](std::size_t row) {
    const auto i = static_cast<Index>(row);
    Rng rng(derive_seed(seed, row));
    std::vector<Index> order;
    for (int s = 0; s < n_samples; ++s) {
      if (s % 2 == 0) {
        order = random_permutation(p, rng);
      } else {
        std::reverse(order.begin(), order.end());
      }
      const Vector path = coalition_path(f, instances.row(i), background, order);
      for (Index k = 0; k < p; ++k) phi(i, order[static_cast<std::size_t>(k)]) += path(k + 1) - path(k);
    }
    phi.row(i) /= n_samples;
  });
  return phi;
}

RankingScorecard shapley_relevance(const PredictFn& f, const Dataset& data, int n_samples, std::uint64_t seed,
                                   int n_instances, int background_size) {
  if (background_size < 1) throw InvalidArgument("shapley_relevance: background set is empty");
  Rng rng(seed);
  const Matrix background = gather_rows(data.features(), sample_rows(data.rows(), background_size, rng));
  const Matrix instances = gather_rows(data.features(), sample_rows(data.rows(), n_instances, rng));
  const Matrix phi = shapley_values(f, instances, background, n_samples, derive_seed(seed, 1));
  Vector scores = phi.cwiseAbs().colwise().mean().transpose();
  return make_scorecard("shap", data.feature_names(), std::move(scores), ScoreKind::kRelevance, n_samples, seed);
}

SageLoss parse_sage_loss(const std::string& name) {
  if (name == "cross_entropy") return SageLoss::kCrossEntropy;
  if (name == "mse") return SageLoss::kSquaredError;
  throw InvalidArgument("unknown SAGE loss '" + name + "' (valid: cross_entropy, mse)");
}

Vector sage_values(const PredictFn& f, const Matrix& x, const Vector& y, const Matrix& background, SageLoss loss,
                   int n_samples, std::uint64_t seed) {
  if (background.rows() == 0) throw InvalidArgument("sage_values: background set is empty");
  if (n_samples < 1) throw InvalidArgument("sage_values: n_samples must be >= 1");
  const Index p = x.cols();
  const auto n_pairs = static_cast<std::size_t>((n_samples + 1) / 2);
  Matrix partial = Matrix::Zero(p, static_cast<Index>(n_pairs));
  parallel_for(n_pairs, [&](std::size_t pair) {
    Rng rng(derive_seed(seed, pair));
    const auto i = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(x.rows())));
    auto order = random_permutation(p, rng);
    const int draws = (2 * static_cast<int>(pair) + 1 < n_samples) ? 2 : 1;
    for (int d = 0; d < draws; ++d) {
      if (d == 1) std::reverse(order.begin(), order.end());
      const Vector path = coalition_path(f, x.row(i), background, order);
      for (Index k = 0; k < p; ++k) {
        partial(order[static_cast<std::size_t>(k)], static_cast<Index>(pair)) +=
            loss_value(loss, y(i), path(k)) - loss_value(loss, y(i), path(k + 1));
      }
    }
  });
  return partial.rowwise().sum() / n_samples;
}

RankingScorecard sage_importance(const PredictFn& f, const Dataset& data, const std::string& loss, int n_samples,
                                 std::uint64_t seed, int background_size) {
  const SageLoss kind = parse_sage_loss(loss);
  if (background_size < 1) throw InvalidArgument("sage_importance: background set is empty");
  Rng rng(seed);
  const Matrix background = gather_rows(data.features(), sample_rows(data.rows(), background_size, rng));
  Vector scores = sage_values(f, data.features(), data.target(), background, kind, n_samples, derive_seed(seed, 1));
  return make_scorecard("sage", data.feature_names(), std::move(scores), ScoreKind::kImportance, n_samples, seed);
}

}  // namespace rankbench
