#include <limits>

#include "rankbench/rankings.hpp"

namespace rankbench {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Permuter {
 public:
  Permuter(const Dataset& data, std::uint64_t seed) : data_(data), seed_(seed) {}

  // Column j of `dst` becomes the repeat-r shuffle of the original column j.
  // The draw is keyed by feature name, so reordering columns changes nothing.
  void shuffle_into(Matrix& dst, int repeat, Index j) const {
    const auto& name = data_.feature_names()[static_cast<std::size_t>(j)];
    Rng rng(derive_seed(seed_, mix64(static_cast<std::uint64_t>(repeat)) ^ fnv1a(name)));
    const auto perm = random_permutation(data_.rows(), rng);
    const auto src = data_.features().col(j);
    for (Index i = 0; i < data_.rows(); ++i) dst(i, j) = src(perm[static_cast<std::size_t>(i)]);
  }

 private:
  const Dataset& data_;
  std::uint64_t seed_;
};

const char* method_label(Direction d, Pass p) {
  if (d == Direction::kBackward) return p == Pass::kSingle ? "bsp" : "bmp";
  return p == Pass::kSingle ? "fsp" : "fmp";
}

}  // namespace

RankingScorecard permutation_importance(const PredictFn& f, const Dataset& data, Metric metric,
                                        Direction direction, Pass pass, int n_permute, std::uint64_t seed) {
  if (n_permute < 1) throw InvalidArgument("permutation_importance: n_permute must be >= 1");
  const Index p = data.cols();
  if (p == 0) throw InvalidArgument("permutation_importance: dataset has no features");
  const Vector& y = data.target();
  const Permuter permuter(data, seed);
  auto score_of = [&](const Matrix& x) { return evaluate(metric, y, f(x)); };

  // One working matrix per repeat. Backward starts intact, forward starts
  // with every column shuffled.
  std::vector<Matrix> state(static_cast<std::size_t>(n_permute), data.features());
  if (direction == Direction::kForward) {
    for (int r = 0; r < n_permute; ++r)
      for (Index j = 0; j < p; ++j) permuter.shuffle_into(state[static_cast<std::size_t>(r)], r, j);
  }
  double level = 0.0;
  for (const auto& x : state) level += score_of(x);
  level /= n_permute;

  // Mean metric over repeats after toggling column j (shuffle when going
  // backward, restore when going forward).
  auto toggled_level = [&](Index j) {
    double sum = 0.0;
    for (int r = 0; r < n_permute; ++r) {
      Matrix x = state[static_cast<std::size_t>(r)];
      if (direction == Direction::kBackward) {
        permuter.shuffle_into(x, r, j);
      } else {
        x.col(j) = data.features().col(j);
      }
      sum += score_of(x);
    }
    return sum / n_permute;
  };
  auto gain_of = [&](double candidate) {
    return direction == Direction::kBackward ? level - candidate : candidate - level;
  };

  Vector scores = Vector::Zero(p);
  if (pass == Pass::kSingle) {
    for (Index j = 0; j < p; ++j) scores(j) = gain_of(toggled_level(j));
    return make_scorecard(method_label(direction, pass), data.feature_names(), std::move(scores),
                          ScoreKind::kImportance, n_permute, seed);
  }

  std::vector<bool> selected(static_cast<std::size_t>(p), false);
  std::vector<int> ranks(static_cast<std::size_t>(p), 0);
  for (int round = 1; round <= p; ++round) {
    Index best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    double best_level = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (selected[static_cast<std::size_t>(j)]) continue;
      const double candidate = toggled_level(j);
      const double gain = gain_of(candidate);
      if (gain > best_gain) {
        best = j;
        best_gain = gain;
        best_level = candidate;
      }
    }
    selected[static_cast<std::size_t>(best)] = true;
    ranks[static_cast<std::size_t>(best)] = round;
    scores(best) = best_gain;
    level = best_level;
    for (int r = 0; r < n_permute; ++r) {
      auto& x = state[static_cast<std::size_t>(r)];
      if (direction == Direction::kBackward) {
        permuter.shuffle_into(x, r, best);
      } else {
        x.col(best) = data.features().col(best);
      }
    }
  }
  RankingScorecard card;
  card.method = method_label(direction, pass);
  card.feature_names = data.feature_names();
  card.scores = std::move(scores);
  card.ranks = std::move(ranks);
  card.kind = ScoreKind::kImportance;
  card.n_repeats = n_permute;
  card.seed = seed;
  return card;
}

}  // namespace rankbench
