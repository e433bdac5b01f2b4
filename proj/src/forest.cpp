#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankbench/models.hpp"
#include "rankbench/parallel.hpp"

namespace rankbench {

namespace {

constexpr double kMinGain = 1e-12;

double entropy(double w_pos, double w_total) {
  if (w_total <= 0.0) return 0.0;
  const double p = w_pos / w_total;
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t n_left = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Vector& y, const Vector& weight, const ForestConfig& cfg, Rng& rng)
      : x_(x), y_(y), weight_(weight), cfg_(cfg), rng_(rng) {}

  DecisionTree build(std::vector<Index> rows) {
    struct Pending {
      std::vector<Index> rows;
      int depth;
      int node;
    };
    std::vector<Pending> stack;
    stack.push_back({std::move(rows), 0, add_node()});
    while (!stack.empty()) {
      Pending job = std::move(stack.back());
      stack.pop_back();
      const auto node = static_cast<std::size_t>(job.node);
      double w_total = 0.0, w_pos = 0.0;
      for (Index r : job.rows) {
        w_total += weight_(r);
        w_pos += weight_(r) * y_(r);
      }
      tree_.weight[node] = w_total;
      tree_.value[node] = w_total > 0.0 ? w_pos / w_total : 0.0;
      tree_.impurity[node] = entropy(w_pos, w_total);

      const auto n_rows = job.rows.size();
      if (job.depth >= cfg_.max_depth || n_rows < static_cast<std::size_t>(cfg_.min_samples_split) ||
          n_rows < 2 * static_cast<std::size_t>(cfg_.min_samples_leaf) || tree_.impurity[node] <= 0.0) {
        continue;
      }
      const SplitCandidate best = find_split(job.rows, w_total, w_pos, tree_.impurity[node]);
      if (best.feature < 0) continue;

      std::vector<Index> left_rows, right_rows;
      left_rows.reserve(best.n_left);
      right_rows.reserve(n_rows - best.n_left);
      for (Index r : job.rows) {
        (x_(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);
      }
      const int left = add_node();
      const int right = add_node();
      tree_.feature[node] = best.feature;
      tree_.threshold[node] = best.threshold;
      tree_.left[node] = left;
      tree_.right[node] = right;
      stack.push_back({std::move(right_rows), job.depth + 1, right});
      stack.push_back({std::move(left_rows), job.depth + 1, left});
    }
    return std::move(tree_);
  }

 private:
  int add_node() {
    tree_.feature.push_back(-1);
    tree_.threshold.push_back(0.0);
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.value.push_back(0.0);
    tree_.weight.push_back(0.0);
    tree_.impurity.push_back(0.0);
    return static_cast<int>(tree_.feature.size() - 1);
  }

  // Candidate features are scanned in ascending index order and thresholds in
  // ascending order; only a strictly larger gain replaces the incumbent.
  SplitCandidate find_split(const std::vector<Index>& rows, double w_total, double w_pos, double parent_h) {
    const auto p = static_cast<std::size_t>(x_.cols());
    const auto k = static_cast<std::size_t>(cfg_.max_features);
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng_, p - i));
      std::swap(features_[i], features_[j]);
    }
    std::vector<int> candidates(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(candidates.begin(), candidates.end());

    const std::size_t min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    SplitCandidate best;
    order_.resize(rows.size());
    for (int f : candidates) {
      for (std::size_t i = 0; i < rows.size(); ++i) order_[i] = {x_(rows[i], f), rows[i]};
      std::sort(order_.begin(), order_.end());
      double lw = 0.0, lp = 0.0;
      for (std::size_t i = 0; i + 1 < order_.size(); ++i) {
        const Index r = order_[i].second;
        lw += weight_(r);
        lp += weight_(r) * y_(r);
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf) continue;
        if (order_.size() - n_left < min_leaf) break;
        const double lo = order_[i].first;
        const double hi = order_[i + 1].first;
        if (!(lo < hi)) continue;
        const double rw = w_total - lw;
        if (lw <= 0.0 || rw <= 0.0) continue;
        const double child_h = (lw * entropy(lp, lw) + rw * entropy(w_pos - lp, rw)) / w_total;
        const double gain = parent_h - child_h;
        if (gain > kMinGain && gain > best.gain) {
          double threshold = 0.5 * (lo + hi);
          if (!(threshold < hi)) threshold = lo;
          best = {f, threshold, gain, n_left};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const Vector& y_;
  const Vector& weight_;
  const ForestConfig& cfg_;
  Rng& rng_;
  DecisionTree tree_;
  std::vector<int> features_ = init_features();
  std::vector<std::pair<double, Index>> order_;

  std::vector<int> init_features() const {
    std::vector<int> f(static_cast<std::size_t>(x_.cols()));
    std::iota(f.begin(), f.end(), 0);
    return f;
  }
};

}  // namespace

void ForestConfig::validate() const {
  if (n_trees < 1) throw InvalidArgument("forest: n_trees must be positive");
  if (max_depth < 1) throw InvalidArgument("forest: max_depth must be positive");
  if (max_features < 1) throw InvalidArgument("forest: max_features must be positive");
  if (min_samples_leaf < 1) throw InvalidArgument("forest: min_samples_leaf must be positive");
  if (min_samples_split < 2) throw InvalidArgument("forest: min_samples_split must be >= 2");
  if (criterion != "entropy") throw InvalidArgument("forest: only the entropy criterion is supported");
}

Predictor fit_forest(const Dataset& train, const ForestConfig& cfg) {
  cfg.validate();
  if (cfg.max_features > train.cols()) {
    throw InvalidArgument("forest: max_features (" + std::to_string(cfg.max_features) +
                          ") exceeds feature count (" + std::to_string(train.cols()) + ")");
  }
  const Index n = train.rows();
  const Vector& y = train.target();
  Vector class_weight = Vector::Ones(n);
  if (cfg.class_weight == ClassWeight::kBalanced) {
    const double pos = y.sum();
    const double neg = static_cast<double>(n) - pos;
    for (Index i = 0; i < n; ++i) {
      class_weight(i) = static_cast<double>(n) / (2.0 * (y(i) == 1.0 ? pos : neg));
    }
  }

  ForestModel forest;
  forest.trees.resize(static_cast<std::size_t>(cfg.n_trees));
  parallel_for(forest.trees.size(), [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, t));
    Vector weight = class_weight;
    std::vector<Index> rows;
    if (cfg.bootstrap) {
      Vector counts = Vector::Zero(n);
      for (Index i = 0; i < n; ++i) counts(static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n)))) += 1.0;
      for (Index i = 0; i < n; ++i) {
        if (counts(i) > 0.0) rows.push_back(i);
      }
      weight.array() *= counts.array();
    } else {
      rows.resize(static_cast<std::size_t>(n));
      std::iota(rows.begin(), rows.end(), Index{0});
    }
    TreeBuilder builder(train.features(), y, weight, cfg, rng);
    forest.trees[t] = builder.build(std::move(rows));
  });
  return Predictor(std::move(forest), train.feature_names());
}

Vector gini_importance(const Predictor& p) {
  const ForestModel& forest = p.forest();
  Vector total = Vector::Zero(p.n_features());
  for (const auto& tree : forest.trees) {
    Vector imp = Vector::Zero(p.n_features());
    for (std::size_t node = 0; node < tree.size(); ++node) {
      if (tree.is_leaf(node)) continue;
      const auto l = static_cast<std::size_t>(tree.left[node]);
      const auto r = static_cast<std::size_t>(tree.right[node]);
      imp(tree.feature[node]) += tree.weight[node] * tree.impurity[node] - tree.weight[l] * tree.impurity[l] -
                                 tree.weight[r] * tree.impurity[r];
    }
    const double s = imp.sum();
    if (s > 0.0) total += imp / s;
  }
  const double s = total.sum();
  if (s > 0.0) total /= s;
  return total;
}

PathAttribution tree_path_attribution(const Predictor& p, const Matrix& x) {
  const ForestModel& forest = p.forest();
  if (x.cols() != p.n_features()) throw InvalidArgument("tree_path_attribution: column count mismatch");
  const auto n_trees = static_cast<double>(forest.trees.size());
  PathAttribution out;
  out.contributions = Matrix::Zero(x.rows(), x.cols());
  double bias = 0.0;
  for (const auto& tree : forest.trees) bias += tree.value[0];
  bias /= n_trees;
  out.bias = Vector::Constant(x.rows(), bias);
  for (Index i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (const auto& tree : forest.trees) {
      std::size_t node = 0;
      while (!tree.is_leaf(node)) {
        const auto next = static_cast<std::size_t>(row(tree.feature[node]) <= tree.threshold[node] ? tree.left[node]
                                                                                                     : tree.right[node]);
        out.contributions(i, tree.feature[node]) += (tree.value[next] - tree.value[node]) / n_trees;
        node = next;
      }
    }
  }
  return out;
}

}  // namespace rankbench
