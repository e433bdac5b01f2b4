#include "rankbench/faithfulness.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <numeric>

#include "rankbench/parallel.hpp"
#include "rankbench/stats.hpp"

namespace rankbench {

namespace {

// Retrained models get their own seed so subsets do not share tree draws.
ModelConfig with_seed(const ModelConfig& cfg, std::uint64_t seed) {
  ModelConfig out = cfg;
  std::visit([&](auto& c) { c.seed = seed; }, out);
  return out;
}

std::uint64_t model_seed(const ModelConfig& cfg) {
  return std::visit([](const auto& c) { return c.seed; }, cfg);
}

// Names restricted to `chosen`, in dataset column order.
std::vector<std::string> in_column_order(const Dataset& data, const std::vector<std::string>& chosen) {
  std::vector<std::string> out;
  for (const auto& name : data.feature_names()) {
    if (std::find(chosen.begin(), chosen.end(), name) != chosen.end()) out.push_back(name);
  }
  return out;
}

void check_card(const Dataset& data, const RankingScorecard& card) {
  if (card.feature_names != data.feature_names()) {
    throw InvalidArgument("scorecard '" + card.method + "' does not match the dataset's features");
  }
}

}  // namespace

Vector min_max_scale(const Vector& v) {
  if (v.size() == 0) return v;
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi == lo) return Vector::Constant(v.size(), 0.5);
  return (v.array() - lo) / (hi - lo);
}

double total_importance(const RankingScorecard& card, const std::vector<std::string>& names) {
  double total = 0.0;
  for (const auto& name : names) {
    const auto it = std::find(card.feature_names.begin(), card.feature_names.end(), name);
    if (it == card.feature_names.end()) throw InvalidArgument("total_importance: unknown feature '" + name + "'");
    total += card.scores(it - card.feature_names.begin());
  }
  return total;
}

std::vector<std::string> names_by_rank(const RankingScorecard& card) {
  std::vector<std::string> out(card.feature_names.size());
  for (std::size_t j = 0; j < card.ranks.size(); ++j) {
    out[static_cast<std::size_t>(card.ranks[j] - 1)] = card.feature_names[j];
  }
  return out;
}

FaithfulnessReport run_experiment(const Dataset& data, const ModelConfig& model_cfg,
                                  std::span<const RankingScorecard> cards, const ExperimentOptions& options) {
  const Index p = data.cols();
  if (p < 3) throw InvalidArgument("run_experiment: need at least 3 features");
  if (cards.empty()) throw InvalidArgument("run_experiment: no scorecards given");
  if (options.n_subsets < 1) throw InvalidArgument("run_experiment: n_subsets must be >= 1");
  for (const auto& card : cards) check_card(data, card);

  const auto [train_rows, test_rows] = split_indices(data, options.test_fraction, derive_seed(options.seed, 0));
  const Dataset train = data.take_rows(train_rows);
  const Dataset test = data.take_rows(test_rows);
  const auto m = static_cast<Index>(cards.size());
  const std::uint64_t base_model_seed = model_seed(model_cfg);

  FaithfulnessReport report;
  report.metric = metric_name(options.metric);
  report.n_subsets = options.n_subsets;
  report.model = model_cfg;
  report.seed = options.seed;
  report.n_features = p;
  for (const auto& card : cards) report.methods.push_back(card.method);
  report.records.resize(static_cast<std::size_t>(options.n_subsets));

  const int max_failures = options.n_subsets / 100;
  std::vector<int> failures(static_cast<std::size_t>(options.n_subsets), 0);
  parallel_for(static_cast<std::size_t>(options.n_subsets), [&](std::size_t s) {
    for (int attempt = 0;; ++attempt) {
      Rng rng(derive_seed(derive_seed(options.seed, s + 1), static_cast<std::uint64_t>(attempt)));
      const auto size = static_cast<Index>(1 + uniform_index(rng, static_cast<std::uint64_t>(p - 1)));
      auto perm = random_permutation(p, rng);
      perm.resize(static_cast<std::size_t>(size));
      std::sort(perm.begin(), perm.end());
      FaithfulnessRecord record;
      record.subset_size = static_cast<int>(size);
      for (Index j : perm) record.subset.push_back(data.feature_names()[static_cast<std::size_t>(j)]);
      try {
        const auto cfg = with_seed(model_cfg, derive_seed(base_model_seed, s));
        const Predictor model = fit_subset_model(subset(train, record.subset), cfg);
        record.performance = evaluate(options.metric, test.target(), model.predict(subset(test, record.subset).features()));
      } catch (const Error& e) {
        ++failures[s];
        if (attempt >= max_failures) throw;
        continue;
      }
      record.raw_total = Vector::Zero(m);
      for (Index c = 0; c < m; ++c)
        for (Index j : perm) record.raw_total(c) += cards[static_cast<std::size_t>(c)].scores(j);
      report.records[s] = std::move(record);
      return;
    }
  });
  report.failures = std::accumulate(failures.begin(), failures.end(), 0);
  if (report.failures > max_failures) {
    throw Error("run_experiment: " + std::to_string(report.failures) + " retraining failures exceed 1% of subsets");
  }

  const auto n = static_cast<Index>(report.records.size());
  Vector performance(n);
  for (Index r = 0; r < n; ++r) performance(r) = report.records[static_cast<std::size_t>(r)].performance;
  for (auto& record : report.records) record.scaled_total = Vector::Zero(m);
  for (Index c = 0; c < m; ++c) {
    Vector totals(n);
    for (Index r = 0; r < n; ++r) totals(r) = report.records[static_cast<std::size_t>(r)].raw_total(c);
    const Vector scaled = min_max_scale(totals);
    for (Index r = 0; r < n; ++r) report.records[static_cast<std::size_t>(r)].scaled_total(c) = scaled(r);
    FitStats fs;
    fs.n = n;
    if (scaled.maxCoeff() > scaled.minCoeff() && performance.maxCoeff() > performance.minCoeff() &&
        n >= options.degree + 2) {
      fs = association_stats(scaled, performance, options.degree, options.n_boot,
                             derive_seed(options.seed, 1000003 + static_cast<std::uint64_t>(c)));
    } else {
      std::cerr << "warning: method '" << report.methods[static_cast<std::size_t>(c)]
                << "' has degenerate totals or performance; association statistics set to 0\n";
      fs.mse = n > 0 ? stats::variance(performance) : 0.0;
    }
    report.fit_stats.push_back(fs);
  }
  return report;
}

std::vector<ParetoPoint> pareto_curve(const FaithfulnessReport& report) {
  std::map<int, std::vector<double>> by_size;
  for (const auto& r : report.records) by_size[r.subset_size].push_back(r.performance);
  std::vector<ParetoPoint> curve;
  for (const auto& [size, values] : by_size) {
    const Eigen::Map<const Vector> v(values.data(), static_cast<Index>(values.size()));
    curve.push_back({size, static_cast<int>(values.size()), v.mean(), stats::quantile(v, 0.1),
                     stats::quantile(v, 0.9)});
  }
  return curve;
}

TopBottomResult topk_bottomk(const Dataset& data, const ModelConfig& model_cfg, const RankingScorecard& card, int k,
                             Metric metric, int n_boot, std::uint64_t seed) {
  check_card(data, card);
  const Index p = data.cols();
  if (k < 1 || k > p) throw InvalidArgument("topk_bottomk: k must lie in [1, P]");
  if (n_boot < 1) throw InvalidArgument("topk_bottomk: n_boot must be >= 1");
  if (2 * k > p) std::cerr << "warning: topk_bottomk: 2k > P, top and bottom sets overlap\n";
  const auto ordered = names_by_rank(card);
  TopBottomResult result;
  result.top = in_column_order(data, {ordered.begin(), ordered.begin() + k});
  result.bottom = in_column_order(data, {ordered.end() - k, ordered.end()});

  const auto cfg = with_seed(model_cfg, derive_seed(model_seed(model_cfg), seed));
  const Dataset top_data = subset(data, result.top);
  const Dataset bottom_data = subset(data, result.bottom);
  const Vector top_pred = fit_subset_model(top_data, cfg).predict(top_data.features());
  const Vector bottom_pred = fit_subset_model(bottom_data, cfg).predict(bottom_data.features());
  const Vector& y = data.target();
  result.top_performance = evaluate(metric, y, top_pred);
  result.bottom_performance = evaluate(metric, y, bottom_pred);
  result.delta = result.top_performance - result.bottom_performance;

  Vector deltas(n_boot);
  const Index n = data.rows();
  Vector yb(n), tb(n), bb(n);
  for (int b = 0; b < n_boot; ++b) {
    const auto rows = bootstrap_indices(data, derive_seed(seed, static_cast<std::uint64_t>(b) + 1));
    for (Index i = 0; i < n; ++i) {
      const Index r = rows[static_cast<std::size_t>(i)];
      yb(i) = y(r);
      tb(i) = top_pred(r);
      bb(i) = bottom_pred(r);
    }
    deltas(b) = evaluate(metric, yb, tb) - evaluate(metric, yb, bb);
  }
  result.ci = percentile_interval(deltas, 0.95);
  return result;
}

IncrementalCurves incremental_curves(const Dataset& data, const ModelConfig& model_cfg, const RankingScorecard& card,
                                     int k_max, Metric metric, std::uint64_t seed) {
  check_card(data, card);
  const Index p = data.cols();
  if (k_max < 1 || k_max > p) throw InvalidArgument("incremental_curves: k_max must lie in [1, P]");
  const auto ordered = names_by_rank(card);
  const auto cfg = with_seed(model_cfg, derive_seed(model_seed(model_cfg), seed));
  IncrementalCurves curves;
  curves.best.resize(k_max);
  curves.worst.resize(k_max);
  parallel_for(static_cast<std::size_t>(2 * k_max), [&](std::size_t job) {
    const auto k = static_cast<std::ptrdiff_t>(job / 2) + 1;
    const bool best = job % 2 == 0;
    const std::vector<std::string> chosen =
        best ? std::vector<std::string>(ordered.begin(), ordered.begin() + k)
             : std::vector<std::string>(ordered.end() - k, ordered.end());
    const Dataset part = subset(data, in_column_order(data, chosen));
    const double value = evaluate(metric, data.target(), fit_subset_model(part, cfg).predict(part.features()));
    (best ? curves.best : curves.worst)(k - 1) = value;
  });
  return curves;
}

}  // namespace rankbench
