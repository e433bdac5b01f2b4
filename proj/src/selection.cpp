#include "rankbench/selection.hpp"

#include <algorithm>
#include <cmath>

#include "rankbench/parallel.hpp"

namespace rankbench {

std::vector<std::string> l1_select(const Dataset& data, double C, double cutoff, std::uint64_t seed) {
  LogRegConfig cfg;
  cfg.C = C;
  cfg.l1_ratio = 1.0;
  cfg.seed = seed;
  const Predictor model = fit_logreg(data, cfg);
  const Vector beta = coefficients(model);
  std::vector<std::string> retained;
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta(j)) > cutoff) retained.push_back(data.feature_names()[static_cast<std::size_t>(j)]);
  }
  if (retained.empty()) {
    throw Error("l1_select: no feature survives C = " + std::to_string(C) + "; try a larger C");
  }
  return retained;
}

Dataset manual_filter(const Dataset& data, const std::vector<std::string>& drop) {
  for (const auto& name : drop) data.index_of(name);
  std::vector<std::string> keep;
  for (const auto& name : data.feature_names()) {
    if (std::find(drop.begin(), drop.end(), name) == drop.end()) keep.push_back(name);
  }
  return subset(data, keep);
}

SelectionReport compare_models(const Dataset& data_full, const Dataset& data_reduced,
                               const ModelConfig& model_cfg_full, const ModelConfig& model_cfg_reduced,
                               const CompareOptions& options) {
  if (data_full.rows() != data_reduced.rows() || data_full.target() != data_reduced.target()) {
    throw InvalidArgument("compare_models: full and reduced datasets must hold the same rows");
  }
  for (Index j = 0; j < data_reduced.cols(); ++j) {
    const Index k = data_full.index_of(data_reduced.feature_names()[static_cast<std::size_t>(j)]);
    if (data_full.features().col(k) != data_reduced.features().col(j)) {
      throw InvalidArgument("compare_models: full and reduced datasets must hold the same rows");
    }
  }
  if (options.n_boot < 1) throw InvalidArgument("compare_models: n_boot must be >= 1");

  const auto [train_rows, test_rows] = split_indices(data_full, options.test_fraction, derive_seed(options.seed, 0));
  const Dataset train_full = data_full.take_rows(train_rows);
  const Dataset test_full = data_full.take_rows(test_rows);
  const Dataset train_reduced = data_reduced.take_rows(train_rows);
  const Dataset test_reduced = data_reduced.take_rows(test_rows);
  const Predictor full = fit_subset_model(train_full, model_cfg_full);
  const Predictor reduced = fit_subset_model(train_reduced, model_cfg_reduced);
  const Vector pred_full = full.predict(test_full.features());
  const Vector pred_reduced = reduced.predict(test_reduced.features());

  SelectionReport report;
  report.n_boot = options.n_boot;
  report.retained = data_reduced.feature_names();
  for (const auto& name : data_full.feature_names()) {
    if (std::find(report.retained.begin(), report.retained.end(), name) == report.retained.end()) {
      report.dropped_l1.push_back(name);
    }
  }

  const auto boots = static_cast<std::size_t>(options.n_boot);
  Matrix before(static_cast<Index>(boots), 4), after(static_cast<Index>(boots), 4);
  parallel_for(boots, [&](std::size_t b) {
    const auto rows = bootstrap_indices(test_full, derive_seed(options.seed, b + 1));
    const Index n = test_full.rows();
    Vector y(n), pf(n), pr(n);
    for (Index i = 0; i < n; ++i) {
      const Index r = rows[static_cast<std::size_t>(i)];
      y(i) = test_full.target()(r);
      pf(i) = pred_full(r);
      pr(i) = pred_reduced(r);
    }
    const auto row = static_cast<Index>(b);
    before.row(row) << naupdc(y, pf), ncsi(y, pf), roc_auc(y, pf), brier_skill_score(y, pf);
    after.row(row) << naupdc(y, pr), ncsi(y, pr), roc_auc(y, pr), brier_skill_score(y, pr);
  });
  const Eigen::RowVectorXd mb = before.colwise().mean();
  const Eigen::RowVectorXd ma = after.colwise().mean();
  report.before = {mb(0), mb(1), mb(2), mb(3)};
  report.after = {ma(0), ma(1), ma(2), ma(3)};
  const Vector diff = after.col(0) - before.col(0);
  report.naupdc_difference = diff.mean();
  report.naupdc_difference_ci = percentile_interval(diff, 0.95);

  report.complexity_before = complexity_report(full, train_full, options.complexity_boot,
                                               derive_seed(options.seed, 17), options.ale_bins, options.mec_epsilon);
  report.complexity_after = complexity_report(reduced, train_reduced, options.complexity_boot,
                                              derive_seed(options.seed, 17), options.ale_bins, options.mec_epsilon);
  return report;
}

SelectionReport reduce_and_compare(const Dataset& data, const std::vector<std::string>& manual_drop, double C,
                                   double cutoff, const ModelConfig& model_cfg_full,
                                   const ModelConfig& model_cfg_reduced, const CompareOptions& options) {
  const Dataset filtered = manual_filter(data, manual_drop);
  const auto retained = l1_select(filtered, C, cutoff, options.seed);
  const Dataset reduced = subset(data, retained);
  SelectionReport report = compare_models(data, reduced, model_cfg_full, model_cfg_reduced, options);
  report.C = C;
  report.cutoff = cutoff;
  report.dropped_manual = manual_drop;
  report.dropped_l1.clear();
  for (const auto& name : filtered.feature_names()) {
    if (std::find(retained.begin(), retained.end(), name) == retained.end()) report.dropped_l1.push_back(name);
  }
  return report;
}

}  // namespace rankbench
