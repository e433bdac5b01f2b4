#include "rankbench/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rankbench/effects.hpp"
#include "rankbench/faithfulness.hpp"
#include "rankbench/selection.hpp"
#include "rankbench/serialize.hpp"
#include "rankbench/svg.hpp"

namespace rankbench {

namespace {

bool wants_json(Format f) { return f == Format::kJson || f == Format::kAll; }
bool wants_csv(Format f) { return f == Format::kCsv || f == Format::kAll; }
bool wants_svg(Format f) { return f == Format::kSvg || f == Format::kAll; }

std::string join(const std::vector<std::string>& items, const std::string& sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

ModelConfig seeded(ModelConfig cfg, std::uint64_t seed) {
  std::visit([&](auto& c) { c.seed = seed; }, cfg);
  return cfg;
}

bool is_forest(const ModelConfig& cfg) { return std::holds_alternative<ForestConfig>(cfg); }

/// Shared preamble: data, the stratified split used by every command, and a
/// model fitted on the training rows.
struct Prepared {
  Dataset data;
  Dataset train;
  Dataset test;
  ModelConfig model_cfg;
  Predictor model;
};

Prepared prepare(const RunConfig& cfg) {
  Dataset data = load_data(cfg);
  const auto seed = cfg.root_seed();
  auto [train_rows, test_rows] = split_indices(data, cfg.test_fraction, derive_seed(seed, 0));
  Dataset train = data.take_rows(train_rows);
  Dataset test = data.take_rows(test_rows);
  ModelConfig model_cfg = seeded(cfg.model, derive_seed(seed, 2));
  Predictor model = fit_subset_model(train, model_cfg);
  return {std::move(data), std::move(train), std::move(test), std::move(model_cfg), std::move(model)};
}

std::vector<std::string> resolve_methods(const RunConfig& cfg) {
  const bool forest = is_forest(cfg.model);
  std::vector<std::string> methods = cfg.rank.methods;
  if (methods.empty()) {
    for (const auto& m : ranking_methods()) {
      if (m == "coefficients" && forest) continue;
      if ((m == "gini" || m == "tree_interpreter") && !forest) continue;
      methods.push_back(m);
    }
  }
  for (const auto& m : methods) {
    if (m == "coefficients" && forest) throw ConfigError("method 'coefficients' needs a logreg model");
    if ((m == "gini" || m == "tree_interpreter") && !forest) {
      throw ConfigError("method '" + m + "' needs a forest model");
    }
  }
  return methods;
}

std::vector<RankingScorecard> compute_cards(const RunConfig& cfg, const Prepared& prep,
                                            const std::vector<std::string>& methods) {
  RankingOptions options = cfg.rank.options;
  options.seed = derive_seed(cfg.root_seed(), 3);
  const Dataset& data = cfg.rank.use_test_data ? prep.test : prep.train;
  std::vector<RankingScorecard> cards;
  for (const auto& m : methods) cards.push_back(compute_ranking(m, prep.model, data, options));
  return cards;
}

void add(CommandOutput& out, std::filesystem::path name, std::string content) {
  out.files.push_back({std::move(name), std::move(content)});
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return out;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "json") return Format::kJson;
  if (name == "csv") return Format::kCsv;
  if (name == "svg") return Format::kSvg;
  if (name == "all") return Format::kAll;
  throw ConfigError("unknown format '" + name + "'; valid formats: json, csv, svg, all");
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"rank", "complexity", "select", "faithfulness", "curves", "synth"};
  return names;
}

CommandOutput cmd_rank(const RunConfig& cfg, Format format) {
  const auto methods = resolve_methods(cfg);
  if (methods.size() < 2) throw ConfigError("rank needs at least two methods to aggregate");
  const auto prep = prepare(cfg);
  const auto cards = compute_cards(cfg, prep, methods);
  const auto agg = aggregate(cards);
  const int top_k = std::min<int>(cfg.rank.top_k, static_cast<int>(prep.data.cols()));
  const double sigma = rank_uncertainty(agg, top_k);

  CommandOutput out;
  Json doc{{"command", "rank"},
           {"seed", cfg.root_seed()},
           {"model", to_json(prep.model_cfg)},
           {"evaluation_rows", cfg.rank.use_test_data ? "test" : "train"},
           {"top_k", top_k},
           {"rank_uncertainty", sigma},
           {"aggregated", to_json(agg)}};
  Json card_json = Json::array();
  for (const auto& c : cards) card_json.push_back(to_json(c));
  doc["scorecards"] = std::move(card_json);
  out.summary.push_back("rank uncertainty (top " + std::to_string(top_k) + "): " + format_double(sigma));
  if (!cfg.rank.top3.empty()) {
    const double ratio = uncertainty_ratio(cards, cfg.rank.top3, top_k);
    doc["uncertainty_ratio"] = Json{{"methods", cfg.rank.top3}, {"ratio", ratio}};
    out.summary.push_back("uncertainty ratio (" + join(cfg.rank.top3) + "): " + format_double(ratio));
  }
  if (wants_json(format)) {
    add(out, "rank.json", dump(doc));
    add(out, "model.json", dump(to_json(prep.model)));
  }
  if (wants_csv(format)) add(out, "rankings.csv", scorecards_csv(agg, cards));
  if (wants_svg(format)) {
    add(out, "rankings.svg", svg::ranked_bars(agg.feature_names, agg.median, agg.iqr,
                                              "Median rank over " + std::to_string(cards.size()) + " methods"));
  }
  return out;
}

CommandOutput cmd_complexity(const RunConfig& cfg, Format format) {
  const auto prep = prepare(cfg);
  const auto& c = cfg.complexity;
  const auto f = prep.model.as_function();
  const auto report = complexity_report(f, prep.train, c.n_boot, derive_seed(cfg.root_seed(), 4), c.n_bins, c.epsilon);
  const auto curves = compute_all_ale(f, prep.train, c.n_bins);

  CommandOutput out;
  out.summary.push_back("IAS " + format_double(report.ias_mean) + " +/- " + format_double(report.ias_sd) + ", MEC " +
                        format_double(report.mec_mean) + " +/- " + format_double(report.mec_sd));
  if (wants_json(format)) {
    Json ale = Json::array();
    for (const auto& curve : curves) ale.push_back(to_json(curve));
    add(out, "complexity.json", dump(Json{{"command", "complexity"},
                                          {"seed", cfg.root_seed()},
                                          {"model", to_json(prep.model_cfg)},
                                          {"report", to_json(report)},
                                          {"ale", std::move(ale)}}));
  }
  if (wants_csv(format)) {
    for (const auto& curve : curves) add(out, "ale/" + safe_name(curve.feature) + ".csv", ale_csv(curve));
  }
  if (wants_svg(format)) {
    std::vector<svg::Series> series;
    for (const auto& curve : curves) {
      // Plot against the within-feature quantile position so features share an axis.
      const Index nb = curve.bin_centers.size();
      const Vector x = nb > 1 ? Vector(Vector::LinSpaced(nb, 0.0, 1.0)) : Vector(Vector::Constant(1, 0.5));
      series.push_back({curve.feature, x, curve.values});
    }
    add(out, "ale.svg", svg::line_plot(series, "Accumulated local effects", "bin (quantile position)", "effect"));
  }
  return out;
}

CommandOutput cmd_select(const RunConfig& cfg, Format format) {
  const Dataset data = load_data(cfg);
  const auto& s = cfg.select;
  CompareOptions options;
  options.test_fraction = cfg.test_fraction;
  options.n_boot = s.n_boot;
  options.complexity_boot = cfg.complexity.n_boot;
  options.ale_bins = cfg.complexity.n_bins;
  options.mec_epsilon = cfg.complexity.epsilon;
  options.seed = cfg.root_seed();
  const auto full_cfg = seeded(cfg.model, derive_seed(cfg.root_seed(), 2));
  const auto reduced_cfg = seeded(cfg.reduced_model.value_or(cfg.model), derive_seed(cfg.root_seed(), 2));
  const auto pairs = correlated_pairs(data, s.corr_threshold);
  const auto report = reduce_and_compare(data, s.manual_drop, s.C, s.cutoff, full_cfg, reduced_cfg, options);

  CommandOutput out;
  out.summary.push_back("retained " + std::to_string(report.retained.size()) + " of " +
                        std::to_string(data.cols()) + " features: " + join(report.retained));
  out.summary.push_back("NAUPDC difference (reduced - full) " + format_double(report.naupdc_difference) + " [" +
                        format_double(report.naupdc_difference_ci.low) + ", " +
                        format_double(report.naupdc_difference_ci.high) + "]");
  if (wants_json(format)) {
    Json pair_json = Json::array();
    for (const auto& p : pairs) pair_json.push_back(Json{{"first", p.first}, {"second", p.second}, {"rho", p.rho}});
    add(out, "select.json", dump(Json{{"command", "select"},
                                      {"seed", cfg.root_seed()},
                                      {"model_full", to_json(full_cfg)},
                                      {"model_reduced", to_json(reduced_cfg)},
                                      {"corr_threshold", s.corr_threshold},
                                      {"correlated_pairs", std::move(pair_json)},
                                      {"report", to_json(report)}}));
  }
  if (wants_csv(format)) {
    std::ostringstream csv;
    csv << "metric,full,reduced\n";
    csv << "naupdc," << format_double(report.before.naupdc) << ',' << format_double(report.after.naupdc) << '\n';
    csv << "ncsi," << format_double(report.before.ncsi) << ',' << format_double(report.after.ncsi) << '\n';
    csv << "auc," << format_double(report.before.auc) << ',' << format_double(report.after.auc) << '\n';
    csv << "bss," << format_double(report.before.bss) << ',' << format_double(report.after.bss) << '\n';
    csv << "ias," << format_double(report.complexity_before.ias_mean) << ','
        << format_double(report.complexity_after.ias_mean) << '\n';
    csv << "mec," << format_double(report.complexity_before.mec_mean) << ','
        << format_double(report.complexity_after.mec_mean) << '\n';
    add(out, "select.csv", csv.str());
  }
  if (wants_svg(format)) {
    const std::vector<std::string> labels{"NAUPDC full", "NAUPDC reduced", "NCSI full", "NCSI reduced",
                                          "AUC full",    "AUC reduced",    "BSS full",  "BSS reduced"};
    Vector v(8);
    v << report.before.naupdc, report.after.naupdc, report.before.ncsi, report.after.ncsi, report.before.auc,
        report.after.auc, report.before.bss, report.after.bss;
    add(out, "select.svg", svg::bars_with_ci(labels, v, v, v, "Full vs reduced model (bootstrap means)", "score"));
  }
  return out;
}

CommandOutput cmd_faithfulness(const RunConfig& cfg, Format format) {
  const auto methods = resolve_methods(cfg);
  const auto prep = prepare(cfg);
  const auto cards = compute_cards(cfg, prep, methods);
  const auto& e = cfg.experiment;
  ExperimentOptions options;
  options.n_subsets = e.n_subsets;
  options.metric = e.metric;
  options.test_fraction = cfg.test_fraction;
  options.degree = e.degree;
  options.n_boot = e.n_boot;
  options.seed = cfg.root_seed();
  const auto report = run_experiment(prep.data, prep.model_cfg, cards, options);
  const auto pareto = pareto_curve(report);

  // The three methods whose totals track performance best, by fit R^2.
  std::vector<std::size_t> order(report.methods.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return report.fit_stats[a].r2 > report.fit_stats[b].r2; });

  CommandOutput out;
  Json doc{{"command", "faithfulness"}, {"report", to_json(report)}, {"pareto", to_json(pareto)}};
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    const auto& st = report.fit_stats[m];
    out.summary.push_back(report.methods[m] + ": tau " + format_double(st.kendall_tau) + ", R2 " +
                          format_double(st.r2));
  }
  if (cards.size() >= 4) {
    std::vector<std::string> top3;
    for (std::size_t i = 0; i < 3; ++i) top3.push_back(report.methods[order[i]]);
    const int top_k = std::min<int>(cfg.rank.top_k, static_cast<int>(prep.data.cols()));
    const double ratio = uncertainty_ratio(cards, top3, top_k);
    doc["faithful_top3"] = Json{{"methods", top3}, {"uncertainty_ratio", ratio}};
    out.summary.push_back("uncertainty ratio of most faithful three (" + join(top3) + "): " + format_double(ratio));
    if (wants_svg(format)) {
      Vector r(1);
      r << ratio;
      add(out, "ratio.svg", svg::ratio_bars({join(top3, "+")}, r, "Rank uncertainty ratio"));
    }
  }
  if (wants_json(format)) add(out, "faithfulness.json", dump(doc));
  if (wants_csv(format)) add(out, "records.csv", records_csv(report));
  if (wants_svg(format)) {
    Vector perf(static_cast<Index>(report.records.size()));
    for (std::size_t i = 0; i < report.records.size(); ++i) perf(static_cast<Index>(i)) = report.records[i].performance;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      Vector total(perf.size());
      for (std::size_t i = 0; i < report.records.size(); ++i) {
        total(static_cast<Index>(i)) = report.records[i].scaled_total(static_cast<Index>(m));
      }
      add(out, "scatter_" + safe_name(report.methods[m]) + ".svg",
          svg::hexbin(total, perf, report.methods[m], "scaled total importance", report.metric));
    }
    svg::Series mean{"mean", Vector(static_cast<Index>(pareto.size())), Vector(static_cast<Index>(pareto.size()))};
    svg::Series q10{"10th percentile", mean.x, mean.y}, q90{"90th percentile", mean.x, mean.y};
    for (std::size_t i = 0; i < pareto.size(); ++i) {
      const auto k = static_cast<Index>(i);
      mean.x(k) = q10.x(k) = q90.x(k) = pareto[i].subset_size;
      mean.y(k) = pareto[i].mean;
      q10.y(k) = pareto[i].q10;
      q90.y(k) = pareto[i].q90;
    }
    add(out, "pareto.svg", svg::line_plot({mean, q10, q90}, "Performance by subset size", "subset size", report.metric));
  }
  return out;
}

CommandOutput cmd_curves(const RunConfig& cfg, Format format) {
  const auto methods = resolve_methods(cfg);
  const auto prep = prepare(cfg);
  const auto cards = compute_cards(cfg, prep, methods);
  const auto& e = cfg.experiment;
  const auto seed = derive_seed(cfg.root_seed(), 5);

  CommandOutput out;
  Json per_method = Json::array();
  std::vector<std::string> labels;
  Vector delta(static_cast<Index>(cards.size())), low(delta.size()), high(delta.size());
  std::vector<svg::Series> lines;
  for (std::size_t m = 0; m < cards.size(); ++m) {
    const auto tb = topk_bottomk(prep.train, prep.model_cfg, cards[m], e.k, e.metric, e.ci_boot, seed);
    const auto inc = incremental_curves(prep.train, prep.model_cfg, cards[m], e.k_max, e.metric, seed);
    per_method.push_back(Json{{"method", cards[m].method}, {"top_bottom", to_json(tb)}, {"incremental", to_json(inc)}});
    labels.push_back(cards[m].method);
    const auto i = static_cast<Index>(m);
    delta(i) = tb.delta;
    low(i) = tb.ci.low;
    high(i) = tb.ci.high;
    const Vector ks = Vector::LinSpaced(inc.best.size(), 1.0, static_cast<double>(inc.best.size()));
    lines.push_back({cards[m].method + " best", ks, inc.best});
    lines.push_back({cards[m].method + " worst", ks, inc.worst});
    out.summary.push_back(cards[m].method + ": top-minus-bottom " + format_double(tb.delta) + " [" +
                          format_double(tb.ci.low) + ", " + format_double(tb.ci.high) + "]");
  }
  if (wants_json(format)) {
    add(out, "curves.json", dump(Json{{"command", "curves"},
                                      {"seed", cfg.root_seed()},
                                      {"model", to_json(prep.model_cfg)},
                                      {"metric", metric_name(e.metric)},
                                      {"k", e.k},
                                      {"k_max", e.k_max},
                                      {"methods", std::move(per_method)}}));
  }
  if (wants_csv(format)) {
    std::ostringstream csv;
    csv << "method,delta,ci_low,ci_high\n";
    for (std::size_t m = 0; m < cards.size(); ++m) {
      const auto i = static_cast<Index>(m);
      csv << labels[m] << ',' << format_double(delta(i)) << ',' << format_double(low(i)) << ','
          << format_double(high(i)) << '\n';
    }
    add(out, "topk.csv", csv.str());
  }
  if (wants_svg(format)) {
    add(out, "topk.svg", svg::bars_with_ci(labels, delta, low, high, "Top-k minus bottom-k performance",
                                           metric_name(e.metric) + " difference"));
    add(out, "incremental.svg", svg::line_plot(lines, "Incremental feature sets", "number of features",
                                               metric_name(e.metric)));
  }
  return out;
}

CommandOutput cmd_synth(const RunConfig& cfg, Format format) {
  if (!cfg.data.synthetic) throw ConfigError("synth needs a [synthetic] section");
  auto spec = *cfg.data.synthetic;
  if (!cfg.data.synthetic_seed_set) spec.seed = cfg.root_seed();
  const auto synth = generate(spec);
  const auto& d = synth.data;
  std::ostringstream csv;
  for (const auto& name : d.feature_names()) csv << name << ',';
  csv << "target\n";
  for (Index r = 0; r < d.rows(); ++r) {
    for (Index c = 0; c < d.cols(); ++c) csv << format_double(d.features()(r, c)) << ',';
    csv << (d.target()(r) > 0.5 ? 1 : 0) << '\n';
  }
  CommandOutput out;
  add(out, "synthetic.csv", csv.str());
  if (wants_json(format) || format == Format::kCsv) {
    Json weights = Json::object();
    for (Index c = 0; c < d.cols(); ++c) weights[d.feature_names()[static_cast<std::size_t>(c)]] = synth.true_weights(c);
    Json interactions = Json::array();
    for (const auto& t : spec.interaction_pairs) {
      interactions.push_back(Json{{"first", d.feature_names()[static_cast<std::size_t>(t.first)]},
                                  {"second", d.feature_names()[static_cast<std::size_t>(t.second)]},
                                  {"strength", t.strength}});
    }
    add(out, "ground_truth.json", dump(Json{{"seed", spec.seed},
                                            {"n_samples", spec.n_samples},
                                            {"intercept", spec.intercept},
                                            {"base_rate", d.base_rate()},
                                            {"weights", std::move(weights)},
                                            {"blocks", format_blocks(spec.correlation_blocks)},
                                            {"interactions", std::move(interactions)}}));
  }
  out.summary.push_back("wrote " + std::to_string(d.rows()) + " rows x " + std::to_string(d.cols()) +
                        " features, base rate " + format_double(d.base_rate()));
  return out;
}

void write_outputs(const CommandOutput& output, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  try {
    for (const auto& file : output.files) {
      const fs::path target = dir / file.name;
      fs::create_directories(target.parent_path());
      const fs::path tmp = target.string() + ".partial";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << file.content;
        if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
      }
      written.push_back(tmp);
    }
    for (const auto& file : output.files) {
      const fs::path target = dir / file.name;
      fs::rename(target.string() + ".partial", target);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

int run_command(const std::string& command, RunConfig cfg, Format format, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.output.empty()) throw ConfigError("no output directory: set 'output = <dir>' or pass --out");
    CommandOutput result;
    if (command == "rank") {
      result = cmd_rank(cfg, format);
    } else if (command == "complexity") {
      result = cmd_complexity(cfg, format);
    } else if (command == "select") {
      result = cmd_select(cfg, format);
    } else if (command == "faithfulness") {
      result = cmd_faithfulness(cfg, format);
    } else if (command == "curves") {
      result = cmd_curves(cfg, format);
    } else if (command == "synth") {
      result = cmd_synth(cfg, format);
    } else {
      throw ConfigError("unknown command '" + command + "'; valid commands: " + join(command_names()));
    }
    add(result, "resolved_config.ini", resolved_config(cfg));
    write_outputs(result, cfg.output);
    for (const auto& line : result.summary) out << line << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rankbench
