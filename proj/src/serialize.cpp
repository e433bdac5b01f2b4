#include "rankbench/serialize.hpp"

#include <charconv>
#include <sstream>

namespace rankbench {

namespace {

template <typename T>
Json array_of(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x);
  return out;
}

template <typename T>
std::vector<T> std_from_json(const Json& j) {
  return j.get<std::vector<T>>();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json tree_to_json(const DecisionTree& t) {
  return Json{{"feature", array_of(t.feature)},   {"threshold", array_of(t.threshold)},
              {"left", array_of(t.left)},         {"right", array_of(t.right)},
              {"value", array_of(t.value)},       {"weight", array_of(t.weight)},
              {"impurity", array_of(t.impurity)}};
}

DecisionTree tree_from_json(const Json& j) {
  DecisionTree t;
  t.feature = std_from_json<int>(j.at("feature"));
  t.threshold = std_from_json<double>(j.at("threshold"));
  t.left = std_from_json<int>(j.at("left"));
  t.right = std_from_json<int>(j.at("right"));
  t.value = std_from_json<double>(j.at("value"));
  t.weight = std_from_json<double>(j.at("weight"));
  t.impurity = std_from_json<double>(j.at("impurity"));
  const auto n = t.feature.size();
  if (t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n ||
      t.weight.size() != n || t.impurity.size() != n || n == 0) {
    throw InvalidArgument("tree JSON: node arrays differ in length or are empty");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool leaf = t.left[i] < 0;
    if (!leaf && (t.left[i] >= static_cast<int>(n) || t.right[i] < 0 || t.right[i] >= static_cast<int>(n) ||
                  t.left[i] <= static_cast<int>(i) || t.right[i] <= static_cast<int>(i))) {
      throw InvalidArgument("tree JSON: invalid child index at node " + std::to_string(i));
    }
  }
  return t;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string dump(const Json& j) {
  return j.dump(2) + "\n";
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Json to_json(const ModelConfig& cfg) {
  if (const auto* lr = std::get_if<LogRegConfig>(&cfg)) {
    return Json{{"kind", "logreg"}, {"C", lr->C}, {"l1_ratio", lr->l1_ratio},
                {"max_iter", lr->max_iter}, {"tol", lr->tol}, {"seed", lr->seed}};
  }
  const auto& f = std::get<ForestConfig>(cfg);
  return Json{{"kind", "forest"},
              {"n_trees", f.n_trees},
              {"max_depth", f.max_depth},
              {"max_features", f.max_features},
              {"min_samples_leaf", f.min_samples_leaf},
              {"min_samples_split", f.min_samples_split},
              {"criterion", f.criterion},
              {"class_weight", f.class_weight == ClassWeight::kBalanced ? "balanced" : "none"},
              {"bootstrap", f.bootstrap},
              {"seed", f.seed}};
}

ModelConfig model_config_from_json(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "logreg") {
    LogRegConfig c;
    c.C = j.at("C").get<double>();
    c.l1_ratio = j.at("l1_ratio").get<double>();
    c.max_iter = j.at("max_iter").get<int>();
    c.tol = j.at("tol").get<double>();
    c.seed = j.value("seed", std::uint64_t{0});
    return c;
  }
  if (kind == "forest") {
    ForestConfig c;
    c.n_trees = j.at("n_trees").get<int>();
    c.max_depth = j.at("max_depth").get<int>();
    c.max_features = j.at("max_features").get<int>();
    c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    c.min_samples_split = j.at("min_samples_split").get<int>();
    c.criterion = j.at("criterion").get<std::string>();
    c.class_weight = j.at("class_weight").get<std::string>() == "none" ? ClassWeight::kNone : ClassWeight::kBalanced;
    c.bootstrap = j.at("bootstrap").get<bool>();
    c.seed = j.value("seed", std::uint64_t{0});
    return c;
  }
  throw InvalidArgument("model config JSON: unknown kind '" + kind + "'");
}

Json to_json(const Predictor& p) {
  Json out{{"feature_names", array_of(p.feature_names())}};
  if (p.kind() == ModelKind::kLogReg) {
    const auto& m = p.logreg();
    out["kind"] = "logreg";
    out["mean"] = to_json(m.mean);
    out["scale"] = to_json(m.scale);
    out["coefficients"] = to_json(m.coefficients);
    out["intercept"] = m.intercept;
    out["converged"] = m.converged;
    out["iterations"] = m.iterations;
  } else {
    out["kind"] = "forest";
    Json trees = Json::array();
    for (const auto& t : p.forest().trees) trees.push_back(tree_to_json(t));
    out["trees"] = std::move(trees);
  }
  return out;
}

Predictor predictor_from_json(const Json& j) {
  auto names = std_from_json<std::string>(j.at("feature_names"));
  const auto p = static_cast<Index>(names.size());
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "logreg") {
    LogisticModel m;
    m.mean = vector_from_json(j.at("mean"));
    m.scale = vector_from_json(j.at("scale"));
    m.coefficients = vector_from_json(j.at("coefficients"));
    m.intercept = j.at("intercept").get<double>();
    m.converged = j.at("converged").get<bool>();
    m.iterations = j.at("iterations").get<int>();
    if (m.mean.size() != p || m.scale.size() != p || m.coefficients.size() != p) {
      throw InvalidArgument("logistic model JSON: parameter lengths do not match the feature count");
    }
    return Predictor(std::move(m), std::move(names));
  }
  if (kind == "forest") {
    ForestModel m;
    for (const auto& t : j.at("trees")) {
      m.trees.push_back(tree_from_json(t));
      for (std::size_t i = 0; i < m.trees.back().size(); ++i) {
        if (m.trees.back().left[i] >= 0 && (m.trees.back().feature[i] < 0 || m.trees.back().feature[i] >= p)) {
          throw InvalidArgument("tree JSON: split feature out of range");
        }
      }
    }
    if (m.trees.empty()) throw InvalidArgument("forest JSON: no trees");
    return Predictor(std::move(m), std::move(names));
  }
  throw InvalidArgument("predictor JSON: unknown kind '" + kind + "'");
}

Json to_json(const RankingScorecard& card) {
  return Json{{"method", card.method},
              {"kind", card.kind == ScoreKind::kImportance ? "importance" : "relevance"},
              {"n_repeats", card.n_repeats},
              {"seed", card.seed},
              {"feature_names", array_of(card.feature_names)},
              {"scores", to_json(card.scores)},
              {"ranks", array_of(card.ranks)}};
}

RankingScorecard scorecard_from_json(const Json& j) {
  RankingScorecard card;
  card.method = j.at("method").get<std::string>();
  card.kind = j.at("kind").get<std::string>() == "relevance" ? ScoreKind::kRelevance : ScoreKind::kImportance;
  card.n_repeats = j.at("n_repeats").get<int>();
  card.seed = j.at("seed").get<std::uint64_t>();
  card.feature_names = std_from_json<std::string>(j.at("feature_names"));
  card.scores = vector_from_json(j.at("scores"));
  card.ranks = std_from_json<int>(j.at("ranks"));
  if (card.scores.size() != static_cast<Index>(card.feature_names.size()) ||
      card.ranks.size() != card.feature_names.size()) {
    throw InvalidArgument("scorecard JSON: lengths do not match");
  }
  return card;
}

Json to_json(const AggregatedRanking& agg) {
  Json features = Json::array();
  for (std::size_t i = 0; i < agg.feature_names.size(); ++i) {
    const auto r = static_cast<Index>(i);
    Json ranks = Json::object();
    for (std::size_t m = 0; m < agg.methods.size(); ++m) ranks[agg.methods[m]] = agg.ranks(r, static_cast<Index>(m));
    features.push_back(Json{{"feature", agg.feature_names[i]},
                            {"median_rank", agg.median(r)},
                            {"iqr", agg.iqr(r)},
                            {"n_methods", agg.methods.size()},
                            {"ranks", std::move(ranks)}});
  }
  return Json{{"methods", array_of(agg.methods)}, {"features", std::move(features)}};
}

Json to_json(const AleCurve& curve) {
  return Json{{"feature", curve.feature},
              {"bin_edges", to_json(curve.bin_edges)},
              {"bin_centers", to_json(curve.bin_centers)},
              {"values", to_json(curve.values)},
              {"edge_values", to_json(curve.edge_values)},
              {"bin_counts", to_json(curve.bin_counts)},
              {"center_constant", curve.center_constant},
              {"variance", curve.variance}};
}

Json to_json(const ComplexityReport& report) {
  Json per_feature = Json::object();
  for (const auto& [name, value] : report.per_feature_mec) per_feature[name] = value;
  return Json{{"ias_mean", report.ias_mean}, {"ias_sd", report.ias_sd},
              {"mec_mean", report.mec_mean}, {"mec_sd", report.mec_sd},
              {"n_boot", report.n_boot},     {"per_feature_mec", std::move(per_feature)}};
}

Json to_json(const PerformanceDiagram& diagram) {
  return Json{{"thresholds", to_json(diagram.thresholds)},
              {"pod", to_json(diagram.pod)},
              {"sr", to_json(diagram.sr)},
              {"csi", to_json(diagram.csi)}};
}

Json to_json(const FitStats& stats) {
  return Json{{"kendall_tau", stats.kendall_tau}, {"log_pearson", stats.log_pearson},
              {"r2", stats.r2},                   {"mse", stats.mse},
              {"n", stats.n}};
}

Json to_json(const Interval& interval) {
  return Json::array({interval.low, interval.high});
}

Json to_json(const MetricTable& table) {
  return Json{{"naupdc", table.naupdc}, {"ncsi", table.ncsi}, {"auc", table.auc}, {"bss", table.bss}};
}

Json to_json(const FaithfulnessReport& report) {
  Json stats = Json::object();
  for (std::size_t m = 0; m < report.methods.size(); ++m) stats[report.methods[m]] = to_json(report.fit_stats[m]);
  Json records = Json::array();
  for (const auto& r : report.records) {
    records.push_back(Json{{"subset", array_of(r.subset)},
                           {"size", r.subset_size},
                           {"performance", r.performance},
                           {"raw_total", to_json(r.raw_total)},
                           {"scaled_total", to_json(r.scaled_total)}});
  }
  return Json{{"metric", report.metric},
              {"seed", report.seed},
              {"n_features", report.n_features},
              {"n_subsets", report.n_subsets},
              {"failures", report.failures},
              {"model", to_json(report.model)},
              {"methods", array_of(report.methods)},
              {"fit_stats", std::move(stats)},
              {"records", std::move(records)}};
}

Json to_json(const std::vector<ParetoPoint>& curve) {
  Json out = Json::array();
  for (const auto& p : curve) {
    out.push_back(Json{{"subset_size", p.subset_size}, {"count", p.count}, {"mean", p.mean},
                       {"q10", p.q10}, {"q90", p.q90}});
  }
  return out;
}

Json to_json(const TopBottomResult& result) {
  return Json{{"delta", result.delta},
              {"ci", to_json(result.ci)},
              {"top_performance", result.top_performance},
              {"bottom_performance", result.bottom_performance},
              {"top", array_of(result.top)},
              {"bottom", array_of(result.bottom)}};
}

Json to_json(const IncrementalCurves& curves) {
  return Json{{"best", to_json(curves.best)}, {"worst", to_json(curves.worst)}};
}

Json to_json(const SelectionReport& report) {
  return Json{{"C", report.C},
              {"cutoff", report.cutoff},
              {"retained", array_of(report.retained)},
              {"dropped_manual", array_of(report.dropped_manual)},
              {"dropped_l1", array_of(report.dropped_l1)},
              {"n_boot", report.n_boot},
              {"before", to_json(report.before)},
              {"after", to_json(report.after)},
              {"naupdc_difference", report.naupdc_difference},
              {"naupdc_difference_ci", to_json(report.naupdc_difference_ci)},
              {"complexity_before", to_json(report.complexity_before)},
              {"complexity_after", to_json(report.complexity_after)}};
}

std::string scorecards_csv(const AggregatedRanking& agg, std::span<const RankingScorecard> cards) {
  std::ostringstream out;
  out << "feature,method,score,rank,median,iqr\n";
  for (std::size_t i = 0; i < agg.feature_names.size(); ++i) {
    const auto& name = agg.feature_names[i];
    for (const auto& card : cards) {
      const auto it = std::find(card.feature_names.begin(), card.feature_names.end(), name);
      if (it == card.feature_names.end()) continue;
      const auto k = static_cast<std::size_t>(it - card.feature_names.begin());
      out << csv_field(name) << ',' << csv_field(card.method) << ',' << format_double(card.scores(static_cast<Index>(k)))
          << ',' << card.ranks[k] << ',' << format_double(agg.median(static_cast<Index>(i))) << ','
          << format_double(agg.iqr(static_cast<Index>(i))) << '\n';
    }
  }
  return out.str();
}

std::string records_csv(const FaithfulnessReport& report) {
  std::ostringstream out;
  out << "subset,size,performance";
  for (const auto& m : report.methods) out << ',' << csv_field(m);
  out << '\n';
  for (const auto& r : report.records) {
    std::string joined;
    for (std::size_t i = 0; i < r.subset.size(); ++i) joined += (i ? "|" : "") + r.subset[i];
    out << csv_field(joined) << ',' << r.subset_size << ',' << format_double(r.performance);
    for (Index m = 0; m < r.scaled_total.size(); ++m) out << ',' << format_double(r.scaled_total(m));
    out << '\n';
  }
  return out.str();
}

std::string ale_csv(const AleCurve& curve) {
  std::ostringstream out;
  out << "bin_center,value\n";
  for (Index b = 0; b < curve.bin_centers.size(); ++b) {
    out << format_double(curve.bin_centers(b)) << ',' << format_double(curve.values(b)) << '\n';
  }
  return out.str();
}

}  // namespace rankbench
