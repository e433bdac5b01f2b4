#include "rankbench/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rankbench {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string qualified(const std::string& section, const std::string& key) {
  return (section.empty() ? "" : section + ".") + key;
}

double parse_number(const std::string& text, const std::string& context, int line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(context + ": expected a number, got '" + text + "'", line);
  return v;
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string join(const std::vector<std::string>& items, const std::string& sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::vector<Index> parse_index_group(const std::string& text, const std::string& context, int line) {
  std::vector<Index> out;
  for (const auto& part : split_on(text, '-')) {
    const double v = parse_number(part, context, line);
    if (v < 0 || v != static_cast<double>(static_cast<Index>(v))) {
      throw ConfigError(context + ": feature index '" + part + "' is not a non-negative integer", line);
    }
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

std::vector<CorrelationBlock> parse_blocks(const std::string& text, const std::string& context, int line) {
  std::vector<CorrelationBlock> blocks;
  for (const auto& item : split_on(text, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(context + ": block '" + item + "' needs the form i-j:rho", line);
    CorrelationBlock b;
    b.features = parse_index_group(item.substr(0, colon), context, line);
    if (b.features.size() < 2) throw ConfigError(context + ": block '" + item + "' needs at least two features", line);
    b.rho = parse_number(trim(item.substr(colon + 1)), context, line);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

std::vector<InteractionTerm> parse_interactions(const std::string& text, const std::string& context, int line) {
  std::vector<InteractionTerm> terms;
  for (const auto& item : split_on(text, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(context + ": interaction '" + item + "' needs the form i-j:strength", line);
    }
    const auto idx = parse_index_group(item.substr(0, colon), context, line);
    if (idx.size() != 2) throw ConfigError(context + ": interaction '" + item + "' needs exactly two features", line);
    terms.push_back({idx[0], idx[1], parse_number(trim(item.substr(colon + 1)), context, line)});
  }
  return terms;
}

template <typename T>
void assign(std::optional<T> v, T& dst) {
  if (v) dst = *v;
}

int to_int(std::optional<long long> v, int fallback) {
  return v ? static_cast<int>(*v) : fallback;
}

int line_of(const ConfigDocument& doc, const std::string& section, const std::string& key) {
  const auto* e = doc.find(section, key);
  return e ? e->line : 0;
}

ModelConfig read_model(const ConfigDocument& doc, const std::string& section, const ModelConfig& base) {
  const std::string kind = doc.get_string(section, "kind").value_or(
      std::holds_alternative<LogRegConfig>(base) ? "logreg" : "forest");
  if (kind == "logreg") {
    LogRegConfig cfg = std::holds_alternative<LogRegConfig>(base) ? std::get<LogRegConfig>(base) : LogRegConfig{};
    assign(doc.get_double(section, "C"), cfg.C);
    assign(doc.get_double(section, "l1_ratio"), cfg.l1_ratio);
    cfg.max_iter = to_int(doc.get_int(section, "max_iter"), cfg.max_iter);
    assign(doc.get_double(section, "tol"), cfg.tol);
    return cfg;
  }
  if (kind == "forest") {
    ForestConfig cfg = std::holds_alternative<ForestConfig>(base) ? std::get<ForestConfig>(base) : ForestConfig{};
    cfg.n_trees = to_int(doc.get_int(section, "n_trees"), cfg.n_trees);
    cfg.max_depth = to_int(doc.get_int(section, "max_depth"), cfg.max_depth);
    cfg.max_features = to_int(doc.get_int(section, "max_features"), cfg.max_features);
    cfg.min_samples_leaf = to_int(doc.get_int(section, "min_samples_leaf"), cfg.min_samples_leaf);
    cfg.min_samples_split = to_int(doc.get_int(section, "min_samples_split"), cfg.min_samples_split);
    assign(doc.get_string(section, "criterion"), cfg.criterion);
    if (auto cw = doc.get_string(section, "class_weight")) {
      if (*cw == "balanced") {
        cfg.class_weight = ClassWeight::kBalanced;
      } else if (*cw == "none") {
        cfg.class_weight = ClassWeight::kNone;
      } else {
        throw ConfigError(section + ".class_weight: expected 'balanced' or 'none', got '" + *cw + "'",
                          line_of(doc, section, "class_weight"));
      }
    }
    assign(doc.get_bool(section, "bootstrap"), cfg.bootstrap);
    return cfg;
  }
  throw ConfigError(section + ".kind: expected 'logreg' or 'forest', got '" + kind + "'", line_of(doc, section, "kind"));
}

void check_model(const ModelConfig& m, const std::string& section) {
  try {
    std::visit([](const auto& c) { c.validate(); }, m);
  } catch (const InvalidArgument& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

std::string model_text(const ModelConfig& m) {
  std::ostringstream out;
  if (const auto* lr = std::get_if<LogRegConfig>(&m)) {
    out << "kind = logreg\nC = " << fmt(lr->C) << "\nl1_ratio = " << fmt(lr->l1_ratio)
        << "\nmax_iter = " << lr->max_iter << "\ntol = " << fmt(lr->tol) << "\n";
  } else {
    const auto& f = std::get<ForestConfig>(m);
    out << "kind = forest\nn_trees = " << f.n_trees << "\nmax_depth = " << f.max_depth
        << "\nmax_features = " << f.max_features << "\nmin_samples_leaf = " << f.min_samples_leaf
        << "\nmin_samples_split = " << f.min_samples_split << "\ncriterion = " << f.criterion
        << "\nclass_weight = " << (f.class_weight == ClassWeight::kBalanced ? "balanced" : "none")
        << "\nbootstrap = " << (f.bootstrap ? "true" : "false") << "\n";
  }
  return out.str();
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line)
    : InvalidArgument(line > 0 && message.rfind("line ", 0) != 0 ? "line " + std::to_string(line) + ": " + message
                                                                : message),
      line_(line) {}

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  doc.sections_[""];
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // '#' starts a comment anywhere; ';' only at the start of a line, since
    // synthetic block lists use it as a separator.
    std::string content = raw.substr(0, raw.find('#'));
    if (trim(content).rfind(';', 0) == 0) content.clear();
    content = trim(content);
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']') throw ConfigError("unterminated section header '" + content + "'", line);
      section = trim(content.substr(1, content.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line);
      if (doc.section_lines_.count(section)) throw ConfigError("duplicate section [" + section + "]", line);
      doc.section_lines_[section] = line;
      doc.sections_[section];
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + content + "'", line);
    const std::string key = trim(content.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    auto& entries = doc.sections_[section];
    if (entries.count(key)) {
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(entries[key].line) + ")",
                        line);
    }
    entries[key] = Entry{trim(content.substr(eq + 1)), line, false};
  }
  return doc;
}

bool ConfigDocument::has_section(const std::string& section) const {
  return section_lines_.count(section) > 0;
}

const ConfigDocument::Entry* ConfigDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto e = s->second.find(key);
  if (e == s->second.end()) return nullptr;
  e->second.used = true;
  return &e->second;
}

std::optional<std::string> ConfigDocument::get_string(const std::string& section, const std::string& key) const {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> ConfigDocument::get_double(const std::string& section, const std::string& key) const {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  return parse_number(e->value, qualified(section, key), e->line);
}

std::optional<long long> ConfigDocument::get_int(const std::string& section, const std::string& key) const {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  long long v = 0;
  const char* end = e->value.data() + e->value.size();
  const auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(qualified(section, key) + ": expected an integer, got '" + e->value + "'", e->line);
  }
  return v;
}

std::optional<bool> ConfigDocument::get_bool(const std::string& section, const std::string& key) const {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  throw ConfigError(qualified(section, key) + ": expected true or false, got '" + e->value + "'", e->line);
}

std::optional<std::vector<std::string>> ConfigDocument::get_list(const std::string& section,
                                                                 const std::string& key) const {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  return split_on(e->value, ',');
}

void ConfigDocument::reject_unused() const {
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!entry.used) {
        throw ConfigError("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"), entry.line);
      }
    }
  }
}

std::uint64_t RunConfig::root_seed() const {
  if (!seed) throw ConfigError("seed is mandatory: set 'seed = <integer>' or pass --seed");
  return *seed;
}

void RunConfig::validate() const {
  root_seed();
  if (data.csv.empty() && !data.synthetic) throw ConfigError("no data source: add a [data] csv or a [synthetic] section");
  if (!data.csv.empty() && data.synthetic) throw ConfigError("both [data] csv and [synthetic] are set; choose one");
  if (data.synthetic) {
    try {
      data.synthetic->validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("[synthetic]: ") + e.what());
    }
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("data.test_fraction must lie in (0, 1)");
  check_model(model, "[model]");
  if (reduced_model) check_model(*reduced_model, "[model.reduced]");
  const auto& valid = ranking_methods();
  for (const auto& m : rank.methods) {
    if (std::find(valid.begin(), valid.end(), m) == valid.end()) {
      throw ConfigError("unknown ranking method '" + m + "'; valid methods: " + join(valid));
    }
  }
  for (const auto& m : rank.top3) {
    if (std::find(rank.methods.begin(), rank.methods.end(), m) == rank.methods.end()) {
      throw ConfigError("rank.top3 names '" + m + "', which is not in rank.methods");
    }
  }
  if (!rank.top3.empty() && rank.top3.size() != 3) throw ConfigError("rank.top3 must name exactly three methods");
  const auto& o = rank.options;
  if (o.n_permute < 1 || o.n_permute_multipass < 1 || o.shap_samples < 1 || o.shap_instances < 1 ||
      o.sage_samples < 1 || o.lime_perturb < 2 || o.lime_instances < 1 || o.background_size < 1 || o.ale_bins < 1) {
    throw ConfigError("[rank]: sample counts must be positive");
  }
  if (rank.top_k < 1) throw ConfigError("rank.top_k must be positive");
  const auto& e = experiment;
  if (e.n_subsets < 1 || e.k < 1 || e.k_max < 1 || e.n_boot < 1 || e.ci_boot < 1 || e.degree < 1) {
    throw ConfigError("[experiment]: counts must be positive");
  }
  if (complexity.n_bins < 1 || complexity.n_boot < 1 || !(complexity.epsilon > 0 && complexity.epsilon < 1)) {
    throw ConfigError("[complexity]: n_bins and n_boot must be positive and epsilon in (0, 1)");
  }
  if (!(select.C > 0) || !(select.cutoff >= 0) || select.n_boot < 1) {
    throw ConfigError("[select]: C must be positive, cutoff non-negative and n_boot positive");
  }
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const auto doc = ConfigDocument::parse(text);
  RunConfig cfg;
  if (const auto* e = doc.find("", "seed")) {
    unsigned long long v = 0;
    const char* end = e->value.data() + e->value.size();
    const auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("seed: expected a non-negative integer", e->line);
    cfg.seed = v;
  }
  if (auto out = doc.get_string("", "output")) cfg.output = *out;

  if (auto csv = doc.get_string("data", "csv")) {
    std::filesystem::path p = *csv;
    cfg.data.csv = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  assign(doc.get_string("data", "target"), cfg.data.target);
  assign(doc.get_double("data", "test_fraction"), cfg.test_fraction);

  if (doc.has_section("synthetic")) {
    SyntheticSpec s;
    s.n_samples = doc.get_int("synthetic", "n_samples").value_or(s.n_samples);
    const auto weights = doc.get_list("synthetic", "weights");
    const auto pareto = doc.get_int("synthetic", "pareto");
    const double first = doc.get_double("synthetic", "pareto_first").value_or(4.0);
    if (weights && pareto) {
      throw ConfigError("[synthetic]: set either weights or pareto, not both", line_of(doc, "synthetic", "pareto"));
    }
    if (weights) {
      const int line = line_of(doc, "synthetic", "weights");
      for (const auto& w : *weights) s.signal_weights.push_back(parse_number(w, "synthetic.weights", line));
    } else if (pareto) {
      s.signal_weights = pareto_weights(static_cast<Index>(*pareto), first);
    }
    s.noise_features = doc.get_int("synthetic", "noise_features").value_or(0);
    if (auto b = doc.get_string("synthetic", "blocks")) {
      s.correlation_blocks = parse_blocks(*b, "synthetic.blocks", line_of(doc, "synthetic", "blocks"));
    }
    if (auto t = doc.get_string("synthetic", "interactions")) {
      s.interaction_pairs = parse_interactions(*t, "synthetic.interactions", line_of(doc, "synthetic", "interactions"));
    }
    s.intercept = doc.get_double("synthetic", "intercept").value_or(0.0);
    if (auto sd = doc.get_int("synthetic", "seed")) {
      s.seed = static_cast<std::uint64_t>(*sd);
      cfg.data.synthetic_seed_set = true;
    }
    cfg.data.synthetic = s;
  }

  cfg.model = read_model(doc, "model", cfg.model);
  if (doc.has_section("model.reduced")) cfg.reduced_model = read_model(doc, "model.reduced", cfg.model);

  auto& r = cfg.rank;
  assign(doc.get_list("rank", "methods"), r.methods);
  if (auto m = doc.get_string("rank", "metric")) {
    try {
      r.options.metric = parse_metric(*m);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("rank.metric: ") + e.what(), line_of(doc, "rank", "metric"));
    }
  }
  r.options.n_permute = to_int(doc.get_int("rank", "n_permute"), r.options.n_permute);
  r.options.n_permute_multipass = to_int(doc.get_int("rank", "n_permute_multipass"), r.options.n_permute_multipass);
  r.options.shap_samples = to_int(doc.get_int("rank", "shap_samples"), r.options.shap_samples);
  r.options.shap_instances = to_int(doc.get_int("rank", "shap_instances"), r.options.shap_instances);
  r.options.sage_samples = to_int(doc.get_int("rank", "sage_samples"), r.options.sage_samples);
  assign(doc.get_string("rank", "sage_loss"), r.options.sage_loss);
  r.options.lime_perturb = to_int(doc.get_int("rank", "lime_perturb"), r.options.lime_perturb);
  r.options.lime_instances = to_int(doc.get_int("rank", "lime_instances"), r.options.lime_instances);
  assign(doc.get_double("rank", "lime_kernel_width"), r.options.lime_kernel_width);
  r.options.background_size = to_int(doc.get_int("rank", "background_size"), r.options.background_size);
  r.options.ale_bins = to_int(doc.get_int("rank", "ale_bins"), r.options.ale_bins);
  assign(doc.get_bool("rank", "use_test_data"), r.use_test_data);
  r.top_k = to_int(doc.get_int("rank", "top_k"), r.top_k);
  assign(doc.get_list("rank", "top3"), r.top3);

  auto& e = cfg.experiment;
  e.n_subsets = to_int(doc.get_int("experiment", "n_subsets"), e.n_subsets);
  e.k = to_int(doc.get_int("experiment", "k"), e.k);
  e.k_max = to_int(doc.get_int("experiment", "k_max"), e.k_max);
  e.n_boot = to_int(doc.get_int("experiment", "n_boot"), e.n_boot);
  e.ci_boot = to_int(doc.get_int("experiment", "ci_boot"), e.ci_boot);
  e.degree = to_int(doc.get_int("experiment", "degree"), e.degree);
  if (auto m = doc.get_string("experiment", "metric")) {
    try {
      e.metric = parse_metric(*m);
    } catch (const InvalidArgument& err) {
      throw ConfigError(std::string("experiment.metric: ") + err.what(), line_of(doc, "experiment", "metric"));
    }
  } else {
    e.metric = r.options.metric;
  }

  auto& c = cfg.complexity;
  c.n_bins = to_int(doc.get_int("complexity", "n_bins"), c.n_bins);
  c.n_boot = to_int(doc.get_int("complexity", "n_boot"), c.n_boot);
  assign(doc.get_double("complexity", "epsilon"), c.epsilon);

  auto& s = cfg.select;
  assign(doc.get_double("select", "C"), s.C);
  assign(doc.get_double("select", "cutoff"), s.cutoff);
  assign(doc.get_list("select", "manual_drop"), s.manual_drop);
  assign(doc.get_double("select", "corr_threshold"), s.corr_threshold);
  s.n_boot = to_int(doc.get_int("select", "n_boot"), s.n_boot);

  doc.reject_unused();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

std::string format_blocks(const std::vector<CorrelationBlock>& blocks) {
  std::vector<std::string> items;
  for (const auto& b : blocks) {
    std::vector<std::string> idx;
    for (Index i : b.features) idx.push_back(std::to_string(i));
    items.push_back(join(idx, "-") + ":" + fmt(b.rho));
  }
  return join(items, "; ");
}

std::string format_interactions(const std::vector<InteractionTerm>& terms) {
  std::vector<std::string> items;
  for (const auto& t : terms) {
    items.push_back(std::to_string(t.first) + "-" + std::to_string(t.second) + ":" + fmt(t.strength));
  }
  return join(items, "; ");
}

std::string resolved_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "seed = " << cfg.root_seed() << "\n";
  out << "\n[data]\n";
  if (!cfg.data.csv.empty()) out << "csv = " << cfg.data.csv.string() << "\ntarget = " << cfg.data.target << "\n";
  out << "test_fraction = " << fmt(cfg.test_fraction) << "\n";
  if (cfg.data.synthetic) {
    const auto& s = *cfg.data.synthetic;
    std::vector<std::string> w;
    for (double v : s.signal_weights) w.push_back(fmt(v));
    out << "\n[synthetic]\nn_samples = " << s.n_samples << "\nweights = " << join(w)
        << "\nnoise_features = " << s.noise_features;
    if (!s.correlation_blocks.empty()) out << "\nblocks = " << format_blocks(s.correlation_blocks);
    if (!s.interaction_pairs.empty()) out << "\ninteractions = " << format_interactions(s.interaction_pairs);
    out << "\nintercept = " << fmt(s.intercept)
        << "\nseed = " << (cfg.data.synthetic_seed_set ? s.seed : cfg.root_seed()) << "\n";
  }
  out << "\n[model]\n" << model_text(cfg.model);
  if (cfg.reduced_model) out << "\n[model.reduced]\n" << model_text(*cfg.reduced_model);
  const auto& r = cfg.rank;
  const auto& o = r.options;
  out << "\n[rank]\nmethods = " << join(r.methods) << "\nmetric = " << metric_name(o.metric)
      << "\nn_permute = " << o.n_permute << "\nn_permute_multipass = " << o.n_permute_multipass
      << "\nshap_samples = " << o.shap_samples << "\nshap_instances = " << o.shap_instances
      << "\nsage_samples = " << o.sage_samples << "\nsage_loss = " << o.sage_loss
      << "\nlime_perturb = " << o.lime_perturb << "\nlime_instances = " << o.lime_instances
      << "\nlime_kernel_width = " << fmt(o.lime_kernel_width) << "\nbackground_size = " << o.background_size
      << "\nale_bins = " << o.ale_bins << "\nuse_test_data = " << (r.use_test_data ? "true" : "false")
      << "\ntop_k = " << r.top_k << "\n";
  if (!r.top3.empty()) out << "top3 = " << join(r.top3) << "\n";
  const auto& e = cfg.experiment;
  out << "\n[experiment]\nn_subsets = " << e.n_subsets << "\nk = " << e.k << "\nk_max = " << e.k_max
      << "\nn_boot = " << e.n_boot << "\nci_boot = " << e.ci_boot << "\ndegree = " << e.degree
      << "\nmetric = " << metric_name(e.metric) << "\n";
  const auto& c = cfg.complexity;
  out << "\n[complexity]\nn_bins = " << c.n_bins << "\nn_boot = " << c.n_boot << "\nepsilon = " << fmt(c.epsilon)
      << "\n";
  const auto& s = cfg.select;
  out << "\n[select]\nC = " << fmt(s.C) << "\ncutoff = " << fmt(s.cutoff) << "\nmanual_drop = " << join(s.manual_drop)
      << "\ncorr_threshold = " << fmt(s.corr_threshold) << "\nn_boot = " << s.n_boot << "\n";
  return out.str();
}

Dataset load_data(const RunConfig& cfg) {
  if (cfg.data.synthetic) {
    auto spec = *cfg.data.synthetic;
    if (!cfg.data.synthetic_seed_set) spec.seed = cfg.root_seed();
    return generate(spec).data;
  }
  if (cfg.data.csv.empty()) throw ConfigError("no data source: add a [data] csv or a [synthetic] section");
  return load_csv(cfg.data.csv, cfg.data.target);
}

}  // namespace rankbench
