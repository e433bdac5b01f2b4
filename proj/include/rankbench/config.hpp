#ifndef RANKBENCH_CONFIG_HPP
#define RANKBENCH_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankbench/dataset.hpp"
#include "rankbench/metrics.hpp"
#include "rankbench/models.hpp"
#include "rankbench/rankings.hpp"

namespace rankbench {

/// Malformed or inconsistent configuration. `line` is 0 when the problem is
/// not tied to a single line (e.g. a missing mandatory key).
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parsed `key = value` text grouped by `[section]` headers; keys before the
/// first header belong to the section "". `#` starts a comment, as does `;`
/// at the start of a line.
class ConfigDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

  static ConfigDocument parse(const std::string& text);

  bool has_section(const std::string& section) const;
  const Entry* find(const std::string& section, const std::string& key) const;

  std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<long long> get_int(const std::string& section, const std::string& key) const;
  std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
  /// Comma-separated values, trimmed, empties skipped.
  std::optional<std::vector<std::string>> get_list(const std::string& section, const std::string& key) const;

  /// Throws on the first key that no getter asked for.
  void reject_unused() const;

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

struct DataSource {
  std::filesystem::path csv;  // empty when synthetic
  std::string target = "target";
  std::optional<SyntheticSpec> synthetic;
  bool synthetic_seed_set = false;  // otherwise the root seed is used
};

struct RankSettings {
  std::vector<std::string> methods;
  RankingOptions options;
  bool use_test_data = false;
  int top_k = 10;
  std::vector<std::string> top3;
};

struct ExperimentSettings {
  int n_subsets = 1000;
  int k = 15;
  int k_max = 15;
  int n_boot = 100;
  int ci_boot = 1000;
  int degree = 5;
  Metric metric = Metric::kNaupdc;
};

struct ComplexitySettings {
  int n_bins = 30;
  int n_boot = 100;
  double epsilon = 0.05;
};

struct SelectSettings {
  double C = 0.0075;
  double cutoff = 1e-5;
  std::vector<std::string> manual_drop;
  double corr_threshold = 0.7;
  int n_boot = 1000;
};

struct RunConfig {
  DataSource data;
  double test_fraction = 0.25;
  ModelConfig model = LogRegConfig{};
  std::optional<ModelConfig> reduced_model;
  RankSettings rank;
  ExperimentSettings experiment;
  ComplexitySettings complexity;
  SelectSettings select;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output;

  std::uint64_t root_seed() const;
  /// Throws ConfigError on inconsistent settings (including a missing seed).
  void validate() const;
};

/// Relative data paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Every setting, defaults included, in the same text format.
std::string resolved_config(const RunConfig& cfg);

/// Synthetic spec fields as config text values, e.g. "0-1:0.9; 2-3-4:0.5".
std::string format_blocks(const std::vector<CorrelationBlock>& blocks);
std::string format_interactions(const std::vector<InteractionTerm>& terms);

/// Materializes the configured dataset.
Dataset load_data(const RunConfig& cfg);

}  // namespace rankbench

#endif  // RANKBENCH_CONFIG_HPP
