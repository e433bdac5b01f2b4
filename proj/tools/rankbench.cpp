// Command-line front end: rank, complexity, select, faithfulness, curves, synth.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <thread>

#include "rankbench/commands.hpp"
#include "rankbench/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Feature-ranking explanations, model complexity and faithfulness benchmarks"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string format = "all";

  const std::vector<std::pair<std::string, std::string>> commands{
      {"rank", "Compute ranking scorecards and their median-rank aggregate"},
      {"complexity", "ALE curves plus interaction strength and main effect complexity"},
      {"select", "Manual drop, L1 selection and full-vs-reduced comparison"},
      {"faithfulness", "Subset-retraining faithfulness benchmark"},
      {"curves", "Top-k/bottom-k and incremental feature-set curves"},
      {"synth", "Write a synthetic dataset and its ground-truth weights"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_option("--seed", seed, "Root seed (overrides the config)");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "Outputs to write")->check(CLI::IsMember({"json", "csv", "svg", "all"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  rankbench::RunConfig cfg;
  try {
    cfg = rankbench::load_config(config_path);
  } catch (const rankbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.output = out_dir;
  rankbench::set_worker_count(static_cast<int>(workers));
  return rankbench::run_command(command, std::move(cfg), rankbench::parse_format(format), std::cout, std::cerr);
}
