#ifndef RANKBENCH_COMMANDS_HPP
#define RANKBENCH_COMMANDS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rankbench/config.hpp"

namespace rankbench {

enum class Format { kJson, kCsv, kSvg, kAll };

Format parse_format(const std::string& name);

/// A report held in memory until the whole command has succeeded.
struct OutputFile {
  std::filesystem::path name;  // relative to the output directory
  std::string content;
};

struct CommandOutput {
  std::vector<OutputFile> files;
  std::vector<std::string> summary;  // one line each, printed to stdout
};

CommandOutput cmd_rank(const RunConfig& cfg, Format format);
CommandOutput cmd_complexity(const RunConfig& cfg, Format format);
CommandOutput cmd_select(const RunConfig& cfg, Format format);
CommandOutput cmd_faithfulness(const RunConfig& cfg, Format format);
CommandOutput cmd_curves(const RunConfig& cfg, Format format);
/// Synthetic CSV plus ground-truth weights.
CommandOutput cmd_synth(const RunConfig& cfg, Format format);

const std::vector<std::string>& command_names();

/// Writes every file or none: on any failure the files already written by
/// this call are removed again.
void write_outputs(const CommandOutput& output, const std::filesystem::path& dir);

/// Runs a command end to end and returns the process exit code: 0 on
/// success, 2 for configuration problems (including unknown method names),
/// 1 for any other failure.
int run_command(const std::string& command, RunConfig cfg, Format format, std::ostream& out, std::ostream& err);

}  // namespace rankbench

#endif  // RANKBENCH_COMMANDS_HPP
