#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "twophase/io.hpp"

namespace twophase::cli {

using io::json;

enum ExitCode : int { kPass = 0, kUsage = 1, kConfig = 2, kCheckFailed = 3, kNonConvergence = 4 };

inline constexpr const char* kCommands[] = {"k-profile",   "dispersion",   "verify-bounds",
                                            "mode-response", "kernel-check", "norms"};

/// Fully resolved run: defaults, then the config file, then flags.
struct RunConfig {
  std::string command;
  FluidParams params{1.0, 2.0, 1.0, 1.0, 1.0, 1.0};
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path out = "out";
  json options = json::object();

  /// What goes into output metadata. The output directory is left out so
  /// two runs into different directories stay byte-identical.
  json resolved() const;
};

/// Default option block of a command (the JSON section named after the
/// command with '-' replaced by '_').
json default_options(const std::string& command);

/// `raw` is the parsed config file (or an empty object), `sets` are
/// "section.key=value" overrides applied on top. Throws InvalidConfig.
RunConfig resolve_config(const std::string& command, const json& raw,
                         const std::vector<std::string>& sets);

/// Runs one command, writes its files under cfg.out and returns the exit code.
int run_command(const RunConfig& cfg, std::ostream& log);

/// Maps a library error onto the exit-code contract.
int exit_code_for(ErrorCode code);

/// Full command line entry point (argv[0] included).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twophase::cli
