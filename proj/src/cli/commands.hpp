#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skpower::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitRuntime = 2,
  kExitBelowThreshold = 3,
};

/// Largest row count cmd_verify accepts; whitening needs an m x m
/// eigendecomposition per matrix.
inline constexpr std::size_t kVerifyMaxRows = 2000;

/// Full command line including the program name, e.g.
/// {"skpower", "gen", "polydecay", "--m", "400", ...}.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

// Subcommand entry points; `args` excludes the program and subcommand names.
int cmd_gen(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_verify(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skpower::cli
