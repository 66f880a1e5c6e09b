/// @file run.hpp
/// @brief Subcommand dispatch, run-all and exit-code policy.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fisher_hydro/cli/suites.hpp"

namespace fisher_hydro::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2, kNumericalError = 3 };

struct SuiteOutcome {
  std::string test;
  int exit_code = kPass;
  std::string message;
  Verdict verdict;
};

/// Runs one suite, writes its verdict JSON and maps errors to exit codes.
SuiteOutcome run_one(const RunConfig& cfg);

/// Every suite, optionally with per-suite `<id>.json` files from `config_dir`, in parallel up to
/// `workers` (0 = FISHER_HYDRO_WORKERS or hardware concurrency). Results come back in suite order.
std::vector<SuiteOutcome> run_all(const std::filesystem::path& config_dir, const RunConfig& overrides,
                                  unsigned workers = 0);

/// Worst exit code: config and numerical errors dominate failures.
int combined_exit_code(const std::vector<SuiteOutcome>& outcomes);

/// Entry point for the fisher-hydro executable.
int cli_main(int argc, char** argv);

}  // namespace fisher_hydro::cli
