/// @file suites.hpp
/// @brief One function per subcommand. Each writes its CSV tables into cfg.out_dir and returns the verdict.
#pragma once

#include "fisher_hydro/cli/config.hpp"
#include "fisher_hydro/cli/output.hpp"

namespace fisher_hydro::cli {

Verdict run_scan_alpha(const RunConfig& cfg);
Verdict run_continuity(const RunConfig& cfg);
Verdict run_dg_entropy(const RunConfig& cfg);
Verdict run_circulation(const RunConfig& cfg);
Verdict run_fisher_el(const RunConfig& cfg);
Verdict run_time_reversal(const RunConfig& cfg);
Verdict run_galilei(const RunConfig& cfg);
Verdict run_complexifier(const RunConfig& cfg);
Verdict run_superposition(const RunConfig& cfg);

/// Dispatches on cfg.test, fills runtime and config echo. Throws ConfigError for unknown ids.
Verdict run_suite(const RunConfig& cfg);

}  // namespace fisher_hydro::cli
