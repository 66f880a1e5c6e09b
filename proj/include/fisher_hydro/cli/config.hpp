/// @file config.hpp
/// @brief Run configuration: flat JSON files plus command-line overrides.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fisher_hydro::cli {

/// Subcommand ids in summary order.
const std::vector<std::string>& suite_ids();
bool is_suite(const std::string& id);

/// Every numeric field is optional; unset fields take the per-suite defaults listed in the README.
struct RunConfig {
  std::string test;
  std::filesystem::path out_dir = "fisher_hydro_out";
  bool refine = false;

  std::optional<std::size_t> n;
  std::optional<double> length;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::size_t> record_stride;

  std::optional<double> hbar;
  std::optional<double> mass;
  std::optional<double> omega;
  std::optional<std::vector<double>> masses;

  std::optional<double> sigma;
  std::optional<double> x0;
  std::optional<double> boost;

  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  std::optional<std::size_t> alpha_steps;
  /// Coefficient (in units of alpha_star) fed to the momentum-balance audit of scan-alpha.
  std::optional<double> alpha_audit;

  std::optional<double> diffusion;
  std::optional<double> beta;
  std::optional<std::vector<double>> betas;
  std::optional<double> eps_reg;
  std::optional<double> mask_eps;
};

/// Recognised JSON keys.
const std::vector<std::string>& config_keys();

/// Parses a flat JSON object. Throws ConfigError on empty input, non-objects, unknown keys or wrong types.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

/// Fields set in `over` replace those in `base`.
RunConfig merge(RunConfig base, const RunConfig& over);

/// Only the fields that are set, so the echo re-runs to the same verdict.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace fisher_hydro::cli
