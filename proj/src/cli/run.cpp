#include "fisher_hydro/cli/run.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "fisher_hydro/errors.hpp"

namespace fisher_hydro::cli {
namespace {

unsigned worker_cap(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FISHER_HYDRO_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return static_cast<unsigned>(w);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_summary(const std::vector<SuiteOutcome>& outs, const std::filesystem::path& dir) {
  CsvTable t({"test", "pass", "exit_code", "failed_checks"});
  nlohmann::json j = nlohmann::json::array();
  for (const auto& o : outs) {
    std::string failed;
    for (const auto& c : o.verdict.checks)
      if (!evaluate(c)) failed += (failed.empty() ? "" : ";") + c.name;
    t.add_row({o.test, o.exit_code == kPass ? "true" : "false", std::to_string(o.exit_code), failed});
    j.push_back({{"test", o.test}, {"exit_code", o.exit_code}, {"message", o.message},
                 {"runtime_seconds", o.verdict.runtime_seconds}});
  }
  t.write(dir / "summary.csv");
  std::ofstream(dir / "summary.json") << nlohmann::json{{"schema_version", kSchemaVersion},
                                                        {"timestamp", utc_timestamp()},
                                                        {"suites", j}}
                                             .dump(2)
                                      << '\n';
}

}  // namespace

SuiteOutcome run_one(const RunConfig& cfg) {
  SuiteOutcome out;
  out.test = cfg.test;
  try {
    out.verdict = run_suite(cfg);
    write_verdict(out.verdict, cfg.out_dir);
    out.exit_code = out.verdict.pass() ? kPass : kFail;
    out.message = out.verdict.pass() ? "pass" : "fail";
  } catch (const ConfigError& e) {
    out.exit_code = kConfigError;
    out.message = std::string("config error: ") + e.what();
  } catch (const NumericalError& e) {
    out.exit_code = kNumericalError;
    out.message = std::string("numerical error: ") + e.what();
  }
  out.verdict.test = cfg.test;
  return out;
}

std::vector<SuiteOutcome> run_all(const std::filesystem::path& config_dir, const RunConfig& overrides,
                                  unsigned workers) {
  if (!config_dir.empty() && !std::filesystem::is_directory(config_dir))
    throw ConfigError("config directory '" + config_dir.string() + "' does not exist");
  std::vector<RunConfig> cfgs;
  for (const auto& id : suite_ids()) {
    RunConfig c;
    const auto file = config_dir.empty() ? std::filesystem::path{} : config_dir / (id + ".json");
    if (!file.empty() && std::filesystem::exists(file)) {
      c = load_config(file);
      if (!c.test.empty() && c.test != id) throw ConfigError(file.string() + " names test '" + c.test + "'");
    }
    c = merge(c, overrides);
    c.test = id;
    cfgs.push_back(c);
  }
  std::vector<SuiteOutcome> outs(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfgs.size();) outs[i] = run_one(cfgs[i]);
  };
  const unsigned w = std::min<unsigned>(worker_cap(workers), static_cast<unsigned>(cfgs.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < w; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::filesystem::create_directories(overrides.out_dir);
  write_summary(outs, overrides.out_dir);
  return outs;
}

int combined_exit_code(const std::vector<SuiteOutcome>& outcomes) {
  int code = kPass;
  for (const auto& o : outcomes) code = std::max(code, o.exit_code);
  return code;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Fisher-regularised hydrodynamics: residual diagnostics and stress tests"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  RunConfig over;
  std::size_t n = 0, alpha_steps = 0;
  double dt = 0, amin = 0, amax = 0, boost = 0, diffusion = 0, beta = 0, mask_eps = 0;
  bool refine = false;

  std::vector<CLI::App*> subs;
  for (const auto& id : suite_ids()) subs.push_back(app.add_subcommand(id, "run the " + id + " suite"));
  CLI::App* all = app.add_subcommand("run-all", "run every suite; --config names a directory of <test>.json files");
  subs.push_back(all);
  for (CLI::App* s : subs) {
    s->add_option("--config", config_path, "JSON config file (run-all: directory)");
    s->add_option("--out", out_dir, "output directory");
    s->add_flag("--refine", refine, "also run the refined grid");
    s->add_option("--n", n, "grid points per axis");
    s->add_option("--dt", dt, "time step");
    s->add_option("--alpha-min", amin, "scan lower bound / alpha_star");
    s->add_option("--alpha-max", amax, "scan upper bound / alpha_star");
    s->add_option("--alpha-steps", alpha_steps, "scan points");
    s->add_option("--boost", boost, "Galilean boost velocity");
    s->add_option("--diffusion", diffusion, "DG diffusion coefficient D");
    s->add_option("--beta", beta, "single beta for the superposition suite");
    s->add_option("--mask-eps", mask_eps, "relative density mask threshold");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  auto given = [&](const char* name) { return chosen->count(name) > 0; };
  if (!out_dir.empty()) over.out_dir = out_dir;
  over.refine = refine;
  if (given("--n")) over.n = n;
  if (given("--dt")) over.dt = dt;
  if (given("--alpha-min")) over.alpha_min = amin;
  if (given("--alpha-max")) over.alpha_max = amax;
  if (given("--alpha-steps")) over.alpha_steps = alpha_steps;
  if (given("--boost")) over.boost = boost;
  if (given("--diffusion")) over.diffusion = diffusion;
  if (given("--beta")) over.beta = beta;
  if (given("--mask-eps")) over.mask_eps = mask_eps;

  try {
    if (chosen == all) {
      auto outs = run_all(config_path, over);
      for (const auto& o : outs) std::cout << o.test << ": " << o.message << '\n';
      return combined_exit_code(outs);
    }
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    const std::string id = chosen->get_name();
    if (!cfg.test.empty() && cfg.test != id) throw ConfigError("config names test '" + cfg.test + "', not '" + id + "'");
    if (cfg.out_dir != RunConfig{}.out_dir && out_dir.empty()) over.out_dir = cfg.out_dir;
    cfg = merge(cfg, over);
    cfg.test = id;
    SuiteOutcome o = run_one(cfg);
    for (const auto& c : o.verdict.checks)
      std::cout << (evaluate(c) ? "PASS " : "FAIL ") << c.name << " = " << format_number(c.measured) << '\n';
    std::cout << id << ": " << o.message << '\n';
    if (o.exit_code != kPass && o.exit_code != kFail) std::cerr << o.message << '\n';
    return o.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace fisher_hydro::cli
