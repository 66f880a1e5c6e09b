#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fisher_hydro/cli/run.hpp"
#include "fisher_hydro/errors.hpp"

using namespace fisher_hydro;
using namespace fisher_hydro::cli;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("fisher_hydro_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Check& find_check(const Verdict& v, const std::string& name) {
  for (const auto& c : v.checks)
    if (c.name == name) return c;
  throw std::out_of_range(name);
}
}  // namespace

TEST_CASE("config parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_config(""), ConfigError);
  CHECK_THROWS_AS(parse_config("   \n"), ConfigError);
  CHECK_THROWS_AS(parse_config("{n: 4}"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid_size": 1024})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"n": "1024"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"n": -4})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"betas": []})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"refine": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"test": "no-such-suite"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/fisher_hydro.json"), ConfigError);
}

TEST_CASE("config parsing, merging and echo") {
  auto c = parse_config(R"({"test": "galilei", "n": 2048, "dt": 0.01, "betas": [0, 0.02], "refine": true})");
  CHECK(c.test == "galilei");
  CHECK(*c.n == 2048);
  CHECK(*c.dt == 0.01);
  CHECK(c.betas->size() == 2);
  CHECK(c.refine);
  CHECK_FALSE(c.length.has_value());

  RunConfig over;
  over.dt = 0.005;
  over.hbar = 2.0;
  auto m = merge(c, over);
  CHECK(*m.dt == 0.005);
  CHECK(*m.hbar == 2.0);
  CHECK(*m.n == 2048);

  auto j = to_json(m);
  CHECK_FALSE(j.contains("length"));
  auto again = parse_config(j.dump());
  CHECK(to_json(again) == j);
  for (const auto& [key, value] : j.items()) {
    INFO(key);
    CHECK(std::find(config_keys().begin(), config_keys().end(), key) != config_keys().end());
  }
  CHECK(suite_ids().size() == 9);
  CHECK(is_suite("scan-alpha"));
  CHECK_FALSE(is_suite("run-all"));
}

TEST_CASE("threshold checks") {
  CHECK(evaluate(at_most("a", 1.0, 1.0, "")));
  CHECK_FALSE(evaluate(at_most("a", 1.0 + 1e-15, 1.0, "")));
  CHECK(evaluate(at_least("b", 2.0, 1.0, "")));
  CHECK(evaluate(within("c", 1.3, 1.2, 1.45, "")));
  CHECK_FALSE(evaluate(within("c", 1.5, 1.2, 1.45, "")));
  CHECK_FALSE(evaluate(at_most("nan", std::nan(""), 1.0, "")));
  CHECK(evaluate(holds("d", true, "")));
  Verdict empty;
  CHECK_FALSE(empty.pass());
}

TEST_CASE("csv tables are deterministic") {
  CsvTable t({"x[1]", "y[m]"});
  t.add_row({0.1, 1.0 / 3.0});
  t.add_row(std::vector<std::string>{"label", "2"});
  CHECK(t.str() == "x[1],y[m]\n0.10000000000000001,0.33333333333333331\nlabel,2\n");
  CHECK_THROWS(t.add_row(std::vector<double>{1.0}));
  CHECK(format_number(1.0) == "1");
}

TEST_CASE("suite artefacts are byte-identical across runs") {
  TempDir a, b;
  RunConfig cfg;
  cfg.test = "circulation";
  cfg.n = 128;
  cfg.out_dir = a.path;
  auto first = run_one(cfg);
  cfg.out_dir = b.path;
  auto second = run_one(cfg);
  CHECK(first.exit_code == kPass);
  CHECK(second.exit_code == kPass);
  REQUIRE_FALSE(first.verdict.artefacts.empty());
  for (const auto& name : first.verdict.artefacts) CHECK(slurp(a.path / name) == slurp(b.path / name));
  CHECK(fs::exists(a.path / "circulation.json"));
  auto j = nlohmann::json::parse(slurp(a.path / "circulation.json"));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["test"] == "circulation");
  CHECK(j["pass"] == true);
}

TEST_CASE("exit codes") {
  TempDir d;
  RunConfig cfg;
  cfg.out_dir = d.path;
  cfg.test = "circulation";
  cfg.n = 100;
  CHECK(run_one(cfg).exit_code == kConfigError);
  cfg.n.reset();
  cfg.hbar = -1.0;
  CHECK(run_one(cfg).exit_code == kConfigError);
  cfg.test = "not-a-suite";
  CHECK(run_one(cfg).exit_code == kConfigError);

  std::vector<SuiteOutcome> outs(3);
  outs[0].exit_code = kPass;
  outs[1].exit_code = kFail;
  outs[2].exit_code = kPass;
  CHECK(combined_exit_code(outs) == kFail);
  outs[2].exit_code = kNumericalError;
  CHECK(combined_exit_code(outs) == kNumericalError);
  CHECK(combined_exit_code({}) == kPass);
  CHECK_THROWS_AS(run_all(d.path / "missing", cfg), ConfigError);
}

TEST_CASE("superposition with beta zero passes") {
  TempDir d;
  RunConfig cfg;
  cfg.out_dir = d.path;
  cfg.test = "superposition";
  cfg.beta = 0.0;
  cfg.n = 1024;
  auto out = run_one(cfg);
  CHECK(out.exit_code == kPass);
  CHECK(find_check(out.verdict, "beta0_base").measured <= 1e-10);
  CHECK(fs::exists(d.path / "superposition.csv"));
}

TEST_CASE("momentum-balance audit flags a wrong coefficient") {
  TempDir d;
  RunConfig cfg;
  cfg.out_dir = d.path;
  cfg.test = "scan-alpha";
  cfg.n = 2048;
  cfg.length = 100.0;
  cfg.alpha_audit = 1.2;
  auto v = run_suite(cfg);
  CHECK(v.measured["momentum_balance_audit_flagged"] == true);
  REQUIRE(v.notes.size() == 1);
  CHECK(v.notes[0].find("momentum-balance audit") != std::string::npos);
  CHECK(find_check(v, "momentum_balance_at_alpha_star").pass);
  CHECK(find_check(v, "argmin_offset").pass);
  CHECK(v.config["alpha_audit"] == 1.2);
}

TEST_CASE("command line entry point") {
  TempDir d;
  const std::string out = d.path.string();
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(call({"fisher-hydro", "circulation", "--n", "128", "--out", out}) == kPass);
  CHECK(fs::exists(d.path / "circulation.json"));
  CHECK(call({"fisher-hydro", "circulation", "--n", "100", "--out", out}) == kConfigError);
  CHECK(call({"fisher-hydro", "circulation", "--config", (d.path / "absent.json").string()}) == kConfigError);
  CHECK(call({"fisher-hydro", "bogus"}) != kPass);
}
