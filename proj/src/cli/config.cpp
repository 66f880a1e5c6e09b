#include "fisher_hydro/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fisher_hydro/errors.hpp"

namespace fisher_hydro::cli {
namespace {

using nlohmann::json;

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<double> as_list(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw ConfigError("config key '" + key + "' must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_double(e, key));
  return out;
}

template <class T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

}  // namespace

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids{"scan-alpha", "continuity",    "dg-entropy", "circulation", "fisher-el",
                                            "time-reversal", "galilei", "complexifier", "superposition"};
  return ids;
}

bool is_suite(const std::string& id) {
  const auto& ids = suite_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "test",   "out",       "refine",    "n",           "length",      "dt",        "t_final",
      "record_stride", "hbar", "mass",    "omega",       "masses",      "sigma",     "x0",
      "boost",  "alpha_min", "alpha_max", "alpha_steps", "alpha_audit", "diffusion", "beta",
      "betas",  "eps_reg",   "mask_eps"};
  return keys;
}

RunConfig parse_config(const std::string& text) {
  if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); }))
    throw ConfigError("config file is empty; expected a JSON object");
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  const auto& keys = config_keys();
  for (const auto& [key, _] : j.items())
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown config key '" + key + "'");

  RunConfig c;
  if (j.contains("test")) {
    if (!j["test"].is_string()) throw ConfigError("config key 'test' must be a string");
    c.test = j["test"].get<std::string>();
    if (!is_suite(c.test)) throw ConfigError("unknown test '" + c.test + "'");
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("config key 'out' must be a string");
    c.out_dir = j["out"].get<std::string>();
  }
  if (j.contains("refine")) {
    if (!j["refine"].is_boolean()) throw ConfigError("config key 'refine' must be a boolean");
    c.refine = j["refine"].get<bool>();
  }
  auto num = [&](const char* k, std::optional<double>& dst) {
    if (j.contains(k)) dst = as_double(j[k], k);
  };
  auto cnt = [&](const char* k, std::optional<std::size_t>& dst) {
    if (j.contains(k)) dst = as_count(j[k], k);
  };
  auto lst = [&](const char* k, std::optional<std::vector<double>>& dst) {
    if (j.contains(k)) dst = as_list(j[k], k);
  };
  cnt("n", c.n);
  num("length", c.length);
  num("dt", c.dt);
  num("t_final", c.t_final);
  cnt("record_stride", c.record_stride);
  num("hbar", c.hbar);
  num("mass", c.mass);
  num("omega", c.omega);
  lst("masses", c.masses);
  num("sigma", c.sigma);
  num("x0", c.x0);
  num("boost", c.boost);
  num("alpha_min", c.alpha_min);
  num("alpha_max", c.alpha_max);
  cnt("alpha_steps", c.alpha_steps);
  num("alpha_audit", c.alpha_audit);
  num("diffusion", c.diffusion);
  num("beta", c.beta);
  lst("betas", c.betas);
  num("eps_reg", c.eps_reg);
  num("mask_eps", c.mask_eps);
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig merge(RunConfig base, const RunConfig& over) {
  if (!over.test.empty()) base.test = over.test;
  if (over.out_dir != RunConfig{}.out_dir) base.out_dir = over.out_dir;
  base.refine = base.refine || over.refine;
  take(base.n, over.n);
  take(base.length, over.length);
  take(base.dt, over.dt);
  take(base.t_final, over.t_final);
  take(base.record_stride, over.record_stride);
  take(base.hbar, over.hbar);
  take(base.mass, over.mass);
  take(base.omega, over.omega);
  take(base.masses, over.masses);
  take(base.sigma, over.sigma);
  take(base.x0, over.x0);
  take(base.boost, over.boost);
  take(base.alpha_min, over.alpha_min);
  take(base.alpha_max, over.alpha_max);
  take(base.alpha_steps, over.alpha_steps);
  take(base.alpha_audit, over.alpha_audit);
  take(base.diffusion, over.diffusion);
  take(base.beta, over.beta);
  take(base.betas, over.betas);
  take(base.eps_reg, over.eps_reg);
  take(base.mask_eps, over.mask_eps);
  return base;
}

nlohmann::json to_json(const RunConfig& c) {
  json j = json::object();
  if (!c.test.empty()) j["test"] = c.test;
  j["refine"] = c.refine;
  put(j, "n", c.n);
  put(j, "length", c.length);
  put(j, "dt", c.dt);
  put(j, "t_final", c.t_final);
  put(j, "record_stride", c.record_stride);
  put(j, "hbar", c.hbar);
  put(j, "mass", c.mass);
  put(j, "omega", c.omega);
  put(j, "masses", c.masses);
  put(j, "sigma", c.sigma);
  put(j, "x0", c.x0);
  put(j, "boost", c.boost);
  put(j, "alpha_min", c.alpha_min);
  put(j, "alpha_max", c.alpha_max);
  put(j, "alpha_steps", c.alpha_steps);
  put(j, "alpha_audit", c.alpha_audit);
  put(j, "diffusion", c.diffusion);
  put(j, "beta", c.beta);
  put(j, "betas", c.betas);
  put(j, "eps_reg", c.eps_reg);
  put(j, "mask_eps", c.mask_eps);
  return j;
}

}  // namespace fisher_hydro::cli
