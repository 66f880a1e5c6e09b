#include "fisher_hydro/cli/output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace fisher_hydro::cli {
namespace {

const char* op_name(Check::Op op) {
  switch (op) {
    case Check::Op::kAtMost: return "<=";
    case Check::Op::kAtLeast: return ">=";
    case Check::Op::kWithin: return "in";
    case Check::Op::kIsTrue: return "true";
  }
  return "?";
}

Check make(std::string name, double measured, Check::Op op, double lo, double hi, std::string prov) {
  Check c{std::move(name), measured, op, lo, hi, std::move(prov), false};
  c.pass = evaluate(c);
  return c;
}

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Check at_most(std::string name, double measured, double bound, std::string provenance) {
  return make(std::move(name), measured, Check::Op::kAtMost, 0.0, bound, std::move(provenance));
}
Check at_least(std::string name, double measured, double bound, std::string provenance) {
  return make(std::move(name), measured, Check::Op::kAtLeast, bound, 0.0, std::move(provenance));
}
Check within(std::string name, double measured, double lo, double hi, std::string provenance) {
  return make(std::move(name), measured, Check::Op::kWithin, lo, hi, std::move(provenance));
}
Check holds(std::string name, bool value, std::string provenance) {
  return make(std::move(name), value ? 1.0 : 0.0, Check::Op::kIsTrue, 0.0, 0.0, std::move(provenance));
}

bool evaluate(const Check& c) {
  if (!std::isfinite(c.measured)) return false;
  switch (c.op) {
    case Check::Op::kAtMost: return c.measured <= c.hi;
    case Check::Op::kAtLeast: return c.measured >= c.lo;
    case Check::Op::kWithin: return c.measured >= c.lo && c.measured <= c.hi;
    case Check::Op::kIsTrue: return c.measured != 0.0;
  }
  return false;
}

bool Verdict::pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!evaluate(c)) return false;
  return true;
}

nlohmann::json verdict_json(const Verdict& v, const std::string& timestamp) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : v.checks) {
    nlohmann::json e{{"name", c.name},
                     {"measured", number_or_null(c.measured)},
                     {"op", op_name(c.op)},
                     {"provenance", c.provenance},
                     {"pass", evaluate(c)}};
    if (c.op == Check::Op::kAtMost) e["threshold"] = c.hi;
    if (c.op == Check::Op::kAtLeast) e["threshold"] = c.lo;
    if (c.op == Check::Op::kWithin) e["threshold"] = {c.lo, c.hi};
    checks.push_back(e);
  }
  return {{"schema_version", kSchemaVersion},
          {"test", v.test},
          {"pass", v.pass()},
          {"checks", checks},
          {"measured", v.measured},
          {"parameters", v.parameters},
          {"config", v.config},
          {"grid", {{"n", v.n}, {"dt", v.dt}, {"length", v.length}}},
          {"runtime_seconds", v.runtime_seconds},
          {"artefacts", v.artefacts},
          {"notes", v.notes},
          {"timestamp", timestamp}};
}

void write_verdict(const Verdict& v, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / (v.test + ".json"));
  if (!out) throw std::runtime_error("cannot write verdict to " + dir.string());
  out << verdict_json(v, utc_timestamp()).dump(2) << '\n';
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("csv row width does not match header");
  rows_.push_back(std::move(cells));
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

std::string CsvTable::str() const {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    s += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return s;
}

void CsvTable::write(const std::filesystem::path& file) const {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << str();
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fisher_hydro::cli
