/// @file output.hpp
/// @brief Verdicts, threshold checks and deterministic CSV/JSON artefacts.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fisher_hydro::cli {

inline constexpr int kSchemaVersion = 1;

/// One measured quantity against one threshold. `pass` is recomputed from the other fields.
struct Check {
  enum class Op { kAtMost, kAtLeast, kWithin, kIsTrue };
  std::string name;
  double measured = 0.0;
  Op op = Op::kAtMost;
  double lo = 0.0;
  double hi = 0.0;
  /// What the threshold encodes, in words.
  std::string provenance;
  bool pass = false;
};

Check at_most(std::string name, double measured, double bound, std::string provenance);
Check at_least(std::string name, double measured, double bound, std::string provenance);
Check within(std::string name, double measured, double lo, double hi, std::string provenance);
Check holds(std::string name, bool value, std::string provenance);
bool evaluate(const Check& c);

struct Verdict {
  std::string test;
  std::vector<Check> checks;
  /// Extra measured values without thresholds.
  nlohmann::json measured = nlohmann::json::object();
  /// Resolved parameters the suite ran with.
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();
  std::size_t n = 0;
  double dt = 0.0;
  double length = 0.0;
  double runtime_seconds = 0.0;
  std::vector<std::string> artefacts;
  std::vector<std::string> notes;

  /// All checks pass (false when there are none).
  bool pass() const;
};

nlohmann::json verdict_json(const Verdict& v, const std::string& timestamp);
void write_verdict(const Verdict& v, const std::filesystem::path& dir);

/// CSV cell formatting shared by every table: 17 significant digits.
std::string format_number(double v);

class CsvTable {
 public:
  /// Column names carry units, e.g. "alpha_ratio[1]".
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  void add_row(const std::vector<double>& values);
  std::string str() const;
  void write(const std::filesystem::path& file) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string utc_timestamp();

}  // namespace fisher_hydro::cli
