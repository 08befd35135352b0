#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace rcb {

/// How a reported number was obtained.
enum class ValueMode { ExactRational, ExactFloat, ClosedForm, MonteCarlo };

const char* mode_name(ValueMode m);

struct Quantity {
  std::string name;
  double value = 0.0;
  ValueMode mode = ValueMode::ExactFloat;
  std::optional<double> standard_error;  // set for every Monte Carlo value
};

/// lhs <= rhs style check. `bound` verdicts are inequalities whose failure is
/// a finding (exit code 1); the others are informational claims.
struct Verdict {
  std::string name;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool bound = true;
  double slack() const { return rhs - lhs; }
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunResult {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Quantity> scalars;
  std::vector<Verdict> verdicts;
  std::vector<Table> tables;
  std::vector<std::string> warnings;

  void exact(const std::string& name, double v, ValueMode m = ValueMode::ExactFloat) { scalars.push_back({name, v, m, {}}); }
  void estimate(const std::string& name, double v, double se) {
    scalars.push_back({name, v, ValueMode::MonteCarlo, se});
  }
  /// Records lhs <= rhs + tol.
  Verdict& check_le(const std::string& name, double lhs, double rhs, double tol = 0.0);
  /// Records an informational claim.
  Verdict& claim(const std::string& name, bool holds, double lhs = 0.0, double rhs = 0.0);

  const Quantity* find(const std::string& name) const;
  double value(const std::string& name) const;
  const Verdict* verdict(const std::string& name) const;
  const Table* table(const std::string& name) const;
  /// False when some bound verdict fails.
  bool bounds_hold() const;
};

/// Run summary: experiment, exact config, scalars, verdicts, tables, provenance
/// (library version, caps, seed when present). Holds nothing that varies
/// between runs of the same config, so equal configs give equal bytes.
nlohmann::json to_json(const RunResult& r);
std::string to_json_text(const RunResult& r);

/// Header row plus one row per record; numbers printed with %.17g.
std::string scalars_csv(const RunResult& r);
std::string verdicts_csv(const RunResult& r);
std::string table_csv(const Table& t);
std::string format_number(double x);

enum class OutputFormat { Json, Csv };

/// Writes <experiment>.json, or <experiment>_scalars.csv,
/// <experiment>_verdicts.csv and <experiment>_<table>.csv. Throws Io.
std::vector<std::filesystem::path> emit(const RunResult& r, const std::filesystem::path& dir, OutputFormat format);

}  // namespace rcb
