#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cgas {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws std::invalid_argument if the row width does not match the header.
  void add(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
};

/// One checked claim. `kind` is identity, oracle, statistical or trend.
struct Assertion {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string kind;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::deque<Table> tables;
  std::vector<Assertion> assertions;
  /// Free-form scalars (R_V, fitted constants, ...) echoed into the manifest.
  nlohmann::json info = nlohmann::json::object();

  Table& add_table(std::string name, std::vector<std::string> columns);
  const Table& table(const std::string& name) const;
  /// Records an assertion and returns `passed`.
  bool check(std::string name, bool passed, double measured, double threshold, std::string kind,
             std::string detail = {});
  bool passed() const;
  const Assertion& assertion(const std::string& name) const;
};

/// %.17g for doubles, "nan"/"inf"/"-inf" for non-finite values.
std::string format_cell(const Cell& cell);
std::string to_csv(const Table& table);

/// Writes `<dir>/<experiment>_<table>.csv` for every table, `<dir>/summary.json` and
/// `<dir>/manifest.json` (the given manifest plus per-experiment info and table list).
void write_reports(const std::vector<ExperimentReport>& reports, const std::string& dir, nlohmann::json manifest);

nlohmann::json summary_json(const std::vector<ExperimentReport>& reports);

}  // namespace cgas
