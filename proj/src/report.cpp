#include "cgas/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cgas {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("table " + name + ": row has " + std::to_string(row.size()) + " cells, header " +
                                std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& col) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == col) return k;
  throw std::out_of_range("table " + name + " has no column " + col);
}

double Table::number(std::size_t row, const std::string& col) const {
  const Cell& c = rows.at(row).at(column(col));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw std::invalid_argument("table " + name + ", column " + col + " is not numeric");
}

Table& ExperimentReport::add_table(std::string name, std::vector<std::string> columns) {
  tables.push_back(Table{std::move(name), std::move(columns), {}});
  return tables.back();
}

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw std::out_of_range(experiment + " has no table " + name);
}

bool ExperimentReport::check(std::string name, bool passed, double measured, double threshold, std::string kind,
                             std::string detail) {
  assertions.push_back({std::move(name), passed, measured, threshold, std::move(kind), std::move(detail)});
  return passed;
}

bool ExperimentReport::passed() const {
  for (const auto& a : assertions)
    if (!a.passed) return false;
  return true;
}

const Assertion& ExperimentReport::assertion(const std::string& name) const {
  for (const auto& a : assertions)
    if (a.name == name) return a;
  throw std::out_of_range(experiment + " has no assertion " + name);
}

std::string format_cell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  const double x = std::get<double>(cell);
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t k = 0; k < table.columns.size(); ++k) out += (k ? "," : "") + table.columns[k];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_cell(row[k]);
    }
    out += '\n';
  }
  return out;
}

namespace {

// JSON has no NaN; keep the number when finite.
nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_cell(x);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

nlohmann::json summary_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::json rows = nlohmann::json::array();
  bool all = true;
  for (const auto& r : reports) {
    for (const auto& a : r.assertions) {
      rows.push_back({{"experiment", r.experiment},
                      {"name", a.name},
                      {"passed", a.passed},
                      {"measured", json_number(a.measured)},
                      {"threshold", json_number(a.threshold)},
                      {"kind", a.kind},
                      {"detail", a.detail}});
      all = all && a.passed;
    }
  }
  return {{"passed", all}, {"assertions", rows}};
}

void write_reports(const std::vector<ExperimentReport>& reports, const std::string& dir, nlohmann::json manifest) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json experiments = nlohmann::json::object();
  for (const auto& r : reports) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& t : r.tables) {
      const std::string file = r.experiment + "_" + t.name + ".csv";
      write_file(fs::path(dir) / file, to_csv(t));
      files.push_back({{"table", t.name}, {"file", file}, {"columns", t.columns}, {"rows", t.rows.size()}});
    }
    experiments[r.experiment] = {{"tables", files}, {"info", r.info}, {"passed", r.passed()}};
  }
  manifest["experiments"] = experiments;
  write_file(fs::path(dir) / "summary.json", summary_json(reports).dump(2) + "\n");
  write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace cgas
