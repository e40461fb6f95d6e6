#include "sgntk/report.hpp"

#include <fstream>

#include "sgntk/errors.hpp"

#ifndef SGNTK_VERSION
#define SGNTK_VERSION "0.1.0"
#endif

namespace sgntk {

const char* version_string() noexcept { return SGNTK_VERSION; }

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) raise(Errc::SchemaMismatch, "row width does not match table " + name);
  rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

Table& ExperimentReport::table(const std::string& table_name, std::vector<std::string> columns) {
  for (Table& t : tables)
    if (t.name == table_name) return t;
  tables.push_back({table_name, std::move(columns), {}});
  return tables.back();
}

const Table& ExperimentReport::find(const std::string& table_name) const {
  for (const Table& t : tables)
    if (t.name == table_name) return t;
  raise(Errc::InvalidArgument, "no table named " + table_name);
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json files = nlohmann::json::array();
  for (const Table& t : tables) {
    files.push_back({{"table", t.name}, {"file", t.name + ".csv"}, {"columns", t.columns}, {"rows", t.rows.size()}});
  }
  return {{"experiment", name}, {"version", version_string()}, {"metadata", metadata}, {"tables", files}};
}

void ExperimentReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const Table& t : tables) {
    std::ofstream out(dir / (t.name + ".csv"));
    if (!out) raise(Errc::InvalidArgument, "cannot write " + (dir / (t.name + ".csv")).string());
    t.write_csv(out);
  }
  std::ofstream meta(dir / (name + ".json"));
  if (!meta) raise(Errc::InvalidArgument, "cannot write report metadata");
  meta << to_json().dump(2) << '\n';
}

}  // namespace sgntk
