#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sgntk {

/// Project version, with the git revision when the build knew it.
const char* version_string() noexcept;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void write_csv(std::ostream& out) const;
};

/// Metadata plus named CSV tables. Output is a pure function of the
/// contents: no timestamps, fixed number formatting.
struct ExperimentReport {
  std::string name;
  nlohmann::json metadata = nlohmann::json::object();
  std::deque<Table> tables;  // references from table() stay valid

  Table& table(const std::string& table_name, std::vector<std::string> columns);
  const Table& find(const std::string& table_name) const;
  /// Writes <dir>/<table>.csv for each table and <dir>/<name>.json.
  void write(const std::filesystem::path& dir) const;
  nlohmann::json to_json() const;
};

}  // namespace sgntk
