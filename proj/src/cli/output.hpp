#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace wavebound::cli {

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

// Doubles at 17 significant digits, LF endings, provenance comment first.
std::string format_double(double v);
std::string render_csv(const Table& t, std::uint64_t config_hash);

// Writes to `path` through a temporary file and a rename.
void write_file(const std::string& path, const std::string& content);

}  // namespace wavebound::cli
