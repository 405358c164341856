#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace edm {

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

using Cell = std::variant<double, std::int64_t, bool, std::string>;

std::string format_cell(const Cell& c);

// Deterministic CSV table: fixed column order, '\n' line endings, shortest
// round-trip numbers, no quoting (cells must not contain commas).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  std::string to_csv() const;
};

// FNV-1a 64-bit, used to stamp outputs with a config fingerprint.
std::uint64_t fnv1a64(const std::string& data);
std::string to_hex(std::uint64_t value);

}  // namespace edm
