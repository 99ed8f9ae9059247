#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace thermo {

/// Round-trip representation ("%.17g"); nan and inf spelled out.
std::string format_double(double v);

/// One CSV field; numbers are formatted on construction.
struct Cell {
  std::string text;
  Cell(double v) : text(format_double(v)) {}
  Cell(int v) : text(std::to_string(v)) {}
  Cell(long v) : text(std::to_string(v)) {}
  Cell(long long v) : text(std::to_string(v)) {}
  Cell(unsigned v) : text(std::to_string(v)) {}
  Cell(unsigned long v) : text(std::to_string(v)) {}
  Cell(unsigned long long v) : text(std::to_string(v)) {}
  Cell(bool v) : text(v ? "true" : "false") {}
  Cell(std::string v) : text(std::move(v)) {}
  Cell(const char* v) : text(v) {}
};

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::initializer_list<Cell> cells);
  void add_row(const std::vector<Cell>& cells);

  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] std::size_t rows() const { return rows_.size(); }
  [[nodiscard]] std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses a file written by CsvTable (header row included).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace thermo
