#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace paxsat {

/// Raised for malformed input files; carries row/column context in the message.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws DataError naming the column when absent.
  std::size_t col(const std::string& name) const;
};

/// Reads a UTF-8 CSV with a required header row. Handles quoted fields with
/// embedded commas/quotes; rows must match the header width.
CsvTable read_csv(const std::string& path);

/// Minimal writer; quotes fields only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_row(const std::vector<std::string>& fields);
  void close();

 private:
  struct Impl;
  Impl* impl_;
};

/// Canonical float formatting for artifacts: shortest round-trip decimal.
std::string format_double(double v);

/// Field parse helpers that name the (1-based) data row and column on error.
double parse_double_field(const std::string& s, std::size_t row, const std::string& col);
std::int64_t parse_int_field(const std::string& s, std::size_t row, const std::string& col);

}  // namespace paxsat
