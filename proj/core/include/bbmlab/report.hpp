#pragma once

#include <string>
#include <vector>

#include "bbmlab/approx.hpp"
#include "bbmlab/collision.hpp"

namespace bbm {

inline constexpr int kSchemaVersion = 1;

const char* library_version();
// git describe of the source tree at configure time ("unknown" outside a checkout)
const char* version_hash();

// shortest round-trip decimal for a double
std::string fmt(double x);

// RFC 4180: CRLF rows, fields quoted when they hold a comma, quote or line break
std::string csv_escape(const std::string& field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  void add(std::vector<std::string> row);
  void add_numbers(const std::vector<double>& row);
  const std::vector<std::string>& columns() const { return cols_; }
  size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> cols_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& content);

// JSON documents (UTF-8). Field names follow the C++ structs.
std::string to_json(const CollisionReport& r, bool with_trace = false);
std::string to_json(const ScalingStudy& s);
std::string to_json(const ScanPoint& p);
std::string to_json(const ExperimentConfig& c);

// one row per run
CsvTable sweep_csv(const std::vector<CollisionReport>& runs);

}  // namespace bbm
