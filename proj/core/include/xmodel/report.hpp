#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace xmodel {

enum class OutputFormat { kCsv, kJson };

OutputFormat parse_output_format(const std::string& text);

/// A rectangular numeric table with named columns.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

/// One pass/fail comparison: value `relation` threshold, relation one of
/// "<", "<=", ">", ">=", "==".
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;
  double threshold = 0.0;
  bool pass = false;
};

Check make_check(std::string name, double value, std::string relation, double threshold);

struct ComparisonReport {
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<Table> tables;  ///< tables[0] is the per-n summary when present
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  /// Wall-clock seconds per stage; kept out of the numeric outputs.
  std::vector<std::pair<std::string, double>> timings;

  bool passed() const;
  Table* find_table(const std::string& name);
  const Table* find_table(const std::string& name) const;

  void write_summary_csv(std::ostream& out) const;
  void write_summary_json(std::ostream& out) const;
};

/// Writes the pass/fail summary <kind>_checks.<ext>, one <kind>_<table>.csv
/// per table (CSV only; JSON embeds them) and <kind>_timings.txt into dir,
/// creating it if needed. Returns the files written. Throws Error(kIo) with
/// the path on failure.
std::vector<std::filesystem::path> write_report(const ComparisonReport& report,
                                                const std::filesystem::path& dir,
                                                OutputFormat format);

/// JSON string literal with escaping.
std::string json_quote(const std::string& text);
/// Number as JSON: 12 significant digits, null for NaN and infinities.
std::string json_number(double value);

}  // namespace xmodel
