#include "xmodel/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "xmodel/error.hpp"
#include "xmodel/format.hpp"

namespace xmodel {

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  throw Error(ErrorCode::kConfigParse, "format must be csv or json, got '" + text + "'");
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::kInvalidParams, "row width does not match table '" + name + "'");
  }
  rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

std::string json_quote(const std::string& text) {
  std::string out = "\"";
  for (const char ch : text) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(ch));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

std::string json_number(double value) {
  if (!std::isfinite(value)) return "null";
  return format_number(value);
}

void Table::write_json(std::ostream& out) const {
  out << "{\"name\": " << json_quote(name) << ", \"columns\": [";
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? ", " : "") << json_quote(columns[c]);
  out << "], \"rows\": [";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << (r ? ", " : "") << '[';
    for (std::size_t c = 0; c < rows[r].size(); ++c) out << (c ? ", " : "") << json_number(rows[r][c]);
    out << ']';
  }
  out << "]}";
}

Check make_check(std::string name, double value, std::string relation, double threshold) {
  bool pass = false;
  if (relation == "<") {
    pass = value < threshold;
  } else if (relation == "<=") {
    pass = value <= threshold;
  } else if (relation == ">") {
    pass = value > threshold;
  } else if (relation == ">=") {
    pass = value >= threshold;
  } else if (relation == "==") {
    pass = value == threshold;
  } else {
    throw Error(ErrorCode::kInvalidParams, "unknown relation '" + relation + "'");
  }
  return {std::move(name), value, std::move(relation), threshold, pass};
}

bool ComparisonReport::passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

Table* ComparisonReport::find_table(const std::string& name) {
  for (auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Table* ComparisonReport::find_table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void ComparisonReport::write_summary_csv(std::ostream& out) const {
  out << "# kind=" << kind << " seed=" << seed << '\n';
  for (const auto& w : warnings) out << "# warning: " << w << '\n';
  out << "check,value,relation,threshold,pass\n";
  for (const auto& c : checks) {
    out << c.name << ',' << format_number(c.value) << ',' << c.relation << ','
        << format_number(c.threshold) << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  out << "overall,,,," << (passed() ? "PASS" : "FAIL") << '\n';
}

void ComparisonReport::write_summary_json(std::ostream& out) const {
  out << "{\n  \"kind\": " << json_quote(kind) << ",\n  \"seed\": " << seed
      << ",\n  \"passed\": " << (passed() ? "true" : "false") << ",\n  \"warnings\": [";
  for (std::size_t i = 0; i < warnings.size(); ++i) out << (i ? ", " : "") << json_quote(warnings[i]);
  out << "],\n  \"checks\": [";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    out << (i ? ",\n    " : "\n    ") << "{\"name\": " << json_quote(c.name)
        << ", \"value\": " << json_number(c.value) << ", \"relation\": " << json_quote(c.relation)
        << ", \"threshold\": " << json_number(c.threshold)
        << ", \"pass\": " << (c.pass ? "true" : "false") << '}';
  }
  out << (checks.empty() ? "" : "\n  ") << "],\n  \"tables\": [";
  for (std::size_t i = 0; i < tables.size(); ++i) {
    out << (i ? ",\n    " : "\n    ");
    tables[i].write_json(out);
  }
  out << (tables.empty() ? "" : "\n  ") << "]\n}\n";
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::vector<std::filesystem::path> write_report(const ComparisonReport& report,
                                                const std::filesystem::path& dir,
                                                OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  const std::string ext = format == OutputFormat::kCsv ? ".csv" : ".json";

  const auto summary = dir / (report.kind + "_checks" + ext);
  {
    auto out = open_output(summary);
    if (format == OutputFormat::kCsv) {
      report.write_summary_csv(out);
    } else {
      report.write_summary_json(out);
    }
  }
  written.push_back(summary);

  // The JSON summary already embeds every table.
  if (format == OutputFormat::kCsv) {
    for (const auto& table : report.tables) {
      const auto path = dir / (report.kind + "_" + table.name + ext);
      auto out = open_output(path);
      table.write_csv(out);
      written.push_back(path);
    }
  }

  const auto timings = dir / (report.kind + "_timings.txt");
  {
    auto out = open_output(timings);
    for (const auto& [stage, seconds] : report.timings) out << stage << ' ' << seconds << '\n';
  }
  written.push_back(timings);
  return written;
}

}  // namespace xmodel
