#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace kahler {

/// One pass/fail outcome.  `values` keeps insertion order so reports read in
/// the order quantities were computed.
struct ReportRecord {
  std::string experiment;
  std::string quantity;
  int criterion = 0;  ///< acceptance criterion id, 0 when the record is informational
  std::vector<std::pair<std::string, double>> values;
  double trend_slope = std::numeric_limits<double>::quiet_NaN();
  double trend_residual = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::string detail;

  ReportRecord& set(const std::string& key, double v);
  double get(const std::string& key) const;
};

nlohmann::ordered_json to_json(const ReportRecord& r);
/// report.json: {"experiment", "seed", "pass", "records": [...]}; record values keep insertion order.  NaN and
/// infinities are written as null.
void write_report(const std::filesystem::path& file, const std::string& experiment, std::uint64_t seed,
                  const std::vector<ReportRecord>& records);

/// Column-major numeric table written as CSV with a header row.
struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  ///< one vector per column, equal lengths

  Table& add(const std::string& column, std::vector<double> values);
  const std::vector<double>& column(const std::string& name) const;
  std::size_t rows() const;
};
void write_csv(const std::filesystem::path& file, const Table& t);

/// Static SVG rendering of tables; the data always also goes to CSV.
struct PlotSpec {
  enum class Kind { line, histogram, polygon };
  Kind kind = Kind::line;
  std::string name;  ///< file stem
  std::string title;
  std::string table;
  std::string x;
  std::vector<std::string> ys;  ///< line: one series each; polygon: y column per x/y pair listed as "x:y"
  bool log_x = false, log_y = false;
};
/// Renders spec from the named table; throws PreconditionError on unknown columns.
std::string render_svg(const PlotSpec& spec, const std::vector<Table>& tables);

}  // namespace kahler
