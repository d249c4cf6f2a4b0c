#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "koedds/text_source.hpp"

namespace koedds {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
};

// Strict ISO 8601 YYYY-MM-DD with calendar validation.
std::optional<Date> parse_iso_date(std::string_view s);
std::string format_iso_date(const Date& d);

// One monthly county observation. Growth fields are dimensionless fractions
// (0.02 = +2%).
struct MarketRecord {
  Date period_begin;
  Date period_end;
  std::string region;         // raw, e.g. "Adams County, CO"
  std::string property_type;  // e.g. "All Residential"
  double homes_sold_mom = 0;
  double homes_sold_yoy = 0;
  double median_sale_price_mom = 0;
  double median_sale_price_yoy = 0;
};

struct IngestFilter {
  std::string property_type = "All Residential";
};

// Row accounting for one input stream. Drop-reason keys are fixed up front so
// reports always carry the full counter set, zeros included.
struct IngestReport {
  std::string source;
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::map<std::string, std::size_t> dropped;

  std::size_t dropped_total() const;
  void drop(std::string_view reason);
  // Sums counts; reason sets are unioned.
  void merge(const IngestReport& other);

  static IngestReport for_market(std::string source);
  static IngestReport for_svi(std::string source);
};

// Maps semantic fields to column indexes by exact header name. Column order
// is never assumed.
struct ColumnMap {
  std::map<std::string, std::size_t> index;
  std::size_t min_fields = 0;  // 1 + max used index

  std::size_t at(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;
};

// Resolves required (and optional) names against a header row. Missing
// required names are reported all at once; a duplicated required or optional
// name is a fatal "duplicate column" error.
ColumnMap column_map(std::span<const std::string_view> header,
                     std::span<const std::string_view> required,
                     std::span<const std::string_view> optional = {},
                     std::string_view source = "input");

extern const std::string_view kMarketRequiredColumns[8];
extern const std::string_view kMarketOptionalColumns[1];

struct MarketColumns {
  std::size_t period_begin, period_end, region, property_type;
  std::size_t homes_sold_mom, homes_sold_yoy;
  std::size_t median_sale_price_mom, median_sale_price_yoy;
  std::optional<std::size_t> region_type;
  std::size_t min_fields;
};

MarketColumns market_column_map(std::span<const std::string_view> header,
                                std::string_view source = "input");

// Validates one data row against the checks below, in order; the first
// failing check names the drop reason:
//   wrong_field_count, region_type_not_county, property_type_filtered,
//   bad_region, bad_date, inverted_period, missing_growth_field,
//   invalid_growth_value
class MarketRowParser {
 public:
  MarketRowParser(const MarketColumns& columns, IngestFilter filter);

  // Returns true and fills `out` for a kept row; otherwise sets `reason`.
  bool parse(std::string_view line, MarketRecord& out, std::string_view& reason) const;

 private:
  MarketColumns columns_;
  IngestFilter filter_;
  mutable std::vector<std::string_view> fields_;
};

// Pull-based streaming parser over header-first TSV. Reads the header in the
// constructor (fatal on missing columns) and then yields kept records one at
// a time; malformed rows are counted, never fatal. Memory use is bounded by
// the longest row.
class MarketStreamParser {
 public:
  MarketStreamParser(LineReader& lines, IngestFilter filter, std::string source_name);

  bool next(MarketRecord& out);
  const IngestReport& report() const { return report_; }
  const MarketColumns& columns() const { return columns_; }

 private:
  LineReader& lines_;
  MarketColumns columns_;
  MarketRowParser row_parser_;
  IngestReport report_;
};

}  // namespace koedds
