#include "koedds/ingest_svi.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "koedds/error.hpp"

namespace koedds {

namespace {

constexpr std::string_view kRequired[] = {"FIPS", "ST_ABBR", "COUNTY", "RPL_THEMES"};

bool all_digits(std::string_view s) {
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return !s.empty();
}

}  // namespace

SviParseResult parse_svi(LineReader& lines, const StateCrosswalk& xwalk,
                         std::string source_name) {
  std::string_view line;
  if (!lines.next(line))
    throw format_error(source_name + ": empty input, header row expected");
  std::vector<std::string> header_fields;
  if (!split_csv_line(line, header_fields))
    throw format_error(source_name + ": malformed CSV header");
  std::vector<std::string_view> header(header_fields.begin(), header_fields.end());
  ColumnMap map = column_map(header, kRequired, {}, source_name);
  const std::size_t col_fips = map.at("FIPS");
  const std::size_t col_st = map.at("ST_ABBR");
  const std::size_t col_county = map.at("COUNTY");
  const std::size_t col_svi = map.at("RPL_THEMES");

  SviParseResult result;
  result.report = IngestReport::for_svi(std::move(source_name));
  IngestReport& report = result.report;

  std::vector<std::string> fields;
  std::unordered_set<std::string> seen_fips;
  while (lines.next(line)) {
    if (trim(line).empty()) continue;
    ++report.rows_read;
    if (!split_csv_line(line, fields) || fields.size() < map.min_fields) {
      report.drop("wrong_field_count");
      continue;
    }
    std::string fips(trim(fields[col_fips]));
    if (fips.size() != 5 || !all_digits(fips)) {
      report.drop("bad_fips");
      continue;
    }
    auto state_fips = xwalk.fips_for(trim(fields[col_st]));
    if (!state_fips) {
      report.drop("unknown_state");
      continue;
    }
    auto county = try_canonicalize_county_name(fields[col_county]);
    if (!county) {
      report.drop("bad_county_name");
      continue;
    }
    if (std::string_view(fips).substr(0, 2) != *state_fips) {
      report.drop("fips_state_mismatch");
      continue;
    }
    std::string_view cell = trim(fields[col_svi]);
    double value = 0;
    {
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        report.drop("invalid_svi_value");
        continue;
      }
    }
    if (value == -999.0) {
      report.drop("svi_missing_sentinel");
      continue;
    }
    if (value < 0.0 || value > 1.0) {
      report.drop("svi_out_of_range");
      continue;
    }
    if (!seen_fips.insert(fips).second)
      throw format_error(report.source + ": duplicate county FIPS '" + fips + "'");
    ++report.rows_kept;
    result.records.push_back(
        SviRecord{std::move(fips), CountyKey{std::string(*state_fips), *std::move(county)},
                  value});
  }
  return result;
}

SviParseResult parse_svi_file(const std::string& path, const StateCrosswalk& xwalk) {
  auto source = open_input(path);
  LineReader lines(*source);
  return parse_svi(lines, xwalk, path);
}

}  // namespace koedds
