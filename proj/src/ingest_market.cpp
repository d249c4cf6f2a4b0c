#include "koedds/ingest_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "koedds/error.hpp"

namespace koedds {

namespace {

constexpr std::string_view kMarketDropReasons[] = {
    "wrong_field_count",    "region_type_not_county", "property_type_filtered",
    "bad_region",           "bad_date",               "inverted_period",
    "missing_growth_field", "invalid_growth_value",
};

constexpr std::string_view kSviDropReasons[] = {
    "wrong_field_count", "bad_fips",           "unknown_state",
    "bad_county_name",   "fips_state_mismatch", "invalid_svi_value",
    "svi_missing_sentinel", "svi_out_of_range",
};

bool parse_finite_double(std::string_view cell, double& out) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && ptr == e && std::isfinite(out);
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

}  // namespace

std::optional<Date> parse_iso_date(std::string_view s) {
  s = trim(s);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
  Date d;
  d.year = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
  d.month = (s[5] - '0') * 10 + (s[6] - '0');
  d.day = (s[8] - '0') * 10 + (s[9] - '0');
  if (d.month < 1 || d.month > 12) return std::nullopt;
  if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
  return d;
}

std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::size_t IngestReport::dropped_total() const {
  std::size_t total = 0;
  for (const auto& [_, n] : dropped) total += n;
  return total;
}

void IngestReport::drop(std::string_view reason) { ++dropped[std::string(reason)]; }

void IngestReport::merge(const IngestReport& other) {
  rows_read += other.rows_read;
  rows_kept += other.rows_kept;
  for (const auto& [reason, n] : other.dropped) dropped[reason] += n;
}

IngestReport IngestReport::for_market(std::string source) {
  IngestReport r;
  r.source = std::move(source);
  for (std::string_view reason : kMarketDropReasons) r.dropped[std::string(reason)] = 0;
  return r;
}

IngestReport IngestReport::for_svi(std::string source) {
  IngestReport r;
  r.source = std::move(source);
  for (std::string_view reason : kSviDropReasons) r.dropped[std::string(reason)] = 0;
  return r;
}

std::size_t ColumnMap::at(std::string_view name) const {
  return index.at(std::string(name));
}

std::optional<std::size_t> ColumnMap::find(std::string_view name) const {
  auto it = index.find(std::string(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

ColumnMap column_map(std::span<const std::string_view> header,
                     std::span<const std::string_view> required,
                     std::span<const std::string_view> optional,
                     std::string_view source) {
  ColumnMap map;
  auto locate = [&](std::string_view name, bool must_exist) {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) != name) continue;
      if (found)
        throw format_error(std::string(source) + ": duplicate column '" +
                           std::string(name) + "'");
      found = i;
    }
    if (found) {
      map.index.emplace(std::string(name), *found);
      map.min_fields = std::max(map.min_fields, *found + 1);
    }
    return found.has_value() || !must_exist;
  };

  std::vector<std::string_view> missing;
  for (std::string_view name : required)
    if (!locate(name, true)) missing.push_back(name);
  for (std::string_view name : optional) locate(name, false);

  if (!missing.empty()) {
    std::string msg = std::string(source) + ": missing required column(s): ";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (i) msg += ", ";
      msg += missing[i];
    }
    throw format_error(msg);
  }
  return map;
}

const std::string_view kMarketRequiredColumns[8] = {
    "period_begin",   "period_end",     "region",
    "property_type",  "homes_sold_mom", "homes_sold_yoy",
    "median_sale_price_mom", "median_sale_price_yoy",
};

const std::string_view kMarketOptionalColumns[1] = {"region_type"};

MarketColumns market_column_map(std::span<const std::string_view> header,
                                std::string_view source) {
  ColumnMap map = column_map(header, kMarketRequiredColumns, kMarketOptionalColumns, source);
  MarketColumns c{};
  c.period_begin = map.at("period_begin");
  c.period_end = map.at("period_end");
  c.region = map.at("region");
  c.property_type = map.at("property_type");
  c.homes_sold_mom = map.at("homes_sold_mom");
  c.homes_sold_yoy = map.at("homes_sold_yoy");
  c.median_sale_price_mom = map.at("median_sale_price_mom");
  c.median_sale_price_yoy = map.at("median_sale_price_yoy");
  c.region_type = map.find("region_type");
  c.min_fields = map.min_fields;
  return c;
}

MarketRowParser::MarketRowParser(const MarketColumns& columns, IngestFilter filter)
    : columns_(columns), filter_(std::move(filter)) {}

bool MarketRowParser::parse(std::string_view line, MarketRecord& out,
                            std::string_view& reason) const {
  split_tabs(line, fields_);
  if (fields_.size() < columns_.min_fields) {
    reason = "wrong_field_count";
    return false;
  }
  if (columns_.region_type && trim(fields_[*columns_.region_type]) != "county") {
    reason = "region_type_not_county";
    return false;
  }
  std::string_view property_type = fields_[columns_.property_type];
  if (trim(property_type) != filter_.property_type) {
    reason = "property_type_filtered";
    return false;
  }

  // region must look like "<county text>, <2-letter state>"; crosswalk
  // membership is checked downstream where unmatched rows are reported
  std::string_view region = fields_[columns_.region];
  std::string_view region_trimmed = trim(region);
  std::size_t comma = region_trimmed.rfind(',');
  bool region_ok = !region_trimmed.empty() && comma != std::string_view::npos;
  if (region_ok) {
    std::string_view state = trim(region_trimmed.substr(comma + 1));
    region_ok = state.size() == 2 &&
                std::isalpha(static_cast<unsigned char>(state[0])) &&
                std::isalpha(static_cast<unsigned char>(state[1])) &&
                !trim(region_trimmed.substr(0, comma)).empty();
  }
  if (!region_ok) {
    reason = "bad_region";
    return false;
  }

  auto begin = parse_iso_date(fields_[columns_.period_begin]);
  auto end = parse_iso_date(fields_[columns_.period_end]);
  if (!begin || !end) {
    reason = "bad_date";
    return false;
  }
  if (*begin > *end) {
    reason = "inverted_period";
    return false;
  }

  const std::size_t growth_cols[4] = {columns_.homes_sold_mom, columns_.homes_sold_yoy,
                                      columns_.median_sale_price_mom,
                                      columns_.median_sale_price_yoy};
  double growth[4];
  for (std::size_t col : growth_cols)
    if (trim(fields_[col]).empty()) {
      reason = "missing_growth_field";
      return false;
    }
  for (int i = 0; i < 4; ++i)
    if (!parse_finite_double(trim(fields_[growth_cols[i]]), growth[i])) {
      reason = "invalid_growth_value";
      return false;
    }

  out.period_begin = *begin;
  out.period_end = *end;
  out.region.assign(region);
  out.property_type.assign(property_type);
  out.homes_sold_mom = growth[0];
  out.homes_sold_yoy = growth[1];
  out.median_sale_price_mom = growth[2];
  out.median_sale_price_yoy = growth[3];
  return true;
}

namespace {

MarketColumns read_market_header(LineReader& lines, const std::string& source) {
  std::string_view header;
  if (!lines.next(header)) throw format_error(source + ": empty input, header row expected");
  std::vector<std::string_view> names;
  split_tabs(header, names);
  return market_column_map(names, source);
}

}  // namespace

MarketStreamParser::MarketStreamParser(LineReader& lines, IngestFilter filter,
                                       std::string source_name)
    : lines_(lines),
      columns_(read_market_header(lines, source_name)),
      row_parser_(columns_, std::move(filter)),
      report_(IngestReport::for_market(std::move(source_name))) {}

bool MarketStreamParser::next(MarketRecord& out) {
  std::string_view line;
  while (lines_.next(line)) {
    if (line.empty()) continue;  // blank lines are not rows
    ++report_.rows_read;
    std::string_view reason;
    if (row_parser_.parse(line, out, reason)) {
      ++report_.rows_kept;
      return true;
    }
    report_.drop(reason);
  }
  return false;
}

}  // namespace koedds
