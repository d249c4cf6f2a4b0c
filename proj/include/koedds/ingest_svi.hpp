#pragma once

#include <string>
#include <vector>

#include "koedds/geo_names.hpp"
#include "koedds/ingest_market.hpp"
#include "koedds/text_source.hpp"

namespace koedds {

// One county's combined social-vulnerability percentile.
struct SviRecord {
  std::string county_fips;  // 5 digits: state + county
  CountyKey key;
  double svi_overall = 0;   // percentile in [0, 1]
};

struct SviParseResult {
  std::vector<SviRecord> records;
  IngestReport report;
};

// Parses the county SVI CSV. Required columns: FIPS, ST_ABBR, COUNTY,
// RPL_THEMES. Rows carrying the -999 missing-data sentinel or out-of-range
// percentiles are dropped and counted; a duplicated county FIPS is a fatal
// integrity error. Sub-theme columns are ignored.
SviParseResult parse_svi(LineReader& lines, const StateCrosswalk& xwalk,
                         std::string source_name);

SviParseResult parse_svi_file(const std::string& path, const StateCrosswalk& xwalk);

}  // namespace koedds
