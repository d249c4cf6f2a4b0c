#include <string>
#include <vector>

#include "doctest.h"
#include "koedds/error.hpp"
#include "koedds/ingest_svi.hpp"
#include "koedds/text_source.hpp"
#include "test_util.hpp"

using namespace koedds;
using testutil::fixture;

namespace {

constexpr const char* kHeader = "FIPS,ST_ABBR,COUNTY,RPL_THEMES";

SviParseResult parse_text(std::string text) {
  MemoryByteSource source(std::move(text));
  LineReader lines(source);
  return parse_svi(lines, StateCrosswalk::builtin(), "inline");
}

}  // namespace

TEST_CASE("svi rows parse into county records") {
  SviParseResult out =
      parse_text(std::string(kHeader) + "\n08001,CO,Adams County,0.437\n");
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].county_fips == "08001");
  CHECK(out.records[0].key == CountyKey{"08", "adams"});
  CHECK(out.records[0].svi_overall == 0.437);
  CHECK(out.report.rows_read == 1);
  CHECK(out.report.rows_kept == 1);
}

TEST_CASE("svi header may be permuted and carry extra columns") {
  SviParseResult out = parse_text(
      "RPL_THEME1,COUNTY,FIPS,RPL_THEMES,ST_ABBR\n0.9,Adams County,08001,0.437,CO\n");
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].key == CountyKey{"08", "adams"});
  CHECK(out.records[0].svi_overall == 0.437);
}

TEST_CASE("svi drop reasons are counted in check order") {
  auto drops_of = [](const std::string& row) {
    SviParseResult out = parse_text(std::string(kHeader) + "\n" + row + "\n");
    REQUIRE(out.report.rows_read == 1);
    REQUIRE(out.report.rows_kept == 0);
    for (const auto& [reason, count] : out.report.dropped) {
      if (count > 0) return reason;
    }
    return std::string("none");
  };

  CHECK(drops_of("08001,CO,Adams County") == "wrong_field_count");
  CHECK(drops_of("8001,CO,Adams County,0.437") == "bad_fips");
  CHECK(drops_of("080011,CO,Adams County,0.437") == "bad_fips");
  CHECK(drops_of("0800a,CO,Adams County,0.437") == "bad_fips");
  CHECK(drops_of("72001,PR,Adjuntas Municipio,0.5") == "unknown_state");
  CHECK(drops_of("08001,CO,County,0.437") == "bad_county_name");
  CHECK(drops_of("09001,CO,Adams County,0.437") == "fips_state_mismatch");
  CHECK(drops_of("08001,CO,Adams County,abc") == "invalid_svi_value");
  CHECK(drops_of("08001,CO,Adams County,") == "invalid_svi_value");
  CHECK(drops_of("08001,CO,Adams County,-999") == "svi_missing_sentinel");
  CHECK(drops_of("08001,CO,Adams County,-999.0") == "svi_missing_sentinel");
  CHECK(drops_of("08001,CO,Adams County,1.2") == "svi_out_of_range");
  CHECK(drops_of("08001,CO,Adams County,-0.1") == "svi_out_of_range");
  // Multiple defects count only the first check that fails.
  CHECK(drops_of("8001,PR,County,abc") == "bad_fips");
}

TEST_CASE("svi boundary percentiles are kept") {
  SviParseResult out = parse_text(std::string(kHeader) +
                                  "\n08001,CO,Adams County,0\n08005,CO,Arapahoe County,1\n");
  REQUIRE(out.records.size() == 2);
  CHECK(out.records[0].svi_overall == 0.0);
  CHECK(out.records[1].svi_overall == 1.0);
}

TEST_CASE("duplicate county fips is a fatal integrity error") {
  auto err = testutil::catch_error([] {
    parse_text(std::string(kHeader) +
               "\n08001,CO,Adams County,0.437\n08001,CO,Adams County,0.5\n");
  });
  CHECK(err.caught);
  CHECK(err.code == ExitCode::format);
  CHECK(testutil::contains(err.message, "08001"));
}

TEST_CASE("quoted county names unquote before canonicalization") {
  SviParseResult out =
      parse_text(std::string(kHeader) + "\n35013,NM,\"Doña Ana County\",0.788\n");
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].key == CountyKey{"35", "doña ana"});
}

TEST_CASE("svi requires its header") {
  auto err = testutil::catch_error([] { parse_text(""); });
  CHECK(err.caught);
  CHECK(err.code == ExitCode::format);

  err = testutil::catch_error([] { parse_text("A,B,C\n1,2,3\n") ; });
  CHECK(err.caught);
  CHECK(err.code == ExitCode::format);
  CHECK(testutil::contains(err.message, "FIPS"));
}

TEST_CASE("golden svi fixture accounting") {
  SviParseResult out = parse_svi_file(fixture("golden/svi.csv"), StateCrosswalk::builtin());
  CHECK(out.report.rows_read == 13);
  CHECK(out.report.rows_kept == 11);
  CHECK(out.report.dropped.at("svi_missing_sentinel") == 1);
  CHECK(out.report.dropped.at("svi_out_of_range") == 1);
  CHECK(out.report.dropped.at("bad_fips") == 0);
  CHECK(out.records.size() == 11);
  CHECK(out.report.rows_read == out.report.rows_kept + out.report.dropped_total());
}
