#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "koedds/aggregate.hpp"
#include "koedds/geo_names.hpp"
#include "koedds/ingest_market.hpp"
#include "koedds/scoring.hpp"
#include "koedds/stats.hpp"

namespace koedds {

struct AugmentOptions {
  std::string property_name = "investment_score";
  // When true the injected value is score_viz (1 - score), the red-is-bad
  // map convention; otherwise the score itself.
  bool use_viz_inversion = true;
};

struct MatchReport {
  std::size_t matched = 0;
  std::vector<std::size_t> unmatched_features;  // feature indexes, ascending
  std::vector<CountyKey> unmatched_scores;      // sorted
};

// Reads and parses a GeoJSON document (gzip input unwrapped transparently).
nlohmann::json load_geojson(const std::string& path);

// Injects one score property into each feature whose STATE/NAME identify a
// scored county. Everything else in the document — geometries, extra
// properties, foreign members — passes through untouched. A score matching
// two or more features is fatal.
MatchReport augment_geojson(nlohmann::json& doc, std::span<const CountyScore> scores,
                            const AugmentOptions& options);

// CSV with a fixed header and 6-decimal fields, rows in input order.
std::string render_scores_csv(std::span<const CountyScore> scores);

// Writes render_scores_csv(scores) to destination; returns the data-row count.
std::size_t write_scores_csv(std::span<const CountyScore> scores,
                             const std::string& destination);

// Write-to-temp + rename so a failed run never leaves a partial file.
void write_text_atomic(const std::string& destination, const std::string& content);

// Configuration echo for the report: what the run actually used.
struct ReportConfig {
  double w_growth = 0.5;
  double w_resilience = 0.5;
  std::string property_type = "All Residential";
  int min_months = 12;
  bool viz_invert = true;
  std::string score_property = "investment_score";
};

struct AggregationFigures {
  std::size_t records = 0;          // market records aggregated
  std::size_t region_unparsed = 0;  // records whose region did not parse
  std::size_t counties = 0;         // counties surviving the min-months filter
  std::size_t below_min_months = 0; // counties removed by the filter
};

struct ReportInputs {
  std::string market;
  std::string svi;
  std::string geojson;  // empty when no GeoJSON was supplied
};

// Assembles the machine-readable run report. Keys are emitted in sorted
// order; every drop counter appears even when zero. `match` may be null when
// no GeoJSON output was requested. `generated_at` is the only field that
// varies between identical runs.
nlohmann::json build_report(const ReportInputs& inputs, const IngestReport& market,
                            const IngestReport& svi, const AggregationFigures& agg,
                            const JoinReport& join, const MatchReport* match,
                            const CorrelationResult& correlation,
                            const ScoreSummary& summary, const ReportConfig& config,
                            const std::string& generated_at);

// Current UTC time as ISO 8601 (e.g. "2024-05-01T12:00:00Z").
std::string utc_timestamp();

void write_report_json(const nlohmann::json& report, const std::string& destination);

// Serializes with 2-space indentation and a trailing newline — the canonical
// form used for golden comparisons.
std::string canonical_json(const nlohmann::json& doc);

}  // namespace koedds
