#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "koedds/aggregate.hpp"
#include "koedds/ingest_svi.hpp"
#include "koedds/scoring.hpp"

namespace koedds {

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
  std::string interpretation;
};

// |r| < 0.2 is "negligible"; above that the usual 0.4/0.6/0.8 grades apply.
std::string interpret_r(double r);

// Sample Pearson r, two-pass (means first, then centered sums).
CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys);

// Same contract as pearson(), computed from fixed-size chunk partials that are
// folded in chunk order, so the result is identical for any thread count.
CorrelationResult pearson_parallel(std::span<const double> xs,
                                   std::span<const double> ys);

// Joins aggregates with SVI rows by county key and correlates
// (svi_overall, annual growth) over the joined set.
CorrelationResult svi_growth_correlation(std::span<const CountyAggregate> aggregates,
                                         std::span<const SviRecord> svi);

struct FieldSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

struct ScoreSummary {
  std::size_t count = 0;
  FieldSummary score;
  FieldSummary growth_raw;
};

ScoreSummary summarize(std::span<const CountyScore> scores);

}  // namespace koedds
