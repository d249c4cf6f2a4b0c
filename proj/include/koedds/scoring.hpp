#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "koedds/aggregate.hpp"
#include "koedds/geo_names.hpp"
#include "koedds/ingest_svi.hpp"

namespace koedds {

struct ScoreWeights {
  double growth = 0.5;
  double resilience = 0.5;

  // Both weights nonnegative and summing to 1 within 1e-9.
  void validate() const;
};

struct CountyScore {
  CountyKey key;
  double growth_raw = 0;   // mean YoY price growth, as ingested
  double growth_norm = 0;  // min-max normalized over the scored population
  double svi = 0;
  double resilience = 0;   // 1 - svi
  double score = 0;        // weighted composite
  double score_viz = 0;    // 1 - score, for red-is-bad map conventions
};

// Affine remap of each value onto [0, 1]: the minimum maps to 0, the maximum
// to 1. A degenerate all-equal input maps every value to 0.5. Output order
// matches input order. OpenMP-parallel; the min/max reduction is exact, so
// results are bit-identical to the serial reference at any thread count.
std::vector<double> min_max_normalize(std::span<const double> values);

// Serial reference kept for testing the parallel kernel.
std::vector<double> min_max_normalize_serial(std::span<const double> values);

// 1 - svi. A low vulnerability index is desirable, so scores reward its
// complement.
double resilience(double svi);

// w_growth * growth_norm + w_resilience * resilience.
double composite_score(double growth_norm, double resilience_value,
                       const ScoreWeights& weights);

struct JoinReport {
  std::size_t joined = 0;
  std::vector<CountyKey> market_only;  // sorted
  std::vector<CountyKey> svi_only;     // sorted
};

struct ScoreResult {
  // Sorted by descending score, ties broken by key ascending.
  std::vector<CountyScore> scores;
  JoinReport join;
};

// Inner-joins aggregates with SVI records on CountyKey and scores the joined
// set. Growth is normalized over exactly the scored population. An empty
// join is fatal; it signals key-canonicalization failure upstream.
ScoreResult score_counties(std::span<const CountyAggregate> aggregates,
                           std::span<const SviRecord> svi,
                           const ScoreWeights& weights);

}  // namespace koedds
