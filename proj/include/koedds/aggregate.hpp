#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "koedds/geo_names.hpp"
#include "koedds/ingest_market.hpp"

namespace koedds {

// Per-county averages over all contributing months.
struct CountyAggregate {
  CountyKey key;
  std::size_t n_months = 0;
  double avg_price_yoy = 0;
  double avg_price_mom = 0;
  double avg_homes_sold_yoy = 0;
  double avg_homes_sold_mom = 0;
};

struct AggregateReport {
  std::size_t records_in = 0;
  std::size_t region_unparsed = 0;  // rows whose region had no crosswalk match
};

// The growth figure carried into scoring and the SVI correlation: the mean
// year-over-year median-sale-price change.
inline double annual_growth(const CountyAggregate& a) { return a.avg_price_yoy; }

struct AggregateResult {
  std::vector<CountyAggregate> aggregates;  // sorted by (state_fips, county_name)
  AggregateReport report;
};

// Streaming accumulator: one running sum per county, so memory scales with
// the number of distinct counties, not with input length. Sums follow input
// order; two accumulators over disjoint partitions merge exactly.
class CountyAccumulator {
 public:
  explicit CountyAccumulator(const StateCrosswalk& xwalk) : xwalk_(&xwalk) {}

  void add(const MarketRecord& record);
  void merge(const CountyAccumulator& other);
  AggregateResult finish() const;

 private:
  struct Sums {
    std::size_t n = 0;
    double price_yoy = 0, price_mom = 0, homes_yoy = 0, homes_mom = 0;
  };
  const StateCrosswalk* xwalk_;
  std::unordered_map<CountyKey, Sums, CountyKeyHash> sums_;
  AggregateReport report_;
};

// Serial reference: sorts the full record list by county and then by period
// end before averaging, which also makes the result independent of input
// order bit for bit. Kept for testing against the streaming and parallel
// paths.
AggregateResult aggregate_by_county(std::vector<MarketRecord> records,
                                    const StateCrosswalk& xwalk);

// Weighted-mean merge of two aggregates for the same county
// (weights = month counts).
CountyAggregate merge_aggregates(const CountyAggregate& a, const CountyAggregate& b);

// Drops counties observed fewer than min_months times; the removed keys land
// in `removed` when provided.
std::vector<CountyAggregate> filter_min_months(std::vector<CountyAggregate> aggregates,
                                               std::size_t min_months,
                                               std::vector<CountyKey>* removed = nullptr);

}  // namespace koedds
