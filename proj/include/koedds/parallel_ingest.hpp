#pragma once

#include <string>

#include "koedds/aggregate.hpp"
#include "koedds/geo_names.hpp"
#include "koedds/ingest_market.hpp"

namespace koedds {

struct MarketIngestResult {
  AggregateResult aggregate;   // sorted by county key
  IngestReport ingest;
};

// Single-pass serial ingest + aggregation of one market TSV. This is the
// production path: bounded memory, byte-for-byte deterministic.
MarketIngestResult aggregate_market_file(const std::string& path,
                                         const IngestFilter& filter,
                                         const StateCrosswalk& xwalk);

// Chunked OpenMP variant: splits the file at row boundaries, aggregates
// chunks in parallel, then folds the partial sums in chunk order. For a fixed
// chunk count the result is a pure function of the file contents, independent
// of thread count, but per-county sums may differ from the serial path in the
// last bits (summation order changes). Gzip input cannot be split and falls
// back to the serial path.
//
// chunks == 0 picks one chunk per available thread.
MarketIngestResult aggregate_market_file_parallel(const std::string& path,
                                                  const IngestFilter& filter,
                                                  const StateCrosswalk& xwalk,
                                                  int chunks = 0);

}  // namespace koedds
