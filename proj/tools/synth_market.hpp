#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace koedds::synth {

struct MarketOptions {
  std::uint64_t seed = 42;
  std::size_t counties = 200;
  std::size_t months = 24;
  // When nonzero, counties are added until the file reaches this size.
  std::uint64_t min_bytes = 0;
};

// Canonical name and raw region string for synthetic county index i.
std::string county_name(std::size_t i);
std::string county_region(std::size_t i);

// Writes a well-formed market TSV (header + counties*months rows); returns
// the data-row count. Deterministic for a given option set.
std::size_t write_market_tsv(const std::string& path, const MarketOptions& options);

// Writes an SVI CSV whose rows join 1:1 with the first `counties` synthetic
// market counties. Returns the data-row count.
std::size_t write_svi_csv(const std::string& path, std::uint64_t seed,
                          std::size_t counties);

}  // namespace koedds::synth
