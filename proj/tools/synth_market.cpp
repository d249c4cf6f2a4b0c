#include "synth_market.hpp"

#include <cstdio>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "koedds/geo_names.hpp"

namespace koedds::synth {

namespace {

constexpr std::size_t kMaxCounties = 50999;  // 3-digit county number per state

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_out(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  return File(f);
}

const StateEntry& state_for(std::size_t i) {
  const auto& entries = StateCrosswalk::builtin().entries();
  return entries[i % entries.size()];
}

std::mt19937_64 rng_for(std::uint64_t seed, std::size_t i) {
  return std::mt19937_64(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
}

}  // namespace

std::string county_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "c%05zu", i);
  return buf;
}

std::string county_region(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%05zu", i);
  return std::string(buf) + " County, " + state_for(i).postal;
}

std::size_t write_market_tsv(const std::string& path, const MarketOptions& options) {
  File f = open_out(path);
  static const char kHeader[] =
      "period_begin\tperiod_end\tregion_type\tregion\tproperty_type\t"
      "homes_sold_mom\thomes_sold_yoy\tmedian_sale_price_mom\tmedian_sale_price_yoy\n";
  std::uint64_t bytes = std::fwrite(kHeader, 1, sizeof kHeader - 1, f.get());

  std::uniform_real_distribution<double> price_yoy(-0.10, 0.20);
  std::uniform_real_distribution<double> price_mom(-0.05, 0.05);
  std::uniform_real_distribution<double> homes_yoy(-0.30, 0.30);
  std::uniform_real_distribution<double> homes_mom(-0.20, 0.20);

  std::size_t rows = 0;
  for (std::size_t i = 0;; ++i) {
    if (i >= options.counties && (options.min_bytes == 0 || bytes >= options.min_bytes))
      break;
    if (i >= kMaxCounties) throw std::runtime_error("too many synthetic counties");
    std::mt19937_64 rng = rng_for(options.seed, i);
    const std::string region = county_region(i);
    for (std::size_t m = 0; m < options.months; ++m) {
      const int year = 2020 + static_cast<int>(m / 12);
      const int month = static_cast<int>(m % 12) + 1;
      char line[256];
      const int len = std::snprintf(
          line, sizeof line,
          "%04d-%02d-01\t%04d-%02d-28\tcounty\t%s\tAll Residential\t"
          "%.4f\t%.4f\t%.4f\t%.4f\n",
          year, month, year, month, region.c_str(), homes_mom(rng), homes_yoy(rng),
          price_mom(rng), price_yoy(rng));
      std::fwrite(line, 1, static_cast<std::size_t>(len), f.get());
      bytes += static_cast<std::uint64_t>(len);
      ++rows;
    }
  }
  if (std::fflush(f.get()) != 0) throw std::runtime_error(path + ": write failed");
  return rows;
}

std::size_t write_svi_csv(const std::string& path, std::uint64_t seed,
                          std::size_t counties) {
  if (counties > kMaxCounties) throw std::runtime_error("too many synthetic counties");
  File f = open_out(path);
  static const char kHeader[] = "FIPS,ST_ABBR,COUNTY,RPL_THEMES\n";
  std::fwrite(kHeader, 1, sizeof kHeader - 1, f.get());

  std::uniform_real_distribution<double> svi(0.0, 1.0);
  for (std::size_t i = 0; i < counties; ++i) {
    std::mt19937_64 rng = rng_for(seed ^ 0x5151, i);
    const StateEntry& state = state_for(i);
    char line[128];
    const int len = std::snprintf(line, sizeof line, "%s%03zu,%s,C%05zu County,%.4f\n",
                                  state.fips.c_str(), i / 51, state.postal.c_str(), i,
                                  svi(rng));
    std::fwrite(line, 1, static_cast<std::size_t>(len), f.get());
  }
  if (std::fflush(f.get()) != 0) throw std::runtime_error(path + ": write failed");
  return counties;
}

}  // namespace koedds::synth
