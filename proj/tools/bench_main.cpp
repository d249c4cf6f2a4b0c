// Compares the serial reference kernels against their OpenMP counterparts on
// synthetic data: chunked file ingest+aggregation, min-max normalization, and
// the correlation coefficient.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "koedds/parallel_ingest.hpp"
#include "koedds/scoring.hpp"
#include "koedds/stats.hpp"
#include "synth_market.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& fn) {
  const auto t0 = Clock::now();
  fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void print_row(const char* name, double serial_ms, double parallel_ms,
               const char* note) {
  std::printf("%-20s %10.1f %12.1f %8.2fx  %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, note);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"koedds kernel benchmark: serial reference vs OpenMP"};
  double mb = 64.0;
  std::size_t values = 8'000'000;
  app.add_option("--mb", mb, "market TSV size to generate (MiB)");
  app.add_option("--values", values, "vector length for normalize/pearson");
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  const fs::path tsv = fs::temp_directory_path() / "koedds_bench_market.tsv";
  std::printf("generating %.0f MiB market TSV at %s ...\n", mb, tsv.c_str());
  koedds::synth::MarketOptions options;
  options.min_bytes = static_cast<std::uint64_t>(mb * 1024 * 1024);
  options.counties = 0;
  const std::size_t rows = koedds::synth::write_market_tsv(tsv.string(), options);
  std::printf("%zu rows\n\n", rows);

  std::printf("%-20s %10s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

  const koedds::StateCrosswalk& xwalk = koedds::StateCrosswalk::builtin();
  const koedds::IngestFilter filter;
  koedds::MarketIngestResult serial_ingest, parallel_ingest;
  const double ingest_serial_ms =
      time_ms([&] { serial_ingest = koedds::aggregate_market_file(tsv.string(), filter, xwalk); });
  const double ingest_parallel_ms = time_ms([&] {
    parallel_ingest = koedds::aggregate_market_file_parallel(tsv.string(), filter, xwalk);
  });
  double max_diff = 0.0;
  const auto& sa = serial_ingest.aggregate.aggregates;
  const auto& pa = parallel_ingest.aggregate.aggregates;
  if (sa.size() != pa.size()) {
    std::fprintf(stderr, "aggregate count mismatch: %zu vs %zu\n", sa.size(), pa.size());
    return 1;
  }
  for (std::size_t i = 0; i < sa.size(); ++i)
    max_diff = std::max(max_diff, std::fabs(sa[i].avg_price_yoy - pa[i].avg_price_yoy));
  char note[64];
  std::snprintf(note, sizeof note, "max |diff| %.2e over %zu counties", max_diff, sa.size());
  print_row("ingest+aggregate", ingest_serial_ms, ingest_parallel_ms, note);

  std::vector<double> xs(values), ys(values);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t i = 0; i < values; ++i) {
    xs[i] = dist(rng);
    ys[i] = 0.3 * xs[i] + dist(rng);
  }

  std::vector<double> norm_serial, norm_parallel;
  const double norm_serial_ms =
      time_ms([&] { norm_serial = koedds::min_max_normalize_serial(xs); });
  const double norm_parallel_ms =
      time_ms([&] { norm_parallel = koedds::min_max_normalize(xs); });
  print_row("min_max_normalize", norm_serial_ms, norm_parallel_ms,
            norm_serial == norm_parallel ? "bit-identical" : "MISMATCH");

  koedds::CorrelationResult r_serial, r_parallel;
  const double pearson_serial_ms = time_ms([&] { r_serial = koedds::pearson(xs, ys); });
  const double pearson_parallel_ms =
      time_ms([&] { r_parallel = koedds::pearson_parallel(xs, ys); });
  std::snprintf(note, sizeof note, "|dr| %.2e", std::fabs(r_serial.r - r_parallel.r));
  print_row("pearson", pearson_serial_ms, pearson_parallel_ms, note);

  std::error_code ec;
  fs::remove(tsv, ec);
  return 0;
}
