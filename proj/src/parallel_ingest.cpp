#include "koedds/parallel_ingest.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "koedds/error.hpp"
#include "koedds/text_source.hpp"

namespace koedds {

namespace {

constexpr std::uint64_t kNoNewline = ~std::uint64_t{0};

bool file_is_gzip(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw io_error(path + ": cannot open for reading");
  unsigned char magic[2] = {0, 0};
  const std::size_t got = std::fread(magic, 1, 2, f);
  std::fclose(f);
  return got == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
}

// Absolute offset of the first '\n' at or after `from`, or kNoNewline.
std::uint64_t find_newline_from(const std::string& path, std::uint64_t from,
                                std::uint64_t file_size) {
  if (from >= file_size) return kNoNewline;
  FileByteSource source(path, from);
  char buf[64 * 1024];
  std::uint64_t offset = from;
  for (;;) {
    const std::size_t got = source.read(buf, sizeof buf);
    if (got == 0) return kNoNewline;
    if (const char* nl = static_cast<const char*>(std::memchr(buf, '\n', got)))
      return offset + static_cast<std::uint64_t>(nl - buf);
    offset += got;
  }
}

int default_chunks() {
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

}  // namespace

MarketIngestResult aggregate_market_file(const std::string& path,
                                         const IngestFilter& filter,
                                         const StateCrosswalk& xwalk) {
  auto source = open_input(path);
  LineReader lines(*source);
  MarketStreamParser parser(lines, filter, path);
  CountyAccumulator acc(xwalk);
  MarketRecord record;
  while (parser.next(record)) acc.add(record);
  return {acc.finish(), parser.report()};
}

MarketIngestResult aggregate_market_file_parallel(const std::string& path,
                                                  const IngestFilter& filter,
                                                  const StateCrosswalk& xwalk,
                                                  int chunks) {
  if (file_is_gzip(path))  // a gzip stream has no seekable row boundaries
    return aggregate_market_file(path, filter, xwalk);

  std::error_code ec;
  const std::uint64_t size = std::filesystem::file_size(path, ec);
  if (ec) throw io_error(path + ": cannot stat: " + ec.message());

  // Header: everything before the first newline.
  const std::uint64_t header_end = find_newline_from(path, 0, size);
  std::string header_line;
  {
    const std::uint64_t header_len = header_end == kNoNewline ? size : header_end;
    FileByteSource source(path, 0, header_len);
    char buf[64 * 1024];
    for (;;) {
      const std::size_t got = source.read(buf, sizeof buf);
      if (got == 0) break;
      header_line.append(buf, got);
    }
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      header_line.erase(0, 3);
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
  }
  if (header_line.empty() && size == 0)
    throw format_error(path + ": empty input, header row expected");
  std::vector<std::string_view> names;
  split_tabs(header_line, names);
  const MarketColumns columns = market_column_map(names, path);

  MarketIngestResult out;
  out.ingest = IngestReport::for_market(path);

  const std::uint64_t data_start = header_end == kNoNewline ? size : header_end + 1;
  CountyAccumulator total(xwalk);
  if (data_start < size) {
    const std::uint64_t data_len = size - data_start;
    int n = chunks > 0 ? chunks : default_chunks();
    // No point in more chunks than ~64 KB slices of data.
    n = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(n), std::max<std::uint64_t>(1, data_len / (64 * 1024)) ));
    n = std::max(n, 1);

    // Boundaries land just after a newline, so every row belongs to exactly
    // one chunk and no row is split.
    std::vector<std::uint64_t> bounds(static_cast<std::size_t>(n) + 1);
    bounds[0] = data_start;
    bounds[static_cast<std::size_t>(n)] = size;
    for (int k = 1; k < n; ++k) {
      const std::uint64_t raw =
          data_start + data_len * static_cast<std::uint64_t>(k) / static_cast<std::uint64_t>(n);
      const std::uint64_t nl = find_newline_from(path, raw, size);
      bounds[static_cast<std::size_t>(k)] = nl == kNoNewline ? size : nl + 1;
    }
    for (int k = 1; k <= n; ++k)
      bounds[static_cast<std::size_t>(k)] =
          std::max(bounds[static_cast<std::size_t>(k)], bounds[static_cast<std::size_t>(k) - 1]);

    std::vector<CountyAccumulator> accs(static_cast<std::size_t>(n),
                                        CountyAccumulator(xwalk));
    std::vector<IngestReport> reports(static_cast<std::size_t>(n),
                                      IngestReport::for_market(path));

#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) {
      const std::uint64_t begin = bounds[static_cast<std::size_t>(k)];
      const std::uint64_t end = bounds[static_cast<std::size_t>(k) + 1];
      if (begin >= end) continue;
      FileByteSource source(path, begin, end - begin);
      LineReader lines(source);
      MarketRowParser row_parser(columns, filter);
      CountyAccumulator& acc = accs[static_cast<std::size_t>(k)];
      IngestReport& report = reports[static_cast<std::size_t>(k)];
      MarketRecord record;
      std::string_view line;
      while (lines.next(line)) {
        if (line.empty()) continue;
        ++report.rows_read;
        std::string_view reason;
        if (row_parser.parse(line, record, reason)) {
          ++report.rows_kept;
          acc.add(record);
        } else {
          report.drop(reason);
        }
      }
    }

    // Chunk-ordered fold: the merged result depends only on the chunk count,
    // never on how threads were scheduled.
    for (int k = 0; k < n; ++k) {
      total.merge(accs[static_cast<std::size_t>(k)]);
      out.ingest.merge(reports[static_cast<std::size_t>(k)]);
    }
  }

  out.aggregate = total.finish();
  return out;
}

}  // namespace koedds
