#include "koedds/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "koedds/error.hpp"

namespace koedds {

namespace {

void check_pair_shape(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw stats_error("ShapeError: series lengths differ (" + std::to_string(xs.size()) +
                      " vs " + std::to_string(ys.size()) + ")");
  if (xs.size() < 2)
    throw stats_error("ShapeError: need at least 2 observations, got " +
                      std::to_string(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw stats_error("NonFinite: observation at index " + std::to_string(i) +
                        " is not finite");
}

CorrelationResult finish_pearson(double sxx, double syy, double sxy, std::size_t n) {
  if (sxx == 0.0)
    throw stats_error("DegenerateVariance: first series is constant, r undefined");
  if (syy == 0.0)
    throw stats_error("DegenerateVariance: second series is constant, r undefined");
  CorrelationResult result;
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  result.n = n;
  result.interpretation = interpret_r(result.r);
  return result;
}

}  // namespace

std::string interpret_r(double r) {
  const double a = std::abs(r);
  if (a < 0.2) return "negligible";
  if (a < 0.4) return "weak";
  if (a < 0.6) return "moderate";
  if (a < 0.8) return "strong";
  return "very strong";
}

CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys) {
  check_pair_shape(xs, ys);
  const std::size_t n = xs.size();

  double sum_x = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_x += xs[i];
    sum_y += ys[i];
  }
  const double mean_x = sum_x / static_cast<double>(n);
  const double mean_y = sum_y / static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return finish_pearson(sxx, syy, sxy, n);
}

CorrelationResult pearson_parallel(std::span<const double> xs,
                                   std::span<const double> ys) {
  check_pair_shape(xs, ys);
  const std::size_t n = xs.size();

  // Chunk geometry depends only on n, and partials are folded in chunk order,
  // so the answer is a pure function of the data — thread count never shows.
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;

  std::vector<double> part_x(chunks, 0.0), part_y(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(lo + kChunk, n);
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sx += xs[i];
      sy += ys[i];
    }
    part_x[static_cast<std::size_t>(c)] = sx;
    part_y[static_cast<std::size_t>(c)] = sy;
  }
  double sum_x = 0.0, sum_y = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum_x += part_x[c];
    sum_y += part_y[c];
  }
  const double mean_x = sum_x / static_cast<double>(n);
  const double mean_y = sum_y / static_cast<double>(n);

  std::vector<double> part_xx(chunks, 0.0), part_yy(chunks, 0.0), part_xy(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(lo + kChunk, n);
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double dx = xs[i] - mean_x;
      const double dy = ys[i] - mean_y;
      xx += dx * dx;
      yy += dy * dy;
      xy += dx * dy;
    }
    part_xx[static_cast<std::size_t>(c)] = xx;
    part_yy[static_cast<std::size_t>(c)] = yy;
    part_xy[static_cast<std::size_t>(c)] = xy;
  }
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sxx += part_xx[c];
    syy += part_yy[c];
    sxy += part_xy[c];
  }
  return finish_pearson(sxx, syy, sxy, n);
}

CorrelationResult svi_growth_correlation(std::span<const CountyAggregate> aggregates,
                                         std::span<const SviRecord> svi) {
  std::map<CountyKey, double> svi_by_key;
  for (const SviRecord& r : svi) {
    auto [it, inserted] = svi_by_key.emplace(r.key, r.svi_overall);
    if (!inserted)
      throw format_error("duplicate SVI county key '" + r.key.state_fips + " " +
                         r.key.county_name + "'");
  }

  std::vector<double> xs, ys;
  xs.reserve(aggregates.size());
  ys.reserve(aggregates.size());
  for (const CountyAggregate& a : aggregates) {
    auto it = svi_by_key.find(a.key);
    if (it == svi_by_key.end()) continue;
    xs.push_back(it->second);
    ys.push_back(annual_growth(a));
  }
  if (xs.size() < 2)
    throw stats_error("ShapeError: need at least 2 joined counties, got " +
                      std::to_string(xs.size()));
  return pearson(xs, ys);
}

namespace {

FieldSummary summarize_field(std::vector<double> values) {
  FieldSummary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = (n % 2 == 1) ? values[n / 2]
                          : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  return s;
}

}  // namespace

ScoreSummary summarize(std::span<const CountyScore> scores) {
  if (scores.empty()) throw join_error("EmptyDomain: cannot summarize an empty list");
  ScoreSummary out;
  out.count = scores.size();
  std::vector<double> score_values(scores.size()), growth_values(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    score_values[i] = scores[i].score;
    growth_values[i] = scores[i].growth_raw;
  }
  out.score = summarize_field(std::move(score_values));
  out.growth_raw = summarize_field(std::move(growth_values));
  return out;
}

}  // namespace koedds
