#include "koedds/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "koedds/error.hpp"

namespace koedds {

namespace {

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw format_error(std::string("DomainError: ") + what + " = " + std::to_string(v) +
                       " outside [0, 1]");
}

void check_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw format_error("NonFinite: value at index " + std::to_string(i) +
                         " is not finite");
}

}  // namespace

void ScoreWeights::validate() const {
  if (!(growth >= 0.0) || !(resilience >= 0.0))
    throw usage_error("weights must be nonnegative");
  if (std::abs(growth + resilience - 1.0) > 1e-9)
    throw usage_error("weights must sum to 1 (got " + std::to_string(growth) + " + " +
                      std::to_string(resilience) + ")");
}

std::vector<double> min_max_normalize_serial(std::span<const double> values) {
  if (values.empty()) throw join_error("EmptyDomain: cannot normalize an empty list");
  check_finite(values);
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> out(values.size());
  if (lo == hi) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / span;
  return out;
}

std::vector<double> min_max_normalize(std::span<const double> values) {
  if (values.empty()) throw join_error("EmptyDomain: cannot normalize an empty list");
  check_finite(values);
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  double lo = values[0], hi = values[0];
#pragma omp parallel for reduction(min : lo) reduction(max : hi) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  std::vector<double> out(values.size());
  if (lo == hi) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double span = hi - lo;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = (values[i] - lo) / span;
  return out;
}

double resilience(double svi) {
  check_unit_interval(svi, "svi");
  return 1.0 - svi;
}

double composite_score(double growth_norm, double resilience_value,
                       const ScoreWeights& weights) {
  weights.validate();
  check_unit_interval(growth_norm, "growth_norm");
  check_unit_interval(resilience_value, "resilience");
  return weights.growth * growth_norm + weights.resilience * resilience_value;
}

ScoreResult score_counties(std::span<const CountyAggregate> aggregates,
                           std::span<const SviRecord> svi,
                           const ScoreWeights& weights) {
  weights.validate();

  std::map<CountyKey, const SviRecord*> svi_by_key;
  for (const SviRecord& r : svi) {
    auto [it, inserted] = svi_by_key.emplace(r.key, &r);
    if (!inserted)
      throw format_error("duplicate SVI county key '" + r.key.state_fips + " " +
                         r.key.county_name + "'");
  }

  ScoreResult result;
  std::vector<const CountyAggregate*> joined_agg;
  std::vector<const SviRecord*> joined_svi;
  for (const CountyAggregate& a : aggregates) {
    auto it = svi_by_key.find(a.key);
    if (it == svi_by_key.end()) {
      result.join.market_only.push_back(a.key);
      continue;
    }
    joined_agg.push_back(&a);
    joined_svi.push_back(it->second);
    svi_by_key.erase(it);
  }
  for (const auto& [key, _] : svi_by_key) result.join.svi_only.push_back(key);
  std::sort(result.join.market_only.begin(), result.join.market_only.end());
  // svi_only is already sorted: it comes out of an ordered map

  if (joined_agg.empty())
    throw join_error("EmptyJoin: no county matched between market and SVI inputs");
  result.join.joined = joined_agg.size();

  // normalization domain is the scored population, nothing wider
  std::vector<double> growth(joined_agg.size());
  for (std::size_t i = 0; i < joined_agg.size(); ++i) growth[i] = annual_growth(*joined_agg[i]);
  std::vector<double> growth_norm = min_max_normalize(growth);

  const std::int64_t n = static_cast<std::int64_t>(joined_agg.size());
  result.scores.resize(joined_agg.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    CountyScore& s = result.scores[i];
    s.key = joined_agg[i]->key;
    s.growth_raw = growth[i];
    s.growth_norm = growth_norm[i];
    s.svi = joined_svi[i]->svi_overall;
    s.resilience = 1.0 - s.svi;
    s.score = weights.growth * s.growth_norm + weights.resilience * s.resilience;
    s.score_viz = 1.0 - s.score;
  }

  std::sort(result.scores.begin(), result.scores.end(),
            [](const CountyScore& a, const CountyScore& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.key < b.key;
            });
  return result;
}

}  // namespace koedds
