#include "koedds/aggregate.hpp"

#include <algorithm>
#include <tuple>

namespace koedds {

void CountyAccumulator::add(const MarketRecord& record) {
  ++report_.records_in;
  auto key = parse_region(record.region, *xwalk_);
  if (!key) {
    ++report_.region_unparsed;
    return;
  }
  Sums& s = sums_[*std::move(key)];
  ++s.n;
  s.price_yoy += record.median_sale_price_yoy;
  s.price_mom += record.median_sale_price_mom;
  s.homes_yoy += record.homes_sold_yoy;
  s.homes_mom += record.homes_sold_mom;
}

void CountyAccumulator::merge(const CountyAccumulator& other) {
  report_.records_in += other.report_.records_in;
  report_.region_unparsed += other.report_.region_unparsed;
  for (const auto& [key, s] : other.sums_) {
    Sums& mine = sums_[key];
    mine.n += s.n;
    mine.price_yoy += s.price_yoy;
    mine.price_mom += s.price_mom;
    mine.homes_yoy += s.homes_yoy;
    mine.homes_mom += s.homes_mom;
  }
}

AggregateResult CountyAccumulator::finish() const {
  AggregateResult result;
  result.report = report_;
  result.aggregates.reserve(sums_.size());
  for (const auto& [key, s] : sums_) {
    CountyAggregate a;
    a.key = key;
    a.n_months = s.n;
    a.avg_price_yoy = s.price_yoy / static_cast<double>(s.n);
    a.avg_price_mom = s.price_mom / static_cast<double>(s.n);
    a.avg_homes_sold_yoy = s.homes_yoy / static_cast<double>(s.n);
    a.avg_homes_sold_mom = s.homes_mom / static_cast<double>(s.n);
    result.aggregates.push_back(std::move(a));
  }
  std::sort(result.aggregates.begin(), result.aggregates.end(),
            [](const CountyAggregate& a, const CountyAggregate& b) { return a.key < b.key; });
  return result;
}

AggregateResult aggregate_by_county(std::vector<MarketRecord> records,
                                    const StateCrosswalk& xwalk) {
  AggregateReport report;
  report.records_in = records.size();

  struct Keyed {
    CountyKey key;
    const MarketRecord* record;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(records.size());
  for (const MarketRecord& r : records) {
    auto key = parse_region(r.region, xwalk);
    if (!key) {
      ++report.region_unparsed;
      continue;
    }
    keyed.push_back({*std::move(key), &r});
  }

  auto order = [](const Keyed& a, const Keyed& b) {
    const MarketRecord& x = *a.record;
    const MarketRecord& y = *b.record;
    return std::tie(a.key, x.period_end, x.period_begin, x.median_sale_price_yoy,
                    x.median_sale_price_mom, x.homes_sold_yoy, x.homes_sold_mom) <
           std::tie(b.key, y.period_end, y.period_begin, y.median_sale_price_yoy,
                    y.median_sale_price_mom, y.homes_sold_yoy, y.homes_sold_mom);
  };
  std::sort(keyed.begin(), keyed.end(), order);

  AggregateResult result;
  result.report = report;
  std::size_t i = 0;
  while (i < keyed.size()) {
    std::size_t j = i;
    CountyAggregate a;
    a.key = keyed[i].key;
    double price_yoy = 0, price_mom = 0, homes_yoy = 0, homes_mom = 0;
    for (; j < keyed.size() && keyed[j].key == a.key; ++j) {
      const MarketRecord& r = *keyed[j].record;
      price_yoy += r.median_sale_price_yoy;
      price_mom += r.median_sale_price_mom;
      homes_yoy += r.homes_sold_yoy;
      homes_mom += r.homes_sold_mom;
    }
    a.n_months = j - i;
    const double n = static_cast<double>(a.n_months);
    a.avg_price_yoy = price_yoy / n;
    a.avg_price_mom = price_mom / n;
    a.avg_homes_sold_yoy = homes_yoy / n;
    a.avg_homes_sold_mom = homes_mom / n;
    result.aggregates.push_back(std::move(a));
    i = j;
  }
  return result;
}

CountyAggregate merge_aggregates(const CountyAggregate& a, const CountyAggregate& b) {
  CountyAggregate m;
  m.key = a.key;
  m.n_months = a.n_months + b.n_months;
  const double wa = static_cast<double>(a.n_months);
  const double wb = static_cast<double>(b.n_months);
  const double n = wa + wb;
  m.avg_price_yoy = (wa * a.avg_price_yoy + wb * b.avg_price_yoy) / n;
  m.avg_price_mom = (wa * a.avg_price_mom + wb * b.avg_price_mom) / n;
  m.avg_homes_sold_yoy = (wa * a.avg_homes_sold_yoy + wb * b.avg_homes_sold_yoy) / n;
  m.avg_homes_sold_mom = (wa * a.avg_homes_sold_mom + wb * b.avg_homes_sold_mom) / n;
  return m;
}

std::vector<CountyAggregate> filter_min_months(std::vector<CountyAggregate> aggregates,
                                               std::size_t min_months,
                                               std::vector<CountyKey>* removed) {
  std::vector<CountyAggregate> kept;
  kept.reserve(aggregates.size());
  for (CountyAggregate& a : aggregates) {
    if (a.n_months >= min_months)
      kept.push_back(std::move(a));
    else if (removed)
      removed->push_back(a.key);
  }
  return kept;
}

}  // namespace koedds
