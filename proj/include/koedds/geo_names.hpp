#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace koedds {

// Canonical join key shared by market data, SVI data and GeoJSON features:
// 2-digit state FIPS plus a canonicalized county name.
struct CountyKey {
  std::string state_fips;
  std::string county_name;

  auto operator<=>(const CountyKey&) const = default;
};

struct CountyKeyHash {
  std::size_t operator()(const CountyKey& k) const noexcept {
    std::size_t h = std::hash<std::string>{}(k.state_fips);
    return h ^ (std::hash<std::string>{}(k.county_name) + 0x9e3779b97f4a7c15ULL +
                (h << 6) + (h >> 2));
  }
};

struct StateEntry {
  std::string postal;  // "CO"
  std::string fips;    // "08"
  std::string name;    // "Colorado"
};

// Bijection between 2-letter postal codes and 2-digit state FIPS strings.
// 51 entries: the 50 states plus DC; territories are excluded.
class StateCrosswalk {
 public:
  // The compiled-in table. Mirrors data/state_fips.csv; a unit test keeps the
  // two in sync.
  static const StateCrosswalk& builtin();

  // Loads a crosswalk CSV with header "postal,fips,name". Throws on missing
  // columns, malformed codes, or a non-bijective mapping.
  static StateCrosswalk load_csv(const std::string& path);

  // Postal lookup is case-insensitive.
  std::optional<std::string_view> fips_for(std::string_view postal) const;
  std::optional<std::string_view> postal_for(std::string_view fips) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<StateEntry>& entries() const { return entries_; }

 private:
  static StateCrosswalk from_entries(std::vector<StateEntry> entries,
                                     const std::string& origin);

  std::vector<StateEntry> entries_;          // sorted by postal
  std::vector<std::size_t> by_fips_;         // index into entries_, sorted by fips
};

// Lowercases ASCII, trims, and strips one trailing " county" or " parish"
// token (case-insensitive). Other characters, including punctuation and
// non-ASCII letters, pass through untouched. Returns nullopt if the result
// is empty.
std::optional<std::string> try_canonicalize_county_name(std::string_view raw);

// Throwing variant: empty result raises InvalidName.
std::string canonicalize_county_name(std::string_view raw);

// "CO" -> "08". Unknown codes raise UnknownState.
std::string state_code_to_fips(std::string_view code, const StateCrosswalk& xwalk);

// Splits "<name part>, <2-letter state>" on the final comma and canonicalizes
// both halves. Returns nullopt for anything that does not fit that shape;
// row-level callers count and skip.
std::optional<CountyKey> parse_region(std::string_view region, const StateCrosswalk& xwalk);

// True iff the state FIPS strings are equal and the feature name, after
// canonicalization, equals key.county_name. Total: malformed feature fields
// simply do not match.
bool key_matches_feature(const CountyKey& key, std::string_view feature_state_fips,
                         std::string_view feature_name);

}  // namespace koedds
