#include "koedds/geo_names.hpp"

#include <algorithm>
#include <cctype>

#include "koedds/error.hpp"
#include "koedds/text_source.hpp"

namespace koedds {

namespace {

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_two_digits(std::string_view s) {
  return s.size() == 2 && std::isdigit(static_cast<unsigned char>(s[0])) &&
         std::isdigit(static_cast<unsigned char>(s[1]));
}

std::string upper2(std::string_view postal) {
  std::string out;
  out.reserve(2);
  for (char c : postal)
    out.push_back((c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c);
  return out;
}

constexpr struct {
  const char* postal;
  const char* fips;
  const char* name;
} kStates[] = {
    {"AK", "02", "Alaska"},         {"AL", "01", "Alabama"},
    {"AR", "05", "Arkansas"},       {"AZ", "04", "Arizona"},
    {"CA", "06", "California"},     {"CO", "08", "Colorado"},
    {"CT", "09", "Connecticut"},    {"DC", "11", "District of Columbia"},
    {"DE", "10", "Delaware"},       {"FL", "12", "Florida"},
    {"GA", "13", "Georgia"},        {"HI", "15", "Hawaii"},
    {"IA", "19", "Iowa"},           {"ID", "16", "Idaho"},
    {"IL", "17", "Illinois"},       {"IN", "18", "Indiana"},
    {"KS", "20", "Kansas"},         {"KY", "21", "Kentucky"},
    {"LA", "22", "Louisiana"},      {"MA", "25", "Massachusetts"},
    {"MD", "24", "Maryland"},       {"ME", "23", "Maine"},
    {"MI", "26", "Michigan"},       {"MN", "27", "Minnesota"},
    {"MO", "29", "Missouri"},       {"MS", "28", "Mississippi"},
    {"MT", "30", "Montana"},        {"NC", "37", "North Carolina"},
    {"ND", "38", "North Dakota"},   {"NE", "31", "Nebraska"},
    {"NH", "33", "New Hampshire"},  {"NJ", "34", "New Jersey"},
    {"NM", "35", "New Mexico"},     {"NV", "32", "Nevada"},
    {"NY", "36", "New York"},       {"OH", "39", "Ohio"},
    {"OK", "40", "Oklahoma"},       {"OR", "41", "Oregon"},
    {"PA", "42", "Pennsylvania"},   {"RI", "44", "Rhode Island"},
    {"SC", "45", "South Carolina"}, {"SD", "46", "South Dakota"},
    {"TN", "47", "Tennessee"},      {"TX", "48", "Texas"},
    {"UT", "49", "Utah"},           {"VA", "51", "Virginia"},
    {"VT", "50", "Vermont"},        {"WA", "53", "Washington"},
    {"WI", "55", "Wisconsin"},      {"WV", "54", "West Virginia"},
    {"WY", "56", "Wyoming"},
};

}  // namespace

StateCrosswalk StateCrosswalk::from_entries(std::vector<StateEntry> entries,
                                            const std::string& origin) {
  std::sort(entries.begin(), entries.end(),
            [](const StateEntry& a, const StateEntry& b) { return a.postal < b.postal; });
  for (const StateEntry& e : entries) {
    if (e.postal.size() != 2 || !is_ascii_alpha(e.postal[0]) || !is_ascii_alpha(e.postal[1]))
      throw format_error(origin + ": bad postal code '" + e.postal + "'");
    if (!is_two_digits(e.fips))
      throw format_error(origin + ": bad FIPS code '" + e.fips + "' for " + e.postal);
  }
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].postal == entries[i - 1].postal)
      throw format_error(origin + ": duplicate postal code '" + entries[i].postal + "'");

  StateCrosswalk xw;
  xw.entries_ = std::move(entries);
  xw.by_fips_.resize(xw.entries_.size());
  for (std::size_t i = 0; i < xw.by_fips_.size(); ++i) xw.by_fips_[i] = i;
  std::sort(xw.by_fips_.begin(), xw.by_fips_.end(), [&](std::size_t a, std::size_t b) {
    return xw.entries_[a].fips < xw.entries_[b].fips;
  });
  for (std::size_t i = 1; i < xw.by_fips_.size(); ++i)
    if (xw.entries_[xw.by_fips_[i]].fips == xw.entries_[xw.by_fips_[i - 1]].fips)
      throw format_error(origin + ": duplicate FIPS code '" +
                         xw.entries_[xw.by_fips_[i]].fips + "'");
  return xw;
}

const StateCrosswalk& StateCrosswalk::builtin() {
  static const StateCrosswalk xw = [] {
    std::vector<StateEntry> entries;
    entries.reserve(std::size(kStates));
    for (const auto& s : kStates) entries.push_back({s.postal, s.fips, s.name});
    return from_entries(std::move(entries), "builtin state table");
  }();
  return xw;
}

StateCrosswalk StateCrosswalk::load_csv(const std::string& path) {
  auto source = open_input(path);
  LineReader lines(*source);
  std::string_view line;
  std::vector<std::string> fields;
  if (!lines.next(line)) throw format_error(path + ": empty crosswalk file");
  if (!split_csv_line(line, fields) || fields.size() != 3 || fields[0] != "postal" ||
      fields[1] != "fips" || fields[2] != "name")
    throw format_error(path + ": expected header 'postal,fips,name'");

  std::vector<StateEntry> entries;
  while (lines.next(line)) {
    if (trim(line).empty()) continue;
    if (!split_csv_line(line, fields) || fields.size() != 3)
      throw format_error(path + ": malformed row at line " +
                         std::to_string(lines.line_number()));
    entries.push_back({std::string(trim(fields[0])), std::string(trim(fields[1])),
                       std::string(trim(fields[2]))});
  }
  return from_entries(std::move(entries), path);
}

std::optional<std::string_view> StateCrosswalk::fips_for(std::string_view postal) const {
  if (postal.size() != 2) return std::nullopt;
  std::string key = upper2(postal);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const StateEntry& e, const std::string& k) {
                               return e.postal < k;
                             });
  if (it == entries_.end() || it->postal != key) return std::nullopt;
  return std::string_view(it->fips);
}

std::optional<std::string_view> StateCrosswalk::postal_for(std::string_view fips) const {
  auto it = std::lower_bound(by_fips_.begin(), by_fips_.end(), fips,
                             [&](std::size_t i, std::string_view k) {
                               return std::string_view(entries_[i].fips) < k;
                             });
  if (it == by_fips_.end() || std::string_view(entries_[*it].fips) != fips)
    return std::nullopt;
  return std::string_view(entries_[*it].postal);
}

std::optional<std::string> try_canonicalize_county_name(std::string_view raw) {
  std::string_view t = trim(raw);
  std::string name;
  name.reserve(t.size());
  for (char c : t) name.push_back(ascii_lower(c));

  // Trailing suffix tokens are stripped to a fixed point so the result never
  // ends in a bare " county"/" parish" and canonicalization is idempotent.
  bool stripped = true;
  while (stripped && !name.empty()) {
    stripped = false;
    for (std::string_view word : {std::string_view("county"), std::string_view("parish")}) {
      if (name == word) {
        name.clear();
        stripped = true;
        break;
      }
      if (name.size() > word.size() + 1 && name[name.size() - word.size() - 1] == ' ' &&
          std::string_view(name).substr(name.size() - word.size()) == word) {
        name.resize(name.size() - word.size() - 1);
        stripped = true;
        break;
      }
    }
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
  }
  if (name.empty()) return std::nullopt;
  return name;
}

std::string canonicalize_county_name(std::string_view raw) {
  auto name = try_canonicalize_county_name(raw);
  if (!name)
    throw format_error("InvalidName: '" + std::string(raw) +
                       "' is empty after canonicalization");
  return *std::move(name);
}

std::string state_code_to_fips(std::string_view code, const StateCrosswalk& xwalk) {
  auto fips = xwalk.fips_for(trim(code));
  if (!fips)
    throw format_error("UnknownState: '" + std::string(code) +
                       "' is not a known state postal code");
  return std::string(*fips);
}

std::optional<CountyKey> parse_region(std::string_view region, const StateCrosswalk& xwalk) {
  std::size_t comma = region.rfind(',');
  if (comma == std::string_view::npos) return std::nullopt;
  std::string_view name_part = region.substr(0, comma);
  std::string_view state_part = trim(region.substr(comma + 1));
  if (state_part.size() != 2 || !is_ascii_alpha(state_part[0]) ||
      !is_ascii_alpha(state_part[1]))
    return std::nullopt;
  auto fips = xwalk.fips_for(state_part);
  if (!fips) return std::nullopt;
  auto name = try_canonicalize_county_name(name_part);
  if (!name) return std::nullopt;
  return CountyKey{std::string(*fips), *std::move(name)};
}

bool key_matches_feature(const CountyKey& key, std::string_view feature_state_fips,
                         std::string_view feature_name) {
  if (key.state_fips != trim(feature_state_fips)) return false;
  auto name = try_canonicalize_county_name(feature_name);
  return name && *name == key.county_name;
}

}  // namespace koedds
