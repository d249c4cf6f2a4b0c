#include "koedds/emit.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <utility>

#include "koedds/error.hpp"
#include "koedds/text_source.hpp"

namespace koedds {

namespace {

std::string read_all(const std::string& path) {
  auto source = open_input(path);
  std::string data;
  char buf[64 * 1024];
  for (;;) {
    std::size_t got = source->read(buf, sizeof buf);
    if (got == 0) break;
    data.append(buf, got);
  }
  return data;
}

// Pulls the canonical county key out of one feature's STATE/NAME properties.
// Anything malformed yields nullopt: such features can never match and are
// reported as unmatched rather than failing the run.
std::optional<CountyKey> feature_key(const nlohmann::json& feature) {
  if (!feature.is_object()) return std::nullopt;
  auto props_it = feature.find("properties");
  if (props_it == feature.end() || !props_it->is_object()) return std::nullopt;
  auto state_it = props_it->find("STATE");
  auto name_it = props_it->find("NAME");
  if (state_it == props_it->end() || name_it == props_it->end()) return std::nullopt;
  if (!state_it->is_string() || !name_it->is_string()) return std::nullopt;
  std::string state{trim(state_it->get_ref<const std::string&>())};
  auto name = try_canonicalize_county_name(name_it->get_ref<const std::string&>());
  if (state.size() != 2 || !name) return std::nullopt;
  return CountyKey{std::move(state), std::move(*name)};
}

std::string key_label(const CountyKey& key) {
  return key.state_fips + " " + key.county_name;
}

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

nlohmann::json key_json(const CountyKey& key) {
  return nlohmann::json{{"county", key.county_name}, {"state_fips", key.state_fips}};
}

nlohmann::json keys_json(const std::vector<CountyKey>& keys) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CountyKey& k : keys) arr.push_back(key_json(k));
  return arr;
}

nlohmann::json ingest_json(const IngestReport& report) {
  nlohmann::json dropped = nlohmann::json::object();
  for (const auto& [reason, count] : report.dropped) dropped[reason] = count;
  return nlohmann::json{{"dropped", std::move(dropped)},
                        {"rows_kept", report.rows_kept},
                        {"rows_read", report.rows_read},
                        {"source", report.source}};
}

nlohmann::json field_summary_json(const FieldSummary& s) {
  return nlohmann::json{
      {"max", s.max}, {"mean", s.mean}, {"median", s.median}, {"min", s.min}};
}

}  // namespace

nlohmann::json load_geojson(const std::string& path) {
  std::string text = read_all(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error(path + ": GeoJSON parse error: " + e.what());
  }
}

MatchReport augment_geojson(nlohmann::json& doc, std::span<const CountyScore> scores,
                            const AugmentOptions& options) {
  if (!doc.is_object())
    throw format_error("GeoJSON root is not an object");
  auto type_it = doc.find("type");
  if (type_it == doc.end() || !type_it->is_string() ||
      type_it->get_ref<const std::string&>() != "FeatureCollection")
    throw format_error("GeoJSON document is not a FeatureCollection");
  auto features_it = doc.find("features");
  if (features_it == doc.end() || !features_it->is_array())
    throw format_error("GeoJSON FeatureCollection has no features array");

  nlohmann::json& features = *features_it;
  const std::int64_t n_features = static_cast<std::int64_t>(features.size());

  // Canonicalizing every feature name is the per-feature work worth spreading
  // across threads; it is pure, so the gather is race-free by index.
  std::vector<std::optional<CountyKey>> keys(features.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n_features; ++i)
    keys[static_cast<std::size_t>(i)] = feature_key(features[static_cast<std::size_t>(i)]);

  std::map<CountyKey, std::vector<std::size_t>> features_by_key;
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (keys[i]) features_by_key[*keys[i]].push_back(i);

  MatchReport report;
  std::vector<bool> feature_matched(features.size(), false);
  for (const CountyScore& s : scores) {
    auto it = features_by_key.find(s.key);
    if (it == features_by_key.end()) {
      report.unmatched_scores.push_back(s.key);
      continue;
    }
    if (it->second.size() > 1)
      throw join_error("AmbiguousMatch: county '" + key_label(s.key) + "' matches " +
                       std::to_string(it->second.size()) + " features");
    const std::size_t idx = it->second.front();
    features[idx]["properties"][options.property_name] =
        options.use_viz_inversion ? s.score_viz : s.score;
    feature_matched[idx] = true;
    ++report.matched;
  }

  for (std::size_t i = 0; i < feature_matched.size(); ++i)
    if (!feature_matched[i]) report.unmatched_features.push_back(i);
  std::sort(report.unmatched_scores.begin(), report.unmatched_scores.end());
  return report;
}

std::string render_scores_csv(std::span<const CountyScore> scores) {
  std::string out =
      "state_fips,county,growth_raw,growth_norm,svi,resilience,score,score_viz\n";
  for (const CountyScore& s : scores) {
    out += csv_field(s.key.state_fips);
    out += ',';
    out += csv_field(s.key.county_name);
    out += ',';
    out += format_fixed6(s.growth_raw);
    out += ',';
    out += format_fixed6(s.growth_norm);
    out += ',';
    out += format_fixed6(s.svi);
    out += ',';
    out += format_fixed6(s.resilience);
    out += ',';
    out += format_fixed6(s.score);
    out += ',';
    out += format_fixed6(s.score_viz);
    out += '\n';
  }
  return out;
}

std::size_t write_scores_csv(std::span<const CountyScore> scores,
                             const std::string& destination) {
  write_text_atomic(destination, render_scores_csv(scores));
  return scores.size();
}

void write_text_atomic(const std::string& destination, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dest(destination);
  std::error_code ec;
  if (dest.has_parent_path()) {
    fs::create_directories(dest.parent_path(), ec);
    if (ec) throw io_error(destination + ": cannot create parent directory: " + ec.message());
  }
  const fs::path tmp = dest.parent_path() / (dest.filename().string() + ".tmp");

  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw io_error(tmp.string() + ": cannot open for writing");
  const std::size_t written = std::fwrite(content.data(), 1, content.size(), f);
  const bool flushed = std::fflush(f) == 0;
  const bool closed = std::fclose(f) == 0;
  if (written != content.size() || !flushed || !closed) {
    fs::remove(tmp, ec);
    throw io_error(tmp.string() + ": short write");
  }
  fs::rename(tmp, dest, ec);
  if (ec) {
    std::error_code cleanup;
    fs::remove(tmp, cleanup);
    throw io_error(destination + ": rename failed: " + ec.message());
  }
}

nlohmann::json build_report(const ReportInputs& inputs, const IngestReport& market,
                            const IngestReport& svi, const AggregationFigures& agg,
                            const JoinReport& join, const MatchReport* match,
                            const CorrelationResult& correlation,
                            const ScoreSummary& summary, const ReportConfig& config,
                            const std::string& generated_at) {
  nlohmann::json report;
  report["aggregation"] = {{"below_min_months", agg.below_min_months},
                           {"counties", agg.counties},
                           {"records", agg.records},
                           {"region_unparsed", agg.region_unparsed}};
  report["config"] = {{"min_months", config.min_months},
                      {"property_type", config.property_type},
                      {"score_property", config.score_property},
                      {"viz_invert", config.viz_invert},
                      {"weights",
                       {{"growth", config.w_growth}, {"resilience", config.w_resilience}}}};
  report["correlation"] = {{"interpretation", correlation.interpretation},
                           {"n", correlation.n},
                           {"r", correlation.r}};
  report["generated_at"] = generated_at;
  if (match) {
    nlohmann::json unmatched = nlohmann::json::array();
    for (std::size_t idx : match->unmatched_features) unmatched.push_back(idx);
    report["geojson_match"] = {{"matched", match->matched},
                               {"unmatched_features", std::move(unmatched)},
                               {"unmatched_scores", keys_json(match->unmatched_scores)}};
  } else {
    report["geojson_match"] = nullptr;
  }
  report["inputs"] = {
      {"geojson", inputs.geojson.empty() ? nlohmann::json() : nlohmann::json(inputs.geojson)},
      {"market", inputs.market},
      {"svi", inputs.svi}};
  report["join"] = {{"market_only", keys_json(join.market_only)},
                    {"scored", join.joined},
                    {"svi_only", keys_json(join.svi_only)}};
  report["market_ingest"] = ingest_json(market);
  report["summary"] = {{"count", summary.count},
                       {"growth_raw", field_summary_json(summary.growth_raw)},
                       {"score", field_summary_json(summary.score)}};
  report["svi_ingest"] = ingest_json(svi);
  return report;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_report_json(const nlohmann::json& report, const std::string& destination) {
  write_text_atomic(destination, canonical_json(report));
}

std::string canonical_json(const nlohmann::json& doc) {
  return doc.dump(2) + "\n";
}

}  // namespace koedds
