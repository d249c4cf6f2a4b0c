#include "koedds/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <span>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "koedds/aggregate.hpp"
#include "koedds/emit.hpp"
#include "koedds/error.hpp"
#include "koedds/geo_names.hpp"
#include "koedds/ingest_svi.hpp"
#include "koedds/parallel_ingest.hpp"
#include "koedds/stats.hpp"
#include "koedds/text_source.hpp"

namespace koedds {

namespace {

const std::set<std::string> kConfigKeys = {
    "market",        "svi",        "geojson",       "out-csv",
    "out-geojson",   "out-report", "weights",       "property-type",
    "min-months",    "no-viz-invert", "score-property",
};

double parse_number(const std::string& text, const std::string& what) {
  double v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e)
    throw usage_error(what + ": expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e)
    throw usage_error(what + ": expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw usage_error(what + ": expected true/false, got '" + text + "'");
}

std::string format6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string county_label(const CountyKey& key, const StateCrosswalk& xwalk) {
  auto postal = xwalk.postal_for(key.state_fips);
  return key.county_name + ", " + (postal ? std::string(*postal) : key.state_fips);
}

void check_common(const RunConfig& config) {
  if (config.market_path.empty()) throw usage_error("--market is required");
  if (config.svi_path.empty()) throw usage_error("--svi is required");
  if (config.min_months < 1) throw usage_error("--min-months must be >= 1");
  config.weights.validate();
}

struct PipelineRun {
  MarketIngestResult market;
  SviParseResult svi;
  std::vector<CountyAggregate> kept;
  std::vector<CountyKey> below_min_months;
};

PipelineRun run_ingest(const RunConfig& config) {
  const StateCrosswalk& xwalk = StateCrosswalk::builtin();
  PipelineRun run;
  run.market = aggregate_market_file(config.market_path,
                                     IngestFilter{config.property_type}, xwalk);
  run.svi = parse_svi_file(config.svi_path, xwalk);
  run.kept = filter_min_months(std::move(run.market.aggregate.aggregates),
                               static_cast<std::size_t>(config.min_months),
                               &run.below_min_months);
  return run;
}

AggregationFigures aggregation_figures(const PipelineRun& run) {
  AggregationFigures agg;
  agg.records = run.market.aggregate.report.records_in;
  agg.region_unparsed = run.market.aggregate.report.region_unparsed;
  agg.counties = run.kept.size();
  agg.below_min_months = run.below_min_months.size();
  return agg;
}

ReportConfig report_config(const RunConfig& config) {
  ReportConfig rc;
  rc.w_growth = config.weights.growth;
  rc.w_resilience = config.weights.resilience;
  rc.property_type = config.property_type;
  rc.min_months = config.min_months;
  rc.viz_invert = config.viz_invert;
  rc.score_property = config.score_property;
  return rc;
}

void print_rank_rows(std::ostream& out, std::span<const CountyScore> scores,
                     std::size_t first, std::size_t last, const StateCrosswalk& xwalk) {
  for (std::size_t i = first; i < last; ++i) {
    char rank[16];
    std::snprintf(rank, sizeof rank, "%4zu", i + 1);
    out << rank << "  " << format6(scores[i].score) << "  "
        << county_label(scores[i].key, xwalk) << "\n";
  }
}

}  // namespace

ScoreWeights parse_weights(const std::string& text) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
    throw usage_error("--weights expects G,R (two comma-separated numbers), got '" +
                      text + "'");
  ScoreWeights w;
  w.growth = parse_number(std::string(trim(text.substr(0, comma))), "--weights");
  w.resilience = parse_number(std::string(trim(text.substr(comma + 1))), "--weights");
  return w;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  auto source = open_input(path);
  LineReader lines(*source);
  std::map<std::string, std::string> values;
  std::string_view line;
  while (lines.next(line)) {
    std::string_view stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string_view::npos)
      throw usage_error(path + ":" + std::to_string(lines.line_number()) +
                        ": expected key=value, got '" + std::string(stripped) + "'");
    std::string key{trim(stripped.substr(0, eq))};
    std::string value{trim(stripped.substr(eq + 1))};
    if (!kConfigKeys.count(key))
      throw usage_error(path + ":" + std::to_string(lines.line_number()) +
                        ": unknown key '" + key + "'");
    if (values.count(key))
      throw usage_error(path + ":" + std::to_string(lines.line_number()) +
                        ": duplicate key '" + key + "'");
    values.emplace(std::move(key), std::move(value));
  }
  return values;
}

void apply_config(RunConfig& config, const std::map<std::string, std::string>& values,
                  const std::set<std::string>& provided) {
  for (const auto& [key, value] : values) {
    if (provided.count(key)) continue;
    if (key == "market") config.market_path = value;
    else if (key == "svi") config.svi_path = value;
    else if (key == "geojson") config.geojson_path = value;
    else if (key == "out-csv") config.out_csv = value;
    else if (key == "out-geojson") config.out_geojson = value;
    else if (key == "out-report") config.out_report = value;
    else if (key == "weights") config.weights = parse_weights(value);
    else if (key == "property-type") config.property_type = value;
    else if (key == "min-months") config.min_months = parse_int(value, "min-months");
    else if (key == "no-viz-invert") config.viz_invert = !parse_bool(value, "no-viz-invert");
    else if (key == "score-property") config.score_property = value;
  }
}

CliInvocation parse_cli(const std::vector<std::string>& args,
                        const std::optional<std::string>& env_config) {
  CliInvocation inv;
  std::string weights_text;
  std::string config_path;

  CLI::App app{"county investment scoring from market growth and social vulnerability"};
  app.name("koedds");
  app.require_subcommand(1);

  struct SubFlags {
    CLI::App* sub;
    bool weights_flag = false;
  };
  std::vector<SubFlags> subs;

  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--market", inv.config.market_path, "market TSV path");
    sub->add_option("--svi", inv.config.svi_path, "SVI CSV path");
    sub->add_option("--config", config_path, "key=value config file");
  };

  CLI::App* score = app.add_subcommand("score", "run the full scoring pipeline");
  add_inputs(score);
  score->add_option("--geojson", inv.config.geojson_path, "county GeoJSON to augment");
  score->add_option("--out-csv", inv.config.out_csv, "scored CSV destination");
  score->add_option("--out-geojson", inv.config.out_geojson, "augmented GeoJSON destination");
  score->add_option("--out-report", inv.config.out_report, "JSON run report destination");
  score->add_option("--weights", weights_text, "growth,resilience weights (default 0.5,0.5)");
  score->add_option("--property-type", inv.config.property_type,
                    "property_type filter (default \"All Residential\")");
  score->add_option("--min-months", inv.config.min_months,
                    "minimum months per county (default 12)");
  score->add_flag("--no-viz-invert", "inject the score itself instead of 1-score");
  score->add_option("--score-property", inv.config.score_property,
                    "injected GeoJSON property name");

  CLI::App* stats = app.add_subcommand("stats", "report the SVI/growth correlation");
  add_inputs(stats);
  stats->add_option("--out-report", inv.config.out_report, "JSON report destination");
  stats->add_option("--property-type", inv.config.property_type,
                    "property_type filter (default \"All Residential\")");
  stats->add_option("--min-months", inv.config.min_months,
                    "minimum months per county (default 12)");

  CLI::App* validate = app.add_subcommand("validate", "check input files without writing outputs");
  add_inputs(validate);
  validate->add_option("--geojson", inv.config.geojson_path, "county GeoJSON path");

  std::vector<const char*> argv;
  argv.push_back("koedds");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    inv.help = true;
    inv.help_text = app.help();
    return inv;
  } catch (const CLI::ParseError& e) {
    throw usage_error(e.what());
  }

  CLI::App* active = app.get_subcommands().front();
  inv.command = active->get_name();
  if (active->get_help_ptr() && active->get_help_ptr()->count() > 0) {
    inv.help = true;
    inv.help_text = active->help();
    return inv;
  }

  // Which long flags were given, by config-file key name.
  std::set<std::string> provided;
  auto note = [&](const char* flag, const char* key) {
    if (active->count(flag) > 0) provided.insert(key);
  };
  note("--market", "market");
  note("--svi", "svi");
  if (inv.command != "stats") note("--geojson", "geojson");
  if (inv.command == "score") {
    note("--out-csv", "out-csv");
    note("--out-geojson", "out-geojson");
    note("--weights", "weights");
    note("--no-viz-invert", "no-viz-invert");
    note("--score-property", "score-property");
  }
  if (inv.command != "validate") {
    note("--out-report", "out-report");
    note("--property-type", "property-type");
    note("--min-months", "min-months");
  }

  if (provided.count("weights")) inv.config.weights = parse_weights(weights_text);
  if (inv.command == "score" && active->count("--no-viz-invert") > 0)
    inv.config.viz_invert = false;

  std::string effective_config = config_path;
  if (effective_config.empty() && active->count("--config") == 0) {
    if (env_config) {
      effective_config = *env_config;
    } else if (const char* env = std::getenv("KOEDDS_CONFIG")) {
      effective_config = env;
    }
  }
  if (!effective_config.empty())
    apply_config(inv.config, parse_config_file(effective_config), provided);

  return inv;
}

int cmd_score(const RunConfig& config, std::ostream& out) {
  // Configuration is validated in full before any input is opened.
  check_common(config);
  if (!config.out_geojson.empty() && config.geojson_path.empty())
    throw usage_error("--out-geojson requires --geojson");
  if (config.score_property.empty())
    throw usage_error("--score-property must not be empty");

  const StateCrosswalk& xwalk = StateCrosswalk::builtin();
  PipelineRun run = run_ingest(config);

  ScoreResult scored = score_counties(run.kept, run.svi.records, config.weights);
  CorrelationResult correlation = svi_growth_correlation(run.kept, run.svi.records);
  ScoreSummary summary = summarize(scored.scores);

  std::optional<MatchReport> match;
  nlohmann::json geo;
  if (!config.geojson_path.empty()) {
    geo = load_geojson(config.geojson_path);
    match = augment_geojson(geo, scored.scores,
                            AugmentOptions{config.score_property, config.viz_invert});
  }

  // All heavy lifting is done; emit outputs, each atomically.
  if (!config.out_csv.empty()) write_scores_csv(scored.scores, config.out_csv);
  if (!config.out_geojson.empty()) write_text_atomic(config.out_geojson, canonical_json(geo));
  if (!config.out_report.empty()) {
    ReportInputs inputs{config.market_path, config.svi_path, config.geojson_path};
    nlohmann::json report = build_report(
        inputs, run.market.ingest, run.svi.report, aggregation_figures(run), scored.join,
        match ? &*match : nullptr, correlation, summary, report_config(config),
        utc_timestamp());
    write_report_json(report, config.out_report);
  }

  const std::vector<CountyScore>& scores = scored.scores;
  out << "counties scored: " << scores.size() << " (market-only: "
      << scored.join.market_only.size() << ", svi-only: " << scored.join.svi_only.size()
      << ", below min-months: " << run.below_min_months.size() << ")\n";
  out << "correlation svi vs growth: r = " << format6(correlation.r)
      << ", n = " << correlation.n << " (" << correlation.interpretation << ")\n";
  out << "score range: " << format6(summary.score.min) << " .. "
      << format6(summary.score.max) << ", mean " << format6(summary.score.mean)
      << ", median " << format6(summary.score.median) << "\n";

  const std::size_t top = std::min<std::size_t>(5, scores.size());
  out << "top " << top << " by score:\n";
  print_rank_rows(out, scores, 0, top, xwalk);
  if (scores.size() > top) {
    const std::size_t first = std::max<std::size_t>(top, scores.size() - 5);
    out << "bottom " << scores.size() - first << " by score:\n";
    print_rank_rows(out, scores, first, scores.size(), xwalk);
  }
  if (match) {
    out << "geojson: " << match->matched << " matched, "
        << match->unmatched_features.size() << " features unmatched, "
        << match->unmatched_scores.size() << " scores unmatched\n";
  }
  if (!config.out_csv.empty())
    out << "wrote " << config.out_csv << " (" << scores.size() << " rows)\n";
  if (!config.out_geojson.empty()) out << "wrote " << config.out_geojson << "\n";
  if (!config.out_report.empty()) out << "wrote " << config.out_report << "\n";
  return 0;
}

int cmd_stats(const RunConfig& config, std::ostream& out) {
  check_common(config);
  PipelineRun run = run_ingest(config);
  CorrelationResult correlation = svi_growth_correlation(run.kept, run.svi.records);

  out << "r = " << format6(correlation.r) << ", n = " << correlation.n << " ("
      << correlation.interpretation << ")\n";

  if (!config.out_report.empty()) {
    AggregationFigures agg = aggregation_figures(run);
    nlohmann::json report;
    report["aggregation"] = {{"below_min_months", agg.below_min_months},
                             {"counties", agg.counties},
                             {"records", agg.records},
                             {"region_unparsed", agg.region_unparsed}};
    report["correlation"] = {{"interpretation", correlation.interpretation},
                             {"n", correlation.n},
                             {"r", correlation.r}};
    report["generated_at"] = utc_timestamp();
    report["inputs"] = {{"market", config.market_path}, {"svi", config.svi_path}};
    write_report_json(report, config.out_report);
    out << "wrote " << config.out_report << "\n";
  }
  return 0;
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  if (config.market_path.empty() && config.svi_path.empty() && config.geojson_path.empty())
    throw usage_error("validate needs at least one of --market, --svi, --geojson");

  const StateCrosswalk& xwalk = StateCrosswalk::builtin();
  int status = 0;
  auto fail = [&](const Error& e) {
    if (status == 0) status = static_cast<int>(e.code());
  };

  if (!config.market_path.empty()) {
    try {
      auto source = open_input(config.market_path);
      LineReader lines(*source);
      MarketStreamParser parser(lines, IngestFilter{config.property_type},
                                config.market_path);
      MarketRecord record;
      while (parser.next(record)) {
      }
      const IngestReport& r = parser.report();
      out << "market: ok (rows read " << r.rows_read << ", kept " << r.rows_kept
          << ", dropped " << r.dropped_total() << ") — " << config.market_path << "\n";
    } catch (const Error& e) {
      out << "market: INVALID — " << e.what() << "\n";
      fail(e);
    }
  }

  if (!config.svi_path.empty()) {
    try {
      SviParseResult svi = parse_svi_file(config.svi_path, xwalk);
      out << "svi: ok (rows read " << svi.report.rows_read << ", kept "
          << svi.report.rows_kept << ", dropped " << svi.report.dropped_total()
          << ") — " << config.svi_path << "\n";
    } catch (const Error& e) {
      out << "svi: INVALID — " << e.what() << "\n";
      fail(e);
    }
  }

  if (!config.geojson_path.empty()) {
    try {
      nlohmann::json doc = load_geojson(config.geojson_path);
      if (!doc.is_object() || doc.value("type", std::string()) != "FeatureCollection" ||
          !doc.contains("features") || !doc["features"].is_array())
        throw format_error(config.geojson_path + ": not a GeoJSON FeatureCollection");
      std::vector<std::size_t> bad;
      const nlohmann::json& features = doc["features"];
      for (std::size_t i = 0; i < features.size(); ++i) {
        const nlohmann::json& f = features[i];
        const bool ok = f.is_object() && f.contains("properties") &&
                        f["properties"].is_object() &&
                        f["properties"].contains("STATE") &&
                        f["properties"]["STATE"].is_string() &&
                        f["properties"].contains("NAME") &&
                        f["properties"]["NAME"].is_string();
        if (!ok) bad.push_back(i);
      }
      if (!bad.empty()) {
        std::string list;
        for (std::size_t i = 0; i < bad.size(); ++i) {
          if (i) list += ", ";
          list += std::to_string(bad[i]);
        }
        throw format_error(config.geojson_path +
                           ": features missing STATE/NAME string properties at indexes [" +
                           list + "]");
      }
      out << "geojson: ok (" << features.size() << " features) — "
          << config.geojson_path << "\n";
    } catch (const Error& e) {
      out << "geojson: INVALID — " << e.what() << "\n";
      fail(e);
    }
  }

  return status;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::optional<std::string>& env_config) {
  try {
    CliInvocation inv = parse_cli(args, env_config);
    if (inv.help) {
      out << inv.help_text;
      return 0;
    }
    if (inv.command == "score") return cmd_score(inv.config, out);
    if (inv.command == "stats") return cmd_stats(inv.config, out);
    return cmd_validate(inv.config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace koedds
