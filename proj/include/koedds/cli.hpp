#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "koedds/scoring.hpp"

namespace koedds {

struct RunConfig {
  std::string market_path;
  std::string svi_path;
  std::string geojson_path;  // optional input
  std::string out_csv;
  std::string out_geojson;
  std::string out_report;
  ScoreWeights weights;
  std::string property_type = "All Residential";
  int min_months = 12;
  bool viz_invert = true;
  std::string score_property = "investment_score";
};

// "G,R" -> weights; both halves must parse as numbers.
ScoreWeights parse_weights(const std::string& text);

// Flat key=value file; '#' comments and blank lines ignored; keys mirror the
// long flag names (e.g. "out-csv", "min-months", "no-viz-invert"). Unknown
// keys are fatal so typos surface instead of silently using defaults.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies file values to every field whose flag was not given on the command
// line: flag > config file > built-in default.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& values,
                  const std::set<std::string>& provided);

struct CliInvocation {
  std::string command;  // "score", "stats" or "validate"
  RunConfig config;
  bool help = false;
  std::string help_text;
};

// Parses argv (program name excluded) and merges any config file. The config
// path comes from --config, else from KOEDDS_CONFIG; `env_config` substitutes
// for the environment lookup in tests (nullopt = read the real environment).
CliInvocation parse_cli(const std::vector<std::string>& args,
                        const std::optional<std::string>& env_config = std::nullopt);

// Subcommand bodies. Success returns 0; failures throw Error.
int cmd_score(const RunConfig& config, std::ostream& out);
int cmd_stats(const RunConfig& config, std::ostream& out);
int cmd_validate(const RunConfig& config, std::ostream& out);

// Entry point: parse, dispatch, and map every Error to its exit code with a
// one-line diagnostic on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::optional<std::string>& env_config = std::nullopt);

}  // namespace koedds
