#include "cli.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "comindex/error.hpp"
#include "comindex/pipeline.hpp"

namespace comindex {
namespace {

constexpr int kUsageExit = 2;

// Every flag is optional so that only flags actually given override the
// config file.
struct Overrides {
  std::optional<std::string> input, config, out_dir, id_column, missing, metadata;
  std::vector<std::string> formats, variables;
  std::optional<std::string> retention, rotation;
  std::optional<std::size_t> factors;
  std::optional<bool> kaiser_normalization;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> factor, direction;
  std::optional<std::size_t> k;
  std::vector<std::string> compare_variables, group1, group2;
  std::optional<double> alpha, alpha_levene, ci_level;
  std::optional<std::string> scope, levene_center;
};

void add_common(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--input,-i", o.input, "Input CSV (cases x indicators)");
  cmd.add_option("--config,-c", o.config, "JSON configuration file");
  cmd.add_option("--out-dir,-o", o.out_dir, "Output directory");
  cmd.add_option("--format,-f", o.formats, "Output formats: json, csv, text")
      ->delimiter(',')
      ->check(CLI::IsMember({"json", "csv", "text"}));
  cmd.add_option("--id-column", o.id_column, "Case identifier column (default: first)");
  cmd.add_option("--missing", o.missing, "Missing-value policy")
      ->check(CLI::IsMember({"error", "listwise"}));
  cmd.add_option("--metadata", o.metadata, "CSV of indicator,theme,subtheme tags");
  cmd.add_option("--variables", o.variables, "Indicators to analyze (default: all)")
      ->delimiter(',');
}

void add_factor_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--retention", o.retention, "Retention rule")
      ->check(CLI::IsMember({"kaiser", "fixed"}));
  cmd.add_option("--factors", o.factors, "Number of factors for fixed retention");
  cmd.add_option("--rotation", o.rotation, "Rotation method")
      ->check(CLI::IsMember({"varimax", "none"}));
  cmd.add_option("--kaiser-normalization", o.kaiser_normalization,
                 "Row-normalize loadings before varimax (true/false)");
  cmd.add_option("--tol", o.tol, "Varimax relative convergence tolerance");
  cmd.add_option("--max-iter", o.max_iter, "Varimax sweep limit");
}

void add_rank_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--factor", o.factor, "Factor number, factor name (F1), or indicator name");
  cmd.add_option("--direction", o.direction, "Rank 1 at the low or high end")
      ->check(CLI::IsMember({"ascending", "descending"}));
  cmd.add_option("--k", o.k, "Cases per extreme group");
}

void add_compare_options(CLI::App& cmd, Overrides& o, bool explicit_groups) {
  cmd.add_option("--compare-variables", o.compare_variables, "Variables to compare")
      ->delimiter(',');
  cmd.add_option("--alpha", o.alpha, "Significance level");
  cmd.add_option("--alpha-levene", o.alpha_levene, "Levene level for choosing pooled vs Welch");
  cmd.add_option("--ci-level", o.ci_level, "Confidence level of the mean-difference interval");
  cmd.add_option("--scope", o.scope, "Standardization scope")
      ->check(CLI::IsMember({"selected", "all"}));
  cmd.add_option("--levene-center", o.levene_center, "Levene centering")
      ->check(CLI::IsMember({"mean", "median"}));
  if (explicit_groups) {
    cmd.add_option("--group1", o.group1, "Group 1 case ids")->delimiter(',');
    cmd.add_option("--group2", o.group2, "Group 2 case ids")->delimiter(',');
  }
}

PipelineConfig build_config(const Overrides& o) {
  PipelineConfig c = o.config ? config_from_file(*o.config) : PipelineConfig{};
  if (o.input) c.input = *o.input;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (!o.formats.empty()) {
    c.formats.clear();
    for (const auto& f : o.formats) {
      c.formats.push_back(f == "json" ? OutputFormat::kJson
                          : f == "csv" ? OutputFormat::kCsv
                                       : OutputFormat::kText);
    }
  }
  if (o.id_column) c.id_column = *o.id_column;
  if (o.missing) c.missing = *o.missing == "listwise" ? MissingPolicy::kListwise : MissingPolicy::kError;
  if (o.metadata) c.metadata = *o.metadata;
  if (!o.variables.empty()) c.variables = o.variables;

  if (o.retention) {
    c.retention = *o.retention == "kaiser" ? RetentionRule::kaiser()
                                           : RetentionRule::fixed(o.factors.value_or(c.retention.fixed_k));
  } else if (o.factors) {
    c.retention = RetentionRule::fixed(*o.factors);
  }
  if (o.rotation) c.rotation = *o.rotation == "none" ? RotationMethod::kNone : RotationMethod::kVarimax;
  if (o.kaiser_normalization) c.varimax.kaiser_normalize = *o.kaiser_normalization;
  if (o.tol) c.varimax.tol = *o.tol;
  if (o.max_iter) c.varimax.max_iter = *o.max_iter;

  if (o.factor) c.ranking.factor = *o.factor;
  if (o.direction) {
    c.ranking.direction = *o.direction == "descending" ? Direction::kDescending : Direction::kAscending;
  }
  if (o.k) c.ranking.k = *o.k;

  if (!o.compare_variables.empty()) c.comparison.variables = o.compare_variables;
  if (o.alpha) c.comparison.stats.alpha = *o.alpha;
  if (o.alpha_levene) c.comparison.stats.alpha_levene = *o.alpha_levene;
  if (o.ci_level) c.comparison.stats.ci_level = *o.ci_level;
  if (o.scope) {
    c.comparison.stats.scope = *o.scope == "all" ? StandardizeScope::kAll : StandardizeScope::kSelected;
  }
  if (o.levene_center) {
    c.comparison.stats.levene_center =
        *o.levene_center == "median" ? LeveneCenter::kMedian : LeveneCenter::kMean;
  }
  if (!o.group1.empty()) c.comparison.group1 = o.group1;
  if (!o.group2.empty()) c.comparison.group2 = o.group2;
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Factor-analytic composite index: extract and rotate factors, rank cases, "
               "and compare the extreme groups"};
  app.name("comindex");
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Overrides o;
  struct Command {
    CLI::App* app;
    Stage stage;
  };
  std::vector<Command> commands;

  auto* analyze = app.add_subcommand("analyze", "Full pipeline: factors, ranking, comparison");
  add_common(*analyze, o);
  add_factor_options(*analyze, o);
  add_rank_options(*analyze, o);
  add_compare_options(*analyze, o, false);
  commands.push_back({analyze, Stage::kAnalyze});

  auto* factors = app.add_subcommand("factors", "Stop after the factor model");
  add_common(*factors, o);
  add_factor_options(*factors, o);
  commands.push_back({factors, Stage::kFactors});

  auto* rank = app.add_subcommand("rank", "Factor model and ranking of cases");
  add_common(*rank, o);
  add_factor_options(*rank, o);
  add_rank_options(*rank, o);
  commands.push_back({rank, Stage::kRank});

  auto* compare = app.add_subcommand("compare", "Compare two explicitly listed groups");
  add_common(*compare, o);
  add_compare_options(*compare, o, true);
  commands.push_back({compare, Stage::kCompare});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "comindex: " << e.what() << "\n\n" << app.help();
    return kUsageExit;
  }

  Stage stage = Stage::kAnalyze;
  for (const auto& c : commands) {
    if (c.app->parsed()) stage = c.stage;
  }

  PipelineConfig config;
  try {
    config = build_config(o);
  } catch (const Error& e) {
    err << "comindex: " << e.what() << '\n';
    return kUsageExit;
  }

  const PipelineResult result = run_pipeline(config, stage);
  for (const auto& w : result.warnings) err << "comindex: warning: " << w << '\n';
  if (result.exit_code != 0) {
    err << "comindex: error in stage '" << result.stage << "': " << result.error << '\n';
    return result.exit_code;
  }
  for (const auto& path : result.written) out << path.string() << '\n';
  return 0;
}

}  // namespace comindex
