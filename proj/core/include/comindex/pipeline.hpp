#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "comindex/dataset.hpp"
#include "comindex/factors.hpp"
#include "comindex/inference.hpp"
#include "comindex/ranking.hpp"

namespace comindex {

enum class OutputFormat { kJson, kCsv, kText };

// How far the pipeline runs. kCompare skips factoring and ranking and
// takes the groups from the configuration.
enum class Stage { kFactors, kRank, kCompare, kAnalyze };

struct RankingConfig {
  // 1-based factor number ("1"), factor name ("F1"), or an indicator
  // name, meaning the factor on which it loads most strongly.
  std::string factor = "1";
  // Required whenever `factor` is not a plain number.
  std::optional<Direction> direction;
  std::size_t k = 10;

  friend bool operator==(const RankingConfig&, const RankingConfig&) = default;
};

struct CompareConfig {
  std::vector<std::string> variables;  // empty: the analysis variables
  ComparisonConfig stats;
  std::vector<std::string> group1;  // used by Stage::kCompare only
  std::vector<std::string> group2;

  friend bool operator==(const CompareConfig&, const CompareConfig&) = default;
};

struct PipelineConfig {
  std::string input;
  std::string id_column;
  MissingPolicy missing = MissingPolicy::kError;
  std::string metadata;
  std::vector<std::string> variables;  // empty: every indicator
  RetentionRule retention;
  RotationMethod rotation = RotationMethod::kVarimax;
  VarimaxOptions varimax;
  RankingConfig ranking;
  CompareConfig comparison;
  std::string out_dir = "out";
  std::vector<OutputFormat> formats{OutputFormat::kJson, OutputFormat::kCsv,
                                    OutputFormat::kText};

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Parses a JSON configuration; missing keys keep their defaults and
// unknown keys are rejected. Throws ValidationError.
PipelineConfig config_from_json(const std::string& text);
PipelineConfig config_from_file(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

// Throws ValidationError on the first violated constraint.
void validate(const PipelineConfig& config, Stage stage);

std::string to_string(Stage stage);
std::string to_string(OutputFormat format);

struct PipelineResult {
  int exit_code = 0;  // 0 ok, 2 validation, 3 numerical
  std::string stage;  // failing stage, when exit_code != 0
  std::string error;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> written;
};

// Runs the stages up to `stage` and writes the requested reports plus
// run_summary.json into config.out_dir. Nothing is written unless every
// stage succeeds. Does not throw.
PipelineResult run_pipeline(const PipelineConfig& config, Stage stage = Stage::kAnalyze);

std::string version();

}  // namespace comindex
