#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "comindex/error.hpp"
#include "comindex/pipeline.hpp"
#include "comindex/synthetic.hpp"
#include "files.hpp"
#include "json.hpp"

using namespace comindex;
namespace fs = std::filesystem;
using comindex::testing::TempDir;

namespace {

PlantedModel wide_model() {
  PlantedModel m;
  m.n_factors = 8;
  m.noise_variables = 2;
  return m;
}

std::string write_dataset(const TempDir& dir, const PlantedModel& model, const char* name) {
  const auto data = make_planted_dataset(model);
  comindex::testing::write_text(dir / name, comindex::testing::dataset_csv(data.dataset));
  return (dir / name).string();
}

std::vector<std::string> file_names(const fs::path& dir) {
  std::vector<std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("config defaults and JSON round trip") {
  const PipelineConfig defaults;
  CHECK(config_from_json("{}") == defaults);
  CHECK(config_from_json(config_to_json(defaults)) == defaults);

  PipelineConfig c;
  c.input = "in.csv";
  c.id_column = "tract";
  c.missing = MissingPolicy::kListwise;
  c.metadata = "meta.csv";
  c.variables = {"a", "b", "c"};
  c.retention = RetentionRule::fixed(4);
  c.rotation = RotationMethod::kNone;
  c.varimax = {false, 1e-8, 55};
  c.ranking = {"F2", Direction::kDescending, 7};
  c.comparison.variables = {"b"};
  c.comparison.stats = {0.1, 0.01, 0.9, StandardizeScope::kAll, LeveneCenter::kMedian};
  c.comparison.group1 = {"x", "y"};
  c.comparison.group2 = {"z", "w"};
  c.out_dir = "results";
  c.formats = {OutputFormat::kCsv};
  CHECK(config_from_json(config_to_json(c)) == c);
}

TEST_CASE("config parsing rejects bad input") {
  CHECK_THROWS_AS(config_from_json("{"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"inptu": "x"})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"retention": {"rule": "scree"}})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"ranking": {"direction": "up"}})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"output": {"formats": ["xml"]}})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"ranking": {"k": -3}})"), ValidationError);
  CHECK_THROWS_AS(config_from_json(R"({"comparison": {"alpha": "big"}})"), ValidationError);
  CHECK(config_from_json(R"({"ranking": {"factor": 2}})").ranking.factor == "2");
  CHECK_THROWS_AS(config_from_file("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("validate") {
  PipelineConfig c;
  CHECK_THROWS_AS(validate(c, Stage::kAnalyze), ValidationError);
  c.input = "x.csv";
  CHECK_NOTHROW(validate(c, Stage::kAnalyze));
  c.ranking.factor = "F1";
  CHECK_THROWS_AS(validate(c, Stage::kRank), ValidationError);
  CHECK_NOTHROW(validate(c, Stage::kFactors));
  c.ranking.direction = Direction::kAscending;
  CHECK_NOTHROW(validate(c, Stage::kRank));
  c.ranking.k = 0;
  CHECK_THROWS_AS(validate(c, Stage::kRank), ValidationError);
  c.ranking.k = 10;
  c.comparison.stats.alpha = 0.0;
  CHECK_THROWS_AS(validate(c, Stage::kAnalyze), ValidationError);
  c.comparison.stats.alpha = 0.05;
  c.comparison.stats.ci_level = 1.0;
  CHECK_THROWS_AS(validate(c, Stage::kCompare), ValidationError);
  c.comparison.stats.ci_level = 0.95;
  CHECK_THROWS_AS(validate(c, Stage::kCompare), ValidationError);
  c.comparison.group1 = {"a", "b"};
  c.comparison.group2 = {"c", "d"};
  CHECK_NOTHROW(validate(c, Stage::kCompare));
  c.formats.clear();
  CHECK_THROWS_AS(validate(c, Stage::kCompare), ValidationError);
  c.formats = {OutputFormat::kJson};
  c.retention = RetentionRule::fixed(0);
  CHECK_THROWS_AS(validate(c, Stage::kFactors), ValidationError);
}

TEST_CASE("analyze writes every report and a summary") {
  TempDir dir("pipeline");
  PipelineConfig c;
  c.input = write_dataset(dir, wide_model(), "data.csv");
  c.out_dir = (dir / "out").string();
  const auto res = run_pipeline(c);
  INFO(res.error);
  REQUIRE(res.exit_code == 0);
  const std::vector<std::string> expected{"comparison.csv",
                                          "comparison.json",
                                          "comparison.txt",
                                          "factor_model.csv",
                                          "factor_model.json",
                                          "factor_model.txt",
                                          "factor_model_coefficients.csv",
                                          "factor_model_eigenvalues.csv",
                                          "factor_model_scores.csv",
                                          "ranking.csv",
                                          "ranking.json",
                                          "ranking.txt",
                                          "run_summary.json"};
  CHECK(file_names(dir / "out") == expected);
  CHECK(res.written.size() == expected.size());

  const auto summary =
      nlohmann::json::parse(comindex::testing::read_text(dir / "out" / "run_summary.json"));
  CHECK(summary["tool"] == "comindex");
  CHECK(summary["version"] == version());
  CHECK(summary["data"]["cases"] == 88);
  CHECK(summary["data"]["indicators"] == 34);
  CHECK(config_from_json(summary["config"].dump()) == c);

  const auto cmp =
      nlohmann::json::parse(comindex::testing::read_text(dir / "out" / "comparison.json"));
  CHECK(cmp["variables"].size() == 34);
}

TEST_CASE("stages limit the outputs") {
  TempDir dir("stages");
  PipelineConfig c;
  c.input = write_dataset(dir, PlantedModel{}, "data.csv");
  c.formats = {OutputFormat::kCsv};

  c.out_dir = (dir / "factors").string();
  REQUIRE(run_pipeline(c, Stage::kFactors).exit_code == 0);
  CHECK(file_names(dir / "factors") ==
        std::vector<std::string>{"factor_model.csv", "factor_model_coefficients.csv",
                                 "factor_model_eigenvalues.csv", "factor_model_scores.csv",
                                 "run_summary.json"});

  c.out_dir = (dir / "rank").string();
  c.formats = {OutputFormat::kText};
  REQUIRE(run_pipeline(c, Stage::kRank).exit_code == 0);
  CHECK(file_names(dir / "rank") ==
        std::vector<std::string>{"factor_model.txt", "ranking.txt", "run_summary.json"});

  c.out_dir = (dir / "compare").string();
  c.formats = {OutputFormat::kJson};
  c.comparison.group1 = {"C001", "C002", "C003"};
  c.comparison.group2 = {"C010", "C011", "C012"};
  const auto res = run_pipeline(c, Stage::kCompare);
  INFO(res.error);
  REQUIRE(res.exit_code == 0);
  CHECK(file_names(dir / "compare") ==
        std::vector<std::string>{"comparison.json", "run_summary.json"});
}

TEST_CASE("factor selection by name or indicator") {
  TempDir dir("select");
  PipelineConfig c;
  c.input = write_dataset(dir, PlantedModel{}, "data.csv");
  c.out_dir = (dir / "out").string();
  c.formats = {OutputFormat::kJson};
  c.ranking.direction = Direction::kDescending;

  c.ranking.factor = "F2";
  REQUIRE(run_pipeline(c, Stage::kRank).exit_code == 0);
  auto ranking = nlohmann::json::parse(comindex::testing::read_text(dir / "out" / "ranking.json"));
  CHECK(ranking["factor"] == "F2");

  c.ranking.factor = "F3_V2";
  REQUIRE(run_pipeline(c, Stage::kRank).exit_code == 0);
  const auto model =
      nlohmann::json::parse(comindex::testing::read_text(dir / "out" / "factor_model.json"));
  ranking = nlohmann::json::parse(comindex::testing::read_text(dir / "out" / "ranking.json"));
  const auto names = model["variables"].get<std::vector<std::string>>();
  const auto row = model["loadings_rotated"][std::find(names.begin(), names.end(), "F3_V2") -
                                             names.begin()]
                       .get<std::vector<double>>();
  const auto strongest = std::max_element(row.begin(), row.end(), [](double a, double b) {
                           return std::fabs(a) < std::fabs(b);
                         }) - row.begin();
  CHECK(ranking["factor_index"] == strongest);

  c.ranking.factor = "F9";
  CHECK(run_pipeline(c, Stage::kRank).exit_code == 2);
  c.ranking.factor = "NoSuchVariable";
  CHECK(run_pipeline(c, Stage::kRank).exit_code == 2);
  c.ranking.factor = "4";
  CHECK(run_pipeline(c, Stage::kRank).exit_code == 2);
}

TEST_CASE("validation failures exit 2 without writing") {
  TempDir dir("fail2");
  PipelineConfig c;
  c.input = write_dataset(dir, PlantedModel{}, "data.csv");
  c.out_dir = (dir / "out").string();
  c.ranking.k = 60;
  const auto res = run_pipeline(c);
  CHECK(res.exit_code == 2);
  CHECK(res.error.find("floor(n/2)") != std::string::npos);
  CHECK(res.stage == "rank");
  CHECK_FALSE(fs::exists(dir / "out"));

  c.ranking.k = 10;
  c.input = (dir / "missing.csv").string();
  CHECK(run_pipeline(c).exit_code == 2);
  CHECK_FALSE(fs::exists(dir / "out"));

  c.input = (dir / "data.csv").string();
  c.variables = {"F1_V1", "F1_V5"};
  const auto bad_var = run_pipeline(c);
  CHECK(bad_var.exit_code == 2);
  CHECK(bad_var.error.find("did you mean") != std::string::npos);
}

TEST_CASE("numerical failures exit 3 and name the stage") {
  TempDir dir("fail3");
  comindex::testing::write_text(dir / "ortho.csv",
                                "id,a,b,c\nw,1,1,1\nx,1,-1,-1\ny,-1,1,-1\nz,-1,-1,1\n");
  PipelineConfig c;
  c.input = (dir / "ortho.csv").string();
  c.out_dir = (dir / "out").string();
  const auto res = run_pipeline(c);
  CHECK(res.exit_code == 3);
  CHECK(res.stage == "extract");
  CHECK_FALSE(fs::exists(dir / "out"));

  c.input = write_dataset(dir, wide_model(), "wide.csv");
  c.varimax.max_iter = 1;
  const auto rot = run_pipeline(c);
  CHECK(rot.exit_code == 3);
  CHECK(rot.stage == "rotate");
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("listwise warnings reach the summary") {
  TempDir dir("warn");
  auto text = comindex::testing::dataset_csv(make_planted_dataset(PlantedModel{}).dataset);
  const auto pos = text.find("\nC005,") + 6;
  text.replace(pos, text.find(',', pos) - pos, "NA");
  comindex::testing::write_text(dir / "d.csv", text);
  PipelineConfig c;
  c.input = (dir / "d.csv").string();
  c.out_dir = (dir / "out").string();
  CHECK(run_pipeline(c).exit_code == 2);
  c.missing = MissingPolicy::kListwise;
  const auto res = run_pipeline(c);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.warnings.size() == 1);
  const auto summary =
      nlohmann::json::parse(comindex::testing::read_text(dir / "out" / "run_summary.json"));
  CHECK(summary["data"]["cases"] == 87);
  CHECK(summary["warnings"][0].get<std::string>().find("C005") != std::string::npos);
}

TEST_CASE("identical runs produce identical bytes") {
  TempDir dir("determinism");
  PipelineConfig c;
  c.input = write_dataset(dir, wide_model(), "data.csv");
  c.out_dir = (dir / "a").string();
  REQUIRE(run_pipeline(c).exit_code == 0);
  c.out_dir = (dir / "b").string();
  REQUIRE(run_pipeline(c).exit_code == 0);
  for (const auto& name : file_names(dir / "a")) {
    if (name == "run_summary.json") continue;  // echoes the output directory
    CHECK_MESSAGE(comindex::testing::read_text(dir / "a" / name) ==
                      comindex::testing::read_text(dir / "b" / name),
                  name);
  }
}
