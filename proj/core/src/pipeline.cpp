#include "comindex/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "comindex/error.hpp"
#include "comindex/report.hpp"
#include "json.hpp"

#ifndef COMINDEX_VERSION
#define COMINDEX_VERSION "0.0.0"
#endif

namespace comindex {
namespace {

using nlohmann::ordered_json;

// Reads keys from one JSON object, rejecting any key not consumed.
class ObjectReader {
 public:
  ObjectReader(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  void read_count(const char* key, std::size_t& out) {
    long long v = static_cast<long long>(out);
    read(key, v);
    if (v < 0) fail(std::string("'") + key + "' must be non-negative");
    out = static_cast<std::size_t>(v);
  }

  const ordered_json* child(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("config " + (path_.empty() ? std::string("root") : path_) + ": " + what);
  }

  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const ordered_json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename E>
E parse_enum(const std::string& text, std::initializer_list<std::pair<const char*, E>> options,
             const std::string& what) {
  for (const auto& [name, value] : options) {
    if (text == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ValidationError("invalid " + what + " '" + text + "' (expected one of: " + allowed + ")");
}

MissingPolicy parse_missing(const std::string& s) {
  return parse_enum<MissingPolicy>(
      s, {{"error", MissingPolicy::kError}, {"listwise", MissingPolicy::kListwise}},
      "missing policy");
}

std::string to_string(MissingPolicy m) {
  return m == MissingPolicy::kError ? "error" : "listwise";
}

ordered_json to_json(const PipelineConfig& c) {
  ordered_json retention = {{"rule", c.retention.kind == RetentionRule::Kind::kKaiser
                                         ? "kaiser"
                                         : "fixed"}};
  if (c.retention.kind == RetentionRule::Kind::kFixed) retention["k"] = c.retention.fixed_k;
  std::vector<std::string> formats;
  for (auto f : c.formats) formats.push_back(to_string(f));
  ordered_json j;
  j["input"] = c.input;
  j["id_column"] = c.id_column;
  j["missing"] = to_string(c.missing);
  j["metadata"] = c.metadata;
  j["variables"] = c.variables;
  j["retention"] = retention;
  j["rotation"] = {{"method", to_string(c.rotation)},
                   {"kaiser_normalization", c.varimax.kaiser_normalize},
                   {"tol", c.varimax.tol},
                   {"max_iter", c.varimax.max_iter}};
  j["ranking"] = {{"factor", c.ranking.factor},
                  {"direction", c.ranking.direction
                                    ? ordered_json(to_string(*c.ranking.direction))
                                    : ordered_json(nullptr)},
                  {"k", c.ranking.k}};
  j["comparison"] = {{"variables", c.comparison.variables},
                     {"alpha", c.comparison.stats.alpha},
                     {"alpha_levene", c.comparison.stats.alpha_levene},
                     {"ci_level", c.comparison.stats.ci_level},
                     {"standardize_scope", to_string(c.comparison.stats.scope)},
                     {"levene_center", to_string(c.comparison.stats.levene_center)},
                     {"group1", c.comparison.group1},
                     {"group2", c.comparison.group2}};
  j["output"] = {{"directory", c.out_dir}, {"formats", formats}};
  return j;
}

PipelineConfig from_json(const ordered_json& j) {
  PipelineConfig c;
  ObjectReader root(j, "");
  root.read("input", c.input);
  root.read("id_column", c.id_column);
  std::string missing = to_string(c.missing);
  root.read("missing", missing);
  c.missing = parse_missing(missing);
  root.read("metadata", c.metadata);
  root.read("variables", c.variables);

  if (const auto* r = root.child("retention")) {
    ObjectReader rr(*r, "retention");
    std::string rule = "kaiser";
    rr.read("rule", rule);
    std::size_t k = 0;
    rr.read_count("k", k);
    rr.finish();
    if (rule == "kaiser") {
      c.retention = RetentionRule::kaiser();
    } else if (rule == "fixed") {
      c.retention = RetentionRule::fixed(k);
    } else {
      rr.fail("rule must be 'kaiser' or 'fixed'");
    }
  }
  if (const auto* r = root.child("rotation")) {
    ObjectReader rr(*r, "rotation");
    std::string method = to_string(c.rotation);
    rr.read("method", method);
    c.rotation = parse_enum<RotationMethod>(
        method, {{"varimax", RotationMethod::kVarimax}, {"none", RotationMethod::kNone}},
        "rotation method");
    rr.read("kaiser_normalization", c.varimax.kaiser_normalize);
    rr.read("tol", c.varimax.tol);
    rr.read("max_iter", c.varimax.max_iter);
    rr.finish();
  }
  if (const auto* r = root.child("ranking")) {
    ObjectReader rr(*r, "ranking");
    if (const auto* f = rr.child("factor")) {
      if (f->is_number_integer()) {
        c.ranking.factor = std::to_string(f->get<long long>());
      } else if (f->is_string()) {
        c.ranking.factor = f->get<std::string>();
      } else {
        rr.fail("factor must be a number or a name");
      }
    }
    std::string direction;
    rr.read("direction", direction);
    if (!direction.empty()) {
      c.ranking.direction = parse_enum<Direction>(
          direction,
          {{"ascending", Direction::kAscending}, {"descending", Direction::kDescending}},
          "direction");
    }
    rr.read_count("k", c.ranking.k);
    rr.finish();
  }
  if (const auto* r = root.child("comparison")) {
    ObjectReader rr(*r, "comparison");
    rr.read("variables", c.comparison.variables);
    rr.read("alpha", c.comparison.stats.alpha);
    rr.read("alpha_levene", c.comparison.stats.alpha_levene);
    rr.read("ci_level", c.comparison.stats.ci_level);
    std::string scope = to_string(c.comparison.stats.scope);
    rr.read("standardize_scope", scope);
    c.comparison.stats.scope = parse_enum<StandardizeScope>(
        scope, {{"selected", StandardizeScope::kSelected}, {"all", StandardizeScope::kAll}},
        "standardize scope");
    std::string center = to_string(c.comparison.stats.levene_center);
    rr.read("levene_center", center);
    c.comparison.stats.levene_center = parse_enum<LeveneCenter>(
        center, {{"mean", LeveneCenter::kMean}, {"median", LeveneCenter::kMedian}},
        "levene center");
    rr.read("group1", c.comparison.group1);
    rr.read("group2", c.comparison.group2);
    rr.finish();
  }
  if (const auto* r = root.child("output")) {
    ObjectReader rr(*r, "output");
    rr.read("directory", c.out_dir);
    std::vector<std::string> formats;
    rr.read("formats", formats);
    if (r->contains("formats")) {
      c.formats.clear();
      for (const auto& f : formats) {
        c.formats.push_back(parse_enum<OutputFormat>(
            f,
            {{"json", OutputFormat::kJson}, {"csv", OutputFormat::kCsv},
             {"text", OutputFormat::kText}},
            "output format"));
      }
    }
    rr.finish();
  }
  root.finish();
  return c;
}

bool is_number(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

std::size_t resolve_factor(const FactorModel& model, const std::string& selector) {
  const std::size_t k = model.retained;
  if (is_number(selector)) {
    const std::size_t idx = std::stoul(selector);
    if (idx < 1 || idx > k) {
      throw ValidationError("factor " + selector + " does not exist (model retains " +
                            std::to_string(k) + " factors)");
    }
    return idx - 1;
  }
  const auto names = model.factor_names();
  if (auto it = std::find(names.begin(), names.end(), selector); it != names.end()) {
    return static_cast<std::size_t>(it - names.begin());
  }
  const auto& vars = model.variable_names;
  if (auto it = std::find(vars.begin(), vars.end(), selector); it != vars.end()) {
    const std::size_t row = static_cast<std::size_t>(it - vars.begin());
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (std::abs(model.loadings_rotated(row, c)) > std::abs(model.loadings_rotated(row, best))) {
        best = c;
      }
    }
    return best;
  }
  throw ValidationError("unknown factor selector '" + selector +
                        "' (use a factor number, a factor name such as F1, or an indicator name)");
}

bool wants(const PipelineConfig& c, OutputFormat f) {
  return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end();
}

using Files = std::vector<std::pair<std::string, std::string>>;

}  // namespace

std::string version() { return COMINDEX_VERSION; }

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::kFactors: return "factors";
    case Stage::kRank: return "rank";
    case Stage::kCompare: return "compare";
    case Stage::kAnalyze: return "analyze";
  }
  return "analyze";
}

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::kJson: return "json";
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kText: return "text";
  }
  return "json";
}

PipelineConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

PipelineConfig config_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const PipelineConfig& config) { return to_json(config).dump(2) + "\n"; }

void validate(const PipelineConfig& c, Stage stage) {
  if (c.input.empty()) throw ValidationError("no input file given");
  if (c.out_dir.empty()) throw ValidationError("no output directory given");
  if (c.formats.empty()) throw ValidationError("at least one output format is required");
  if (stage != Stage::kCompare) {
    if (c.retention.kind == RetentionRule::Kind::kFixed && c.retention.fixed_k < 1) {
      throw ValidationError("fixed retention needs k >= 1");
    }
    if (!(c.varimax.tol > 0.0)) throw ValidationError("rotation tol must be positive");
    if (c.varimax.max_iter < 1) throw ValidationError("rotation max_iter must be at least 1");
  }
  if (stage == Stage::kRank || stage == Stage::kAnalyze) {
    if (c.ranking.k < 1) throw ValidationError("group size k must be at least 1");
    if (!is_number(c.ranking.factor) && !c.ranking.direction) {
      throw ValidationError("factor '" + c.ranking.factor +
                            "' is chosen by name; state the ranking direction explicitly "
                            "(ascending or descending)");
    }
  }
  if (stage == Stage::kCompare || stage == Stage::kAnalyze) {
    const auto& s = c.comparison.stats;
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
    if (!(s.alpha_levene > 0.0 && s.alpha_levene < 1.0)) {
      throw ValidationError("alpha_levene must lie in (0, 1)");
    }
    if (!(s.ci_level > 0.0 && s.ci_level < 1.0)) {
      throw ValidationError("ci_level must lie in (0, 1)");
    }
  }
  if (stage == Stage::kCompare &&
      (c.comparison.group1.size() < 2 || c.comparison.group2.size() < 2)) {
    throw ValidationError("compare needs explicit group1 and group2 id lists of at least 2 cases");
  }
}

PipelineResult run_pipeline(const PipelineConfig& config, Stage stage) {
  PipelineResult result;
  std::string current = "validate";
  try {
    validate(config, stage);

    current = "load";
    CsvLoadOptions load_options{config.id_column, config.missing};
    LoadedDataset loaded = load_csv(config.input, load_options);
    result.warnings = loaded.warnings;
    IndicatorDataset ds = config.metadata.empty()
                              ? std::move(loaded.dataset)
                              : attach_metadata(loaded.dataset, config.metadata);
    IndicatorDataset analysis =
        config.variables.empty() ? ds : select_variables(ds, config.variables);
    const std::vector<std::string> compare_vars =
        config.comparison.variables.empty() ? analysis.indicator_names()
                                            : config.comparison.variables;

    Files files;
    ordered_json results;
    const bool json = wants(config, OutputFormat::kJson);
    const bool csv = wants(config, OutputFormat::kCsv);
    const bool text = wants(config, OutputFormat::kText);

    std::vector<std::string> group1 = config.comparison.group1;
    std::vector<std::string> group2 = config.comparison.group2;

    if (stage != Stage::kCompare) {
      current = "standardize";
      const StandardizedMatrix z = standardize(analysis);

      current = "factors";
      FactorOptions options{config.retention, config.rotation, config.varimax};
      const FactorModel model = fit_factor_model(z, analysis, options);
      if (!model.rotation_converged) {
        throw NumericalError("varimax did not converge within " +
                             std::to_string(config.varimax.max_iter) + " sweeps",
                             "rotate");
      }
      current = "score";
      const FactorScores scores = factor_scores(z, model.score_coefficients, analysis.case_ids());

      if (json) files.emplace_back("factor_model.json", factor_model_json(model));
      if (csv) {
        files.emplace_back("factor_model.csv", factor_loadings_csv(model));
        files.emplace_back("factor_model_eigenvalues.csv", factor_eigenvalues_csv(model));
        files.emplace_back("factor_model_coefficients.csv", factor_coefficients_csv(model));
        files.emplace_back("factor_model_scores.csv", factor_scores_csv(scores));
      }
      if (text) files.emplace_back("factor_model.txt", factor_model_text(model));
      results["retained"] = model.retained;
      results["variance_explained"] = model.variance_explained;
      results["kmo"] = model.kmo.overall;
      results["kmo_label"] = model.kmo.label;

      if (stage == Stage::kRank || stage == Stage::kAnalyze) {
        current = "rank";
        const std::size_t factor = resolve_factor(model, config.ranking.factor);
        const RankedIndex ranked =
            rank_and_group(scores, factor,
                           config.ranking.direction.value_or(Direction::kAscending),
                           config.ranking.k);
        const auto markers = marker_variables(model, factor);
        if (json) files.emplace_back("ranking.json", ranking_json(ranked, markers));
        if (csv) files.emplace_back("ranking.csv", ranking_csv(ranked));
        if (text) files.emplace_back("ranking.txt", ranking_text(ranked, markers));
        results["ranked_factor"] = ranked.factor_name;
        group1 = ranked.group1_ids;
        group2 = ranked.group2_ids;
      }
    }

    if (stage == Stage::kCompare || stage == Stage::kAnalyze) {
      current = "compare";
      const GroupComparisonReport report =
          compare_groups(ds, group1, group2, compare_vars, config.comparison.stats);
      if (json) files.emplace_back("comparison.json", comparison_json(report));
      if (csv) files.emplace_back("comparison.csv", comparison_csv(report));
      if (text) files.emplace_back("comparison.txt", comparison_text(report));
      results["unequal_variances"] = report.unequal_variance_count();
      results["significant"] = report.significant_count();
    }

    ordered_json summary;
    summary["tool"] = "comindex";
    summary["version"] = version();
    summary["stage"] = to_string(stage);
    summary["config"] = to_json(config);
    summary["data"] = {{"cases", ds.n_cases()},
                       {"indicators", ds.n_variables()},
                       {"analysis_variables", analysis.n_variables()}};
    summary["results"] = results.is_null() ? ordered_json::object() : results;
    summary["warnings"] = result.warnings;
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.first);
    names.push_back("run_summary.json");
    summary["outputs"] = names;
    files.emplace_back("run_summary.json", summary.dump(2) + "\n");

    current = "write";
    const std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw ValidationError("cannot create output directory " + dir.string() + ": " +
                            ec.message());
    }
    for (const auto& [name, content] : files) {
      const auto path = dir / name;
      std::ofstream out(path, std::ios::binary);
      out << content;
      if (!out) throw ValidationError("cannot write " + path.string());
      result.written.push_back(path);
    }
  } catch (const NumericalError& e) {
    result.exit_code = 3;
    result.stage = e.stage().empty() ? current : e.stage();
    result.error = e.what();
  } catch (const ValidationError& e) {
    result.exit_code = 2;
    result.stage = current;
    result.error = e.what();
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.stage = current;
    result.error = e.what();
  }
  return result;
}

}  // namespace comindex
