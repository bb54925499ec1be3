#include "comindex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "comindex/csv.hpp"
#include "json.hpp"

namespace comindex {
namespace {

using nlohmann::ordered_json;

// Column-aligned plain text table. The first column is left aligned,
// the rest right aligned.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    row.resize(header_.size());
    rows_.push_back(std::move(row));
  }

  std::string render() const {
    std::vector<std::size_t> width(header_.size(), 0);
    auto widen = [&](const std::vector<std::string>& r) {
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    };
    widen(header_);
    for (const auto& r : rows_) widen(r);

    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& r) {
      std::string text;
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) text += " | ";
        const std::string pad(width[c] - r[c].size(), ' ');
        text += c == 0 ? r[c] + pad : pad + r[c];
      }
      while (!text.empty() && text.back() == ' ') text.pop_back();
      out << text << '\n';
    };
    line(header_);
    std::string rule;
    for (std::size_t c = 0; c < width.size(); ++c) {
      if (c) rule += "-+-";
      rule += std::string(width[c], '-');
    }
    out << rule << '\n';
    for (const auto& r : rows_) line(r);
    return out.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string num(double v) { return csv::format_double(v); }

std::string matrix_csv(const std::vector<std::string>& row_names, const Matrix& m,
                       const std::vector<std::string>& col_names, const std::string& first) {
  std::ostringstream out;
  csv::Row header{first};
  header.insert(header.end(), col_names.begin(), col_names.end());
  out << csv::join(header) << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    csv::Row row{row_names[r]};
    for (double v : m.row(r)) row.push_back(num(v));
    out << csv::join(row) << '\n';
  }
  return out.str();
}

ordered_json descriptives_json(const GroupDescriptives& d) {
  return {{"n", d.n}, {"mean", d.mean}, {"sd", d.sd}, {"sem", d.sem}};
}

ordered_json ttest_json(const std::optional<TTestResult>& t) {
  if (!t) return nullptr;
  return {{"variant", to_string(t->variant)},
          {"t", t->t},
          {"df", t->df},
          {"p_two_tailed", t->p_two_tailed},
          {"mean_difference", t->mean_difference},
          {"se_difference", t->se_difference},
          {"ci_level", t->level},
          {"ci_low", t->ci_low},
          {"ci_high", t->ci_high},
          {"degenerate", t->degenerate}};
}

}  // namespace

std::string to_string(Direction d) {
  return d == Direction::kAscending ? "ascending" : "descending";
}
std::string to_string(TTestVariant v) { return v == TTestVariant::kPooled ? "pooled" : "welch"; }
std::string to_string(LeveneCenter c) { return c == LeveneCenter::kMean ? "mean" : "median"; }
std::string to_string(StandardizeScope s) {
  return s == StandardizeScope::kSelected ? "selected" : "all";
}
std::string to_string(RotationMethod m) {
  return m == RotationMethod::kVarimax ? "varimax" : "none";
}

std::string format3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::vector<std::pair<std::string, double>> marker_variables(const FactorModel& model,
                                                             std::size_t factor,
                                                             std::size_t count) {
  std::vector<std::size_t> order(model.variable_names.size());
  std::iota(order.begin(), order.end(), 0);
  const Matrix& l = model.loadings_rotated;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(l(a, factor)) > std::abs(l(b, factor));
  });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < std::min(count, order.size()); ++i) {
    out.emplace_back(model.variable_names[order[i]], l(order[i], factor));
  }
  return out;
}

std::string factor_model_json(const FactorModel& model) {
  ordered_json tags = ordered_json::array();
  for (const auto& t : model.variable_tags) {
    if (t) {
      tags.push_back({{"theme", t->theme}, {"subtheme", t->subtheme}});
    } else {
      tags.push_back(nullptr);
    }
  }
  ordered_json j;
  j["variables"] = model.variable_names;
  j["variable_tags"] = tags;
  j["factors"] = model.factor_names();
  j["eigenvalues"] = model.eigenvalues;
  j["retained"] = model.retained;
  j["variance_explained"] = model.variance_explained;
  j["communalities"] = model.communalities;
  j["kmo"] = {{"overall", model.kmo.overall},
              {"label", model.kmo.label},
              {"per_variable", model.kmo.per_variable}};
  j["rotation"] = {{"method", to_string(model.rotation_method)},
                   {"kaiser_normalization", model.kaiser_normalized},
                   {"converged", model.rotation_converged},
                   {"sweeps", model.rotation_sweeps},
                   {"criterion_history", model.criterion_history},
                   {"matrix", matrix_json(model.rotation)}};
  j["loadings_unrotated"] = matrix_json(model.loadings_unrotated);
  j["loadings_rotated"] = matrix_json(model.loadings_rotated);
  j["score_coefficients"] = matrix_json(model.score_coefficients);
  return dump(j);
}

std::string factor_loadings_csv(const FactorModel& model) {
  std::ostringstream out;
  csv::Row header{"variable"};
  for (const auto& f : model.factor_names()) header.push_back(f);
  header.push_back("communality");
  out << csv::join(header) << '\n';
  for (std::size_t i = 0; i < model.variable_names.size(); ++i) {
    csv::Row row{model.variable_names[i]};
    for (double v : model.loadings_rotated.row(i)) row.push_back(num(v));
    row.push_back(num(model.communalities[i]));
    out << csv::join(row) << '\n';
  }
  return out.str();
}

std::string factor_eigenvalues_csv(const FactorModel& model) {
  std::ostringstream out;
  out << "component,eigenvalue,proportion,cumulative,retained\n";
  const double p = static_cast<double>(model.eigenvalues.size());
  double cumulative = 0.0;
  for (std::size_t k = 0; k < model.eigenvalues.size(); ++k) {
    cumulative += model.eigenvalues[k];
    out << (k + 1) << ',' << num(model.eigenvalues[k]) << ',' << num(model.eigenvalues[k] / p)
        << ',' << num(cumulative / p) << ',' << (k < model.retained ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string factor_coefficients_csv(const FactorModel& model) {
  return matrix_csv(model.variable_names, model.score_coefficients, model.factor_names(),
                    "variable");
}

std::string factor_scores_csv(const FactorScores& scores) {
  return matrix_csv(scores.case_ids, scores.scores, scores.factor_names, "case_id");
}

std::string factor_model_text(const FactorModel& model) {
  const std::size_t p = model.variable_names.size();
  const std::size_t k = model.retained;
  const Matrix& l = model.loadings_rotated;

  std::vector<std::size_t> dominant(p, 0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t c = 1; c < k; ++c)
      if (std::abs(l(i, c)) > std::abs(l(i, dominant[i]))) dominant[i] = c;
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dominant[a] != dominant[b]) return dominant[a] < dominant[b];
    return std::abs(l(a, dominant[a])) > std::abs(l(b, dominant[b]));
  });

  std::vector<std::string> header{"Variable"};
  for (const auto& f : model.factor_names()) header.push_back(f);
  header.push_back("Communality");
  TextTable table(header);
  for (std::size_t i : order) {
    std::vector<std::string> row{model.variable_names[i]};
    for (double v : l.row(i)) row.push_back(format3(v));
    row.push_back(format3(model.communalities[i]));
    table.add(std::move(row));
  }

  std::ostringstream out;
  out << "Principal Components Analysis (" << to_string(model.rotation_method)
      << (model.kaiser_normalized ? ", Kaiser normalization" : "") << ")\n\n";
  out << table.render() << '\n';
  out << "Factors retained: " << k << " of " << p << '\n';
  out << "Variance explained: " << format3(100.0 * model.variance_explained) << "%\n";
  out << "KMO: " << format3(model.kmo.overall) << " (" << model.kmo.label << ")\n";
  double min_h = 1.0;
  for (double h : model.communalities) min_h = std::min(min_h, h);
  out << "Smallest communality: " << format3(min_h) << '\n';
  if (model.rotation_method == RotationMethod::kVarimax) {
    out << "Rotation: " << (model.rotation_converged ? "converged" : "NOT converged")
        << " after " << model.rotation_sweeps << " sweeps\n";
  }
  out << "\nEigenvalues:";
  for (std::size_t c = 0; c < model.eigenvalues.size(); ++c) {
    out << (c % 8 == 0 ? "\n  " : " ") << format3(model.eigenvalues[c]);
  }
  out << '\n';
  return out.str();
}

std::string ranking_json(const RankedIndex& ranked,
                         const std::vector<std::pair<std::string, double>>& markers) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : ranked.entries) {
    entries.push_back({{"rank", e.rank}, {"case_id", e.case_id}, {"score", e.score}});
  }
  ordered_json marker_json = ordered_json::array();
  for (const auto& [name, loading] : markers) {
    marker_json.push_back({{"variable", name}, {"loading", loading}});
  }
  ordered_json j;
  j["factor"] = ranked.factor_name;
  j["factor_index"] = ranked.factor;
  j["direction"] = to_string(ranked.direction);
  j["marker_variables"] = marker_json;
  j["group_size"] = ranked.group_size;
  j["group1_ids"] = ranked.group1_ids;
  j["group2_ids"] = ranked.group2_ids;
  j["entries"] = entries;
  return dump(j);
}

std::string ranking_csv(const RankedIndex& ranked) {
  const std::size_t n = ranked.entries.size();
  const std::size_t k = ranked.group_size;
  std::ostringstream out;
  out << "rank,case_id,score,group\n";
  for (const auto& e : ranked.entries) {
    std::string group;
    if (k && e.rank <= k) group = "1";
    if (k && e.rank > n - k) group = "2";
    out << csv::join({std::to_string(e.rank), e.case_id, num(e.score), group}) << '\n';
  }
  return out.str();
}

std::string ranking_text(const RankedIndex& ranked,
                         const std::vector<std::pair<std::string, double>>& markers) {
  const std::size_t n = ranked.entries.size();
  const std::size_t k = ranked.group_size;
  std::ostringstream out;
  out << "Case ranks on factor " << ranked.factor_name << " (" << to_string(ranked.direction)
      << ")\n";
  if (!markers.empty()) {
    out << "Strongest loadings:";
    for (const auto& [name, loading] : markers) out << ' ' << name << " (" << format3(loading) << ')';
    out << "\n";
  }
  out << '\n';
  TextTable table({"Rank", "Case"});
  for (const auto& e : ranked.entries) {
    if (k == 0 || e.rank <= k || e.rank > n - k) table.add({std::to_string(e.rank), e.case_id});
  }
  out << table.render();
  if (k) {
    out << "\nGroup 1: ranks 1-" << k << "; Group 2: ranks " << (n - k + 1) << '-' << n << '\n';
  }
  return out.str();
}

std::string comparison_json(const GroupComparisonReport& report) {
  ordered_json vars = ordered_json::array();
  for (const auto& v : report.variables) {
    ordered_json levene = nullptr;
    if (v.levene) {
      levene = {{"F", v.levene->f},
                {"df1", v.levene->df1},
                {"df2", v.levene->df2},
                {"p", v.levene->p},
                {"center", to_string(v.levene->center)}};
    }
    vars.push_back({{"variable", v.variable},
                    {"group1", descriptives_json(v.group1)},
                    {"group2", descriptives_json(v.group2)},
                    {"levene", levene},
                    {"pooled", ttest_json(v.pooled)},
                    {"welch", ttest_json(v.welch)},
                    {"equal_variances", v.equal_variances},
                    {"reported_variant", to_string(v.reported_variant)},
                    {"significant", v.significant},
                    {"significant_at_0_05", v.significant_05},
                    {"significant_at_0_10", v.significant_10},
                    {"notes", v.notes}});
  }
  ordered_json j;
  j["config"] = {{"alpha", report.config.alpha},
                 {"alpha_levene", report.config.alpha_levene},
                 {"ci_level", report.config.ci_level},
                 {"standardize_scope", to_string(report.config.scope)},
                 {"levene_center", to_string(report.config.levene_center)}};
  j["group1_ids"] = report.group1_ids;
  j["group2_ids"] = report.group2_ids;
  j["summary"] = {{"variables", report.variables.size()},
                  {"unequal_variances", report.unequal_variance_count()},
                  {"significant", report.significant_count()}};
  j["variables"] = vars;
  return dump(j);
}

std::string comparison_csv(const GroupComparisonReport& report) {
  std::ostringstream out;
  out << csv::join({"variable", "n1", "mean1", "sd1", "sem1", "n2", "mean2", "sd2", "sem2",
                    "levene_f", "levene_p", "variant", "t", "df", "p_two_tailed",
                    "mean_difference", "se_difference", "ci_low", "ci_high", "reported",
                    "significant", "significant_at_0_05", "significant_at_0_10", "notes"})
      << '\n';
  for (const auto& v : report.variables) {
    for (const auto* t : {&v.pooled, &v.welch}) {
      const TTestVariant variant = t == &v.pooled ? TTestVariant::kPooled : TTestVariant::kWelch;
      const bool reported = variant == v.reported_variant;
      csv::Row row{v.variable,
                   std::to_string(v.group1.n), num(v.group1.mean), num(v.group1.sd),
                   num(v.group1.sem), std::to_string(v.group2.n), num(v.group2.mean),
                   num(v.group2.sd), num(v.group2.sem),
                   v.levene ? num(v.levene->f) : "", v.levene ? num(v.levene->p) : "",
                   to_string(variant)};
      if (*t) {
        const TTestResult& r = **t;
        for (double x : {r.t, r.df, r.p_two_tailed, r.mean_difference, r.se_difference,
                         r.ci_low, r.ci_high}) {
          row.push_back(num(x));
        }
      } else {
        row.insert(row.end(), 7, "");
      }
      row.push_back(reported ? "true" : "false");
      row.push_back(reported && v.significant ? "true" : "false");
      row.push_back(reported && v.significant_05 ? "true" : "false");
      row.push_back(reported && v.significant_10 ? "true" : "false");
      std::string notes;
      for (const auto& n : v.notes) notes += (notes.empty() ? "" : "; ") + n;
      row.push_back(notes);
      out << csv::join(row) << '\n';
    }
  }
  return out.str();
}

std::string comparison_text(const GroupComparisonReport& report) {
  std::ostringstream out;
  out << "Group Statistics: Group 1 (" << report.group1_ids.size() << " cases); Group 2 ("
      << report.group2_ids.size() << " cases)\n\n";
  TextTable stats({"Variable", "Group", "N", "Mean", "Std. Deviation", "Std. Error Mean"});
  for (const auto& v : report.variables) {
    stats.add({v.variable, "1", std::to_string(v.group1.n), format3(v.group1.mean),
               format3(v.group1.sd), format3(v.group1.sem)});
    stats.add({"", "2", std::to_string(v.group2.n), format3(v.group2.mean),
               format3(v.group2.sd), format3(v.group2.sem)});
  }
  out << stats.render() << '\n';

  std::ostringstream ci;
  ci << 100.0 * report.config.ci_level;
  out << "Independent Samples Test (standardized over " << to_string(report.config.scope)
      << " cases; Levene centered on " << to_string(report.config.levene_center) << ")\n\n";
  TextTable tests({"Variable", "Variances", "F", "Sig.", "t", "df", "Sig. (2-tailed)",
                   "Mean Difference", "Std. Error Difference", "Lower", "Upper", "Reported",
                   "p<.05", "p<.10"});
  for (const auto& v : report.variables) {
    for (const auto* t : {&v.pooled, &v.welch}) {
      const bool pooled = t == &v.pooled;
      std::vector<std::string> row{pooled ? v.variable : "",
                                   pooled ? "equal assumed" : "not assumed"};
      if (pooled && v.levene) {
        row.push_back(format3(v.levene->f));
        row.push_back(format3(v.levene->p));
      } else {
        row.insert(row.end(), 2, "");
      }
      const bool reported =
          (pooled ? TTestVariant::kPooled : TTestVariant::kWelch) == v.reported_variant;
      if (*t) {
        const TTestResult& r = **t;
        for (double x : {r.t, r.df, r.p_two_tailed, r.mean_difference, r.se_difference,
                         r.ci_low, r.ci_high}) {
          row.push_back(format3(x));
        }
        row.push_back(reported ? "*" : "");
        row.push_back(reported && v.significant_05 ? "yes" : "");
        row.push_back(reported && v.significant_10 ? "yes" : "");
      } else {
        row.insert(row.end(), 7, "n/a");
      }
      tests.add(std::move(row));
    }
  }
  out << tests.render() << '\n';
  out << "Confidence interval: " << ci.str() << "%\n";
  out << "Levene alpha: " << format3(report.config.alpha_levene) << "; unequal variances in "
      << report.unequal_variance_count() << " of " << report.variables.size()
      << " variables\n";
  out << "Significance alpha: " << format3(report.config.alpha) << "; significant in "
      << report.significant_count() << " of " << report.variables.size() << " variables\n";
  for (const auto& v : report.variables) {
    for (const auto& n : v.notes) out << "Note (" << v.variable << "): " << n << '\n';
  }
  return out.str();
}

}  // namespace comindex
