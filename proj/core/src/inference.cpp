#include "comindex/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "comindex/error.hpp"
#include "comindex/numkernel.hpp"

namespace comindex {
namespace {

constexpr double kMinScopeStdDev = 1e-12;

struct Moments {
  double n;
  double mean;
  double var;  // sample
};

Moments moments(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {static_cast<double>(v.size()), mean, ss / static_cast<double>(v.size() - 1)};
}

void require_sizes(std::span<const double> g1, std::span<const double> g2, const char* op) {
  if (g1.size() < 2 || g2.size() < 2) {
    throw ValidationError(std::string(op) + ": each group needs at least 2 values");
  }
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    std::ostringstream msg;
    msg << "confidence level must lie in (0, 1), got " << level;
    throw ValidationError(msg.str());
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

TTestResult finish(TTestVariant variant, double diff, double se, double df, double level) {
  TTestResult out;
  out.variant = variant;
  out.mean_difference = diff;
  out.se_difference = se;
  out.df = df;
  out.level = level;
  if (se == 0.0) {
    if (diff != 0.0) {
      throw NumericalError("t statistic undefined: both groups are constant with different means");
    }
    out.degenerate = true;
    out.t = 0.0;
    out.p_two_tailed = 1.0;
    out.ci_low = out.ci_high = diff;
    return out;
  }
  out.t = diff / se;
  out.p_two_tailed = t_two_tailed_p(out.t, df);
  const double q = t_quantile(0.5 * (1.0 + level), df);
  out.ci_low = diff - q * se;
  out.ci_high = diff + q * se;
  return out;
}

std::vector<std::size_t> resolve_ids(const IndicatorDataset& ds,
                                     std::span<const std::string> ids, const char* which) {
  std::vector<std::size_t> rows;
  for (const auto& id : ids) {
    auto idx = ds.case_index(id);
    if (!idx) {
      throw ValidationError(std::string("unknown case id in ") + which + ": '" + id +
                            "' (did you mean '" + nearest_match(id, ds.case_ids()) + "'?)");
    }
    rows.push_back(*idx);
  }
  return rows;
}

}  // namespace

GroupDescriptives group_descriptives(std::span<const double> values) {
  if (values.size() < 2) {
    throw ValidationError("group_descriptives: need at least 2 values, got " +
                          std::to_string(values.size()));
  }
  const Moments m = moments(values);
  GroupDescriptives out;
  out.n = values.size();
  out.mean = m.mean;
  out.sd = std::sqrt(m.var);
  out.sem = out.sd / std::sqrt(m.n);
  return out;
}

LeveneResult levene_test(std::span<const double> g1, std::span<const double> g2,
                         LeveneCenter center) {
  require_sizes(g1, g2, "levene_test");
  auto deviations = [&](std::span<const double> g) {
    const double c = center == LeveneCenter::kMean
                         ? moments(g).mean
                         : median(std::vector<double>(g.begin(), g.end()));
    std::vector<double> d;
    for (double x : g) d.push_back(std::abs(x - c));
    return d;
  };
  const std::vector<double> d1 = deviations(g1);
  const std::vector<double> d2 = deviations(g2);
  const double n1 = static_cast<double>(d1.size());
  const double n2 = static_cast<double>(d2.size());
  const double m1 = moments(d1).mean;
  const double m2 = moments(d2).mean;
  const double grand = (n1 * m1 + n2 * m2) / (n1 + n2);

  double within = 0.0;
  double scale = 0.0;
  for (double d : d1) {
    within += (d - m1) * (d - m1);
    scale += d * d;
  }
  for (double d : d2) {
    within += (d - m2) * (d - m2);
    scale += d * d;
  }
  if (within <= std::numeric_limits<double>::epsilon() * scale) {
    throw NumericalError("Levene F undefined: deviations are constant within both groups");
  }
  const double between = n1 * (m1 - grand) * (m1 - grand) + n2 * (m2 - grand) * (m2 - grand);

  LeveneResult out;
  out.center = center;
  out.df1 = 1;
  out.df2 = d1.size() + d2.size() - 2;
  out.f = (between / 1.0) / (within / static_cast<double>(out.df2));
  out.p = f_tail_p(out.f, 1.0, static_cast<double>(out.df2));
  return out;
}

TTestResult t_test_pooled(std::span<const double> g1, std::span<const double> g2,
                          double level) {
  require_sizes(g1, g2, "t_test_pooled");
  require_level(level);
  const Moments a = moments(g1);
  const Moments b = moments(g2);
  const double df = a.n + b.n - 2.0;
  const double pooled = ((a.n - 1.0) * a.var + (b.n - 1.0) * b.var) / df;
  const double se = std::sqrt(pooled) * std::sqrt(1.0 / a.n + 1.0 / b.n);
  return finish(TTestVariant::kPooled, a.mean - b.mean, se, df, level);
}

TTestResult t_test_welch(std::span<const double> g1, std::span<const double> g2,
                         double level) {
  require_sizes(g1, g2, "t_test_welch");
  require_level(level);
  const Moments a = moments(g1);
  const Moments b = moments(g2);
  const double va = a.var / a.n;
  const double vb = b.var / b.n;
  const double se2 = va + vb;
  const double denom = va * va / (a.n - 1.0) + vb * vb / (b.n - 1.0);
  const double df = denom > 0.0 ? se2 * se2 / denom : a.n + b.n - 2.0;
  return finish(TTestVariant::kWelch, a.mean - b.mean, std::sqrt(se2), df, level);
}

std::size_t GroupComparisonReport::unequal_variance_count() const {
  return static_cast<std::size_t>(std::count_if(
      variables.begin(), variables.end(), [](const auto& v) { return !v.equal_variances; }));
}

std::size_t GroupComparisonReport::significant_count() const {
  return static_cast<std::size_t>(std::count_if(
      variables.begin(), variables.end(), [](const auto& v) { return v.significant; }));
}

GroupComparisonReport compare_groups(const IndicatorDataset& ds,
                                     std::span<const std::string> group1_ids,
                                     std::span<const std::string> group2_ids,
                                     std::span<const std::string> variables,
                                     const ComparisonConfig& config) {
  for (double a : {config.alpha, config.alpha_levene}) {
    if (!(a > 0.0 && a < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  }
  require_level(config.ci_level);
  if (group1_ids.size() < 2 || group2_ids.size() < 2) {
    throw ValidationError("each comparison group needs at least 2 cases");
  }
  const std::vector<std::size_t> rows1 = resolve_ids(ds, group1_ids, "group 1");
  const std::vector<std::size_t> rows2 = resolve_ids(ds, group2_ids, "group 2");
  {
    std::set<std::size_t> seen;
    for (auto rows : {&rows1, &rows2}) {
      for (std::size_t r : *rows) {
        if (!seen.insert(r).second) {
          throw ValidationError("case '" + ds.case_ids()[r] +
                                "' appears more than once across the groups");
        }
      }
    }
  }
  std::vector<std::size_t> columns;
  for (const auto& name : variables) {
    auto idx = ds.variable_index(name);
    if (!idx) {
      throw ValidationError("unknown variable '" + name + "' (did you mean '" +
                            nearest_match(name, ds.indicator_names()) + "'?)");
    }
    columns.push_back(*idx);
  }

  std::vector<std::size_t> scope_rows;
  if (config.scope == StandardizeScope::kSelected) {
    scope_rows = rows1;
    scope_rows.insert(scope_rows.end(), rows2.begin(), rows2.end());
  } else {
    for (std::size_t i = 0; i < ds.n_cases(); ++i) scope_rows.push_back(i);
  }

  GroupComparisonReport report;
  report.config = config;
  report.group1_ids.assign(group1_ids.begin(), group1_ids.end());
  report.group2_ids.assign(group2_ids.begin(), group2_ids.end());

  for (std::size_t v = 0; v < columns.size(); ++v) {
    const std::size_t col = columns[v];
    VariableComparison rec;
    rec.variable = ds.indicator_names()[col];
    const std::vector<double> raw1 = ds.column(col, rows1);
    const std::vector<double> raw2 = ds.column(col, rows2);
    rec.group1 = group_descriptives(raw1);
    rec.group2 = group_descriptives(raw2);

    const Moments scope = moments(ds.column(col, scope_rows));
    const double sd = std::sqrt(scope.var);
    if (!(sd > kMinScopeStdDev)) {
      rec.notes.push_back("zero variance within standardization scope");
      report.variables.push_back(std::move(rec));
      continue;
    }
    auto to_z = [&](std::vector<double> x) {
      for (double& e : x) e = (e - scope.mean) / sd;
      return x;
    };
    const std::vector<double> z1 = to_z(raw1);
    const std::vector<double> z2 = to_z(raw2);

    try {
      rec.levene = levene_test(z1, z2, config.levene_center);
    } catch (const NumericalError& e) {
      rec.notes.push_back(e.what());
    }
    try {
      rec.pooled = t_test_pooled(z1, z2, config.ci_level);
      rec.welch = t_test_welch(z1, z2, config.ci_level);
      if (rec.pooled->degenerate) {
        rec.notes.push_back("both groups constant with equal means; t = 0, p = 1");
      }
    } catch (const NumericalError& e) {
      rec.pooled.reset();
      rec.welch.reset();
      rec.notes.push_back(e.what());
    }

    rec.equal_variances = !rec.levene || rec.levene->p > config.alpha_levene;
    rec.reported_variant = rec.equal_variances ? TTestVariant::kPooled : TTestVariant::kWelch;
    if (const TTestResult* t = rec.reported()) {
      rec.significant = is_significant(t->p_two_tailed, config.alpha);
      rec.significant_05 = is_significant(t->p_two_tailed, 0.05);
      rec.significant_10 = is_significant(t->p_two_tailed, 0.10);
    }
    report.variables.push_back(std::move(rec));
  }
  return report;
}

}  // namespace comindex
