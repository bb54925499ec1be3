#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "comindex/dataset.hpp"

namespace comindex {

struct GroupDescriptives {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;   // sample (n - 1)
  double sem = 0.0;  // sd / sqrt(n)
};

enum class LeveneCenter { kMean, kMedian };

struct LeveneResult {
  double f = 0.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
  double p = 1.0;
  LeveneCenter center = LeveneCenter::kMean;
};

enum class TTestVariant { kPooled, kWelch };

struct TTestResult {
  TTestVariant variant = TTestVariant::kPooled;
  double t = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  double mean_difference = 0.0;  // mean(g1) - mean(g2)
  double se_difference = 0.0;
  double level = 0.95;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Both groups constant with equal means: reported as t = 0, p = 1.
  bool degenerate = false;
};

GroupDescriptives group_descriptives(std::span<const double> values);

// One-way ANOVA on absolute deviations from each group's center.
// Throws NumericalError when every deviation equals its group mean
// deviation (within sum of squares zero), where F is undefined.
LeveneResult levene_test(std::span<const double> g1, std::span<const double> g2,
                         LeveneCenter center = LeveneCenter::kMean);

TTestResult t_test_pooled(std::span<const double> g1, std::span<const double> g2,
                          double level = 0.95);
TTestResult t_test_welch(std::span<const double> g1, std::span<const double> g2,
                         double level = 0.95);

inline bool is_significant(double p, double alpha) { return p < alpha; }

enum class StandardizeScope { kSelected, kAll };

struct ComparisonConfig {
  double alpha = 0.05;
  double alpha_levene = 0.05;
  double ci_level = 0.95;
  StandardizeScope scope = StandardizeScope::kSelected;
  LeveneCenter levene_center = LeveneCenter::kMean;

  friend bool operator==(const ComparisonConfig&, const ComparisonConfig&) = default;
};

struct VariableComparison {
  std::string variable;
  GroupDescriptives group1;  // raw units
  GroupDescriptives group2;
  std::optional<LeveneResult> levene;  // z-score units from here down
  std::optional<TTestResult> pooled;
  std::optional<TTestResult> welch;
  TTestVariant reported_variant = TTestVariant::kPooled;
  bool equal_variances = true;
  bool significant = false;
  bool significant_05 = false;
  bool significant_10 = false;
  std::vector<std::string> notes;  // degeneracies, one line each

  const TTestResult* reported() const {
    const auto& r = reported_variant == TTestVariant::kPooled ? pooled : welch;
    return r ? &*r : nullptr;
  }
};

struct GroupComparisonReport {
  ComparisonConfig config;
  std::vector<std::string> group1_ids;
  std::vector<std::string> group2_ids;
  std::vector<VariableComparison> variables;

  std::size_t unequal_variance_count() const;
  std::size_t significant_count() const;
};

GroupComparisonReport compare_groups(const IndicatorDataset& ds,
                                     std::span<const std::string> group1_ids,
                                     std::span<const std::string> group2_ids,
                                     std::span<const std::string> variables,
                                     const ComparisonConfig& config = {});

}  // namespace comindex
