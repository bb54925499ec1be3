#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "comindex/factors.hpp"
#include "comindex/inference.hpp"
#include "comindex/ranking.hpp"

namespace comindex {

std::string to_string(Direction d);
std::string to_string(TTestVariant v);
std::string to_string(LeveneCenter c);
std::string to_string(StandardizeScope s);
std::string to_string(RotationMethod m);

// Fixed three-decimal rendering used by every text table; never "-0.000".
std::string format3(double v);

// The `count` variables with the largest |rotated loading| on `factor`,
// strongest first.
std::vector<std::pair<std::string, double>> marker_variables(const FactorModel& model,
                                                             std::size_t factor,
                                                             std::size_t count = 3);

// JSON documents carry full precision; CSV files use shortest round-trip
// decimals; text tables print three decimals.
std::string factor_model_json(const FactorModel& model);
// Variables as rows, factors as columns, plus communality.
std::string factor_loadings_csv(const FactorModel& model);
std::string factor_eigenvalues_csv(const FactorModel& model);
std::string factor_coefficients_csv(const FactorModel& model);
std::string factor_scores_csv(const FactorScores& scores);
// Rotated loadings with variables grouped by their dominant factor.
std::string factor_model_text(const FactorModel& model);

std::string ranking_json(const RankedIndex& ranked,
                         const std::vector<std::pair<std::string, double>>& markers);
std::string ranking_csv(const RankedIndex& ranked);
// "Rank | Case" listing of both extreme groups.
std::string ranking_text(const RankedIndex& ranked,
                         const std::vector<std::pair<std::string, double>>& markers);

std::string comparison_json(const GroupComparisonReport& report);
std::string comparison_csv(const GroupComparisonReport& report);
// Group statistics table followed by the Levene + t-test table.
std::string comparison_text(const GroupComparisonReport& report);

}  // namespace comindex
