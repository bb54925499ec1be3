#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "comindex/factors.hpp"

namespace comindex {

enum class Direction { kAscending, kDescending };

// A factor picked by 0-based column index or by factor name ("F1").
using FactorSelector = std::variant<std::size_t, std::string>;

struct RankEntry {
  std::size_t rank = 0;  // 1-based
  std::string case_id;
  double score = 0.0;
};

struct RankedIndex {
  std::size_t factor = 0;
  std::string factor_name;
  Direction direction = Direction::kAscending;
  std::vector<RankEntry> entries;  // in rank order
  std::size_t group_size = 0;      // 0 until groups are selected
  std::vector<std::string> group1_ids;
  std::vector<std::string> group2_ids;
};

struct GroupSelection {
  std::vector<std::string> group1_ids;  // ranks 1..k
  std::vector<std::string> group2_ids;  // ranks n-k+1..n
};

// Orders cases by one factor's score. Ties are broken by case id
// ascending, so the result does not depend on input row order.
RankedIndex rank_by_factor(const FactorScores& scores, const FactorSelector& factor,
                           Direction direction);

GroupSelection select_groups(const RankedIndex& ranked, std::size_t k);

// rank_by_factor followed by select_groups, with the groups stored.
RankedIndex rank_and_group(const FactorScores& scores, const FactorSelector& factor,
                           Direction direction, std::size_t k);

}  // namespace comindex
