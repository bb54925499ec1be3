#include "comindex/ranking.hpp"

#include <algorithm>
#include <numeric>

#include "comindex/error.hpp"

namespace comindex {
namespace {

std::size_t resolve(const FactorScores& scores, const FactorSelector& selector) {
  const std::size_t k = scores.scores.cols();
  if (const auto* index = std::get_if<std::size_t>(&selector)) {
    if (*index >= k) {
      throw ValidationError("unknown factor index " + std::to_string(*index + 1) +
                            " (model has " + std::to_string(k) + " factors)");
    }
    return *index;
  }
  const auto& name = std::get<std::string>(selector);
  auto it = std::find(scores.factor_names.begin(), scores.factor_names.end(), name);
  if (it == scores.factor_names.end()) {
    throw ValidationError("unknown factor '" + name + "'");
  }
  return static_cast<std::size_t>(it - scores.factor_names.begin());
}

}  // namespace

RankedIndex rank_by_factor(const FactorScores& scores, const FactorSelector& factor,
                           Direction direction) {
  const std::size_t column = resolve(scores, factor);
  const std::size_t n = scores.case_ids.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ids = scores.case_ids;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores.scores(a, column);
    const double sb = scores.scores(b, column);
    if (sa != sb) return direction == Direction::kAscending ? sa < sb : sa > sb;
    return ids[a] < ids[b];
  });

  RankedIndex out;
  out.factor = column;
  out.factor_name = scores.factor_names.at(column);
  out.direction = direction;
  out.entries.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    out.entries.push_back({r + 1, ids[order[r]], scores.scores(order[r], column)});
  }
  return out;
}

GroupSelection select_groups(const RankedIndex& ranked, std::size_t k) {
  const std::size_t n = ranked.entries.size();
  if (k < 1 || k > n / 2) {
    throw ValidationError("group size k=" + std::to_string(k) +
                          " is out of range: need 1 <= k <= floor(n/2) = " +
                          std::to_string(n / 2) + " for n=" + std::to_string(n));
  }
  GroupSelection out;
  for (std::size_t r = 0; r < k; ++r) out.group1_ids.push_back(ranked.entries[r].case_id);
  for (std::size_t r = n - k; r < n; ++r) out.group2_ids.push_back(ranked.entries[r].case_id);
  return out;
}

RankedIndex rank_and_group(const FactorScores& scores, const FactorSelector& factor,
                           Direction direction, std::size_t k) {
  RankedIndex out = rank_by_factor(scores, factor, direction);
  GroupSelection groups = select_groups(out, k);
  out.group_size = k;
  out.group1_ids = std::move(groups.group1_ids);
  out.group2_ids = std::move(groups.group2_ids);
  return out;
}

}  // namespace comindex
