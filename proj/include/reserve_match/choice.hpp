#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reserve_match/market.hpp"

namespace reserve_match {

// Merit order restricted to one reserve category: exactly the acceptable
// individuals whose effective membership is that category, in merit order.
struct CategoryMeritOrder {
  std::string category;
  std::vector<std::string> ranked;
};

inline CategoryMeritOrder derive_category_merit(const MeritOrder& merit,
                                                const MembershipMap& memberships,
                                                const std::string& reserve) {
  if (reserve == kGeneralCategory)
    throw Error(ErrorCode::UnknownCategory, "'" + reserve + "' is not a reserve category");
  CategoryMeritOrder out{reserve, {}};
  for (const auto& id : merit.ranked()) {
    auto it = memberships.find(id);
    if (it != memberships.end() && it->second == reserve) out.ranked.push_back(id);
  }
  return out;
}

// Rank of an acceptable individual within a pool: one more than the number
// of pool members the institution ranks above them.
inline int rank_in_set(const MeritOrder& merit, const std::set<std::string>& pool,
                       const std::string& id) {
  if (!pool.count(id)) throw Error(ErrorCode::NotInPool, "'" + id + "' is not in the pool");
  auto p = merit.position(id);
  if (!p) throw Error(ErrorCode::Unacceptable, "'" + id + "' is unacceptable here");
  int above = 0;
  for (const auto& other : pool) {
    auto q = merit.position(other);
    if (q && *q < *p) ++above;
  }
  return above + 1;
}

// The over-and-above choice rule. Open positions are filled first, straight
// down the merit order; each reserve category then fills from the remaining
// members of that category. Unacceptable applicants never consume capacity.
inline ChoiceResult over_and_above_choose(const InstitutionSpec& inst,
                                          const std::set<std::string>& pool,
                                          const MembershipMap& memberships,
                                          const std::string& open_name = "open") {
  ChoiceResult result;
  auto& open_chosen = result.chosen[open_name];

  const int open_cap = inst.capacity.open_capacity();
  for (const auto& id : inst.merit.ranked()) {
    if (static_cast<int>(open_chosen.size()) >= open_cap) break;
    if (pool.count(id)) open_chosen.insert(id);
  }

  std::set<std::string> remainder;
  for (const auto& id : pool)
    if (!open_chosen.count(id)) remainder.insert(id);

  // Reserve categories are independent (eligible sets are disjoint); the
  // alphabetical pass only fixes the log order.
  for (const auto& [category, cap] : inst.capacity.reserved) {
    auto& chosen = result.chosen[category];
    const auto order = derive_category_merit(inst.merit, memberships, category);
    for (const auto& id : order.ranked) {
      if (static_cast<int>(chosen.size()) >= cap) break;
      if (remainder.count(id)) chosen.insert(id);
    }
  }

  const auto taken = result.chosen_union();
  for (const auto& id : pool)
    if (!taken.count(id)) result.rejected.insert(id);
  return result;
}

// Signature shared by the real rule and the planted foils, so the property
// checkers can be pointed at either.
using ChoiceRule = std::function<ChoiceResult(
    const InstitutionSpec&, const std::set<std::string>&, const MembershipMap&)>;

inline ChoiceRule over_and_above_rule() {
  return [](const InstitutionSpec& inst, const std::set<std::string>& pool,
            const MembershipMap& memberships) {
    return over_and_above_choose(inst, pool, memberships);
  };
}

// ---------------------------------------------------------------------------
// Choice-level axioms
// ---------------------------------------------------------------------------

struct Witness {
  std::string code;                   // which requirement broke
  std::vector<std::string> subjects;  // ids the violation is about
  std::string detail;
};

// Every acceptable pool member ranked within the open capacity must hold an
// open position.
inline std::optional<Witness> check_over_and_above_principle(
    const InstitutionSpec& inst, const std::set<std::string>& pool, const ChoiceResult& result,
    const std::string& open_name = "open") {
  const int open_cap = inst.capacity.open_capacity();
  auto it = result.chosen.find(open_name);
  static const std::set<std::string> empty;
  const auto& open_chosen = it == result.chosen.end() ? empty : it->second;
  for (const auto& id : inst.merit.ranked()) {
    if (!pool.count(id)) continue;
    if (rank_in_set(inst.merit, pool, id) > open_cap) break;
    if (!open_chosen.count(id))
      return Witness{"over_and_above_principle",
                     {id},
                     "'" + id + "' ranks within the open capacity of '" + inst.id +
                         "' but holds no open position"};
  }
  return std::nullopt;
}

// No individual may be passed over while a lower-merit member of the same
// effective category is assigned.
inline std::optional<Witness> check_within_category_fairness(
    const InstitutionSpec& inst, const std::set<std::string>& /*pool*/,
    const MembershipMap& memberships, const ChoiceResult& result) {
  auto category_of = [&](const std::string& id) -> const std::string& {
    auto it = memberships.find(id);
    static const std::string gc = kGeneralCategory;
    return it == memberships.end() ? gc : it->second;
  };
  for (const auto& skipped : result.rejected) {
    for (const auto& [cat, ids] : result.chosen) {
      for (const auto& taken : ids) {
        if (category_of(taken) == category_of(skipped) &&
            inst.merit.prefers(skipped, taken))
          return Witness{"within_category_fairness",
                         {skipped, taken},
                         "'" + skipped + "' out-ranks '" + taken + "' in category '" +
                             category_of(taken) + "' yet is left unassigned"};
      }
    }
  }
  return std::nullopt;
}

// A reserve category may leave an eligible member unassigned only when every
// one of its positions is filled.
inline std::optional<Witness> check_quota_filling(const InstitutionSpec& inst,
                                                  const std::set<std::string>& /*pool*/,
                                                  const MembershipMap& memberships,
                                                  const ChoiceResult& result) {
  for (const auto& [category, cap] : inst.capacity.reserved) {
    int filled = 0;
    if (auto it = result.chosen.find(category); it != result.chosen.end())
      filled = static_cast<int>(it->second.size());
    if (filled == cap) continue;
    for (const auto& id : result.rejected) {
      auto mt = memberships.find(id);
      if (mt != memberships.end() && mt->second == category && inst.merit.acceptable(id))
        return Witness{"quota_filling",
                       {id},
                       "category '" + category + "' fills " + std::to_string(filled) + " of " +
                           std::to_string(cap) + " positions while eligible '" + id +
                           "' is unassigned"};
    }
  }
  return std::nullopt;
}

}  // namespace reserve_match
