#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "reserve_match/choice.hpp"
#include "reserve_match/market.hpp"

// Deliberately faulty rules and a manipulable mechanism. They exist so the
// property checkers and the manipulation search can be shown to fire; none
// of them is part of the real allocation path.
namespace reserve_match::planted {

// Fills reserve categories first, then admits to open seats only those
// remaining applicants who out-rank the weakest reserve winner. Violates
// the over-and-above principle (a top-merit reserve member sits on a
// reserve seat), substitutability (a weak arrival can lower the gate) and
// size monotonicity (a strong arrival can raise it).
inline ChoiceResult reserve_first_choose(const InstitutionSpec& inst,
                                         const std::set<std::string>& pool,
                                         const MembershipMap& memberships,
                                         const std::string& open_name = "open") {
  ChoiceResult result;
  for (const auto& [category, cap] : inst.capacity.reserved) {
    auto& chosen = result.chosen[category];
    const auto order = derive_category_merit(inst.merit, memberships, category);
    for (const auto& id : order.ranked) {
      if (static_cast<int>(chosen.size()) >= cap) break;
      if (pool.count(id)) chosen.insert(id);
    }
  }

  std::optional<std::string> gate;  // weakest reserve winner
  for (const auto& [category, ids] : result.chosen)
    for (const auto& id : ids)
      if (!gate || inst.merit.prefers(*gate, id)) gate = id;

  auto& open_chosen = result.chosen[open_name];
  const auto taken = result.chosen_union();
  const int open_cap = inst.capacity.open_capacity();
  for (const auto& id : inst.merit.ranked()) {
    if (static_cast<int>(open_chosen.size()) >= open_cap) break;
    if (!pool.count(id) || taken.count(id)) continue;
    if (gate && !inst.merit.prefers(id, *gate)) continue;
    open_chosen.insert(id);
  }

  const auto all = result.chosen_union();
  for (const auto& id : pool)
    if (!all.count(id)) result.rejected.insert(id);
  return result;
}

// Behaves like the over-and-above rule except that on odd-sized pools of
// three or more it drops the two weakest selections, so a single arrival
// can shrink the chosen set by one and a second arrival restores it.
inline ChoiceResult drop_two_choose(const InstitutionSpec& inst,
                                    const std::set<std::string>& pool,
                                    const MembershipMap& memberships,
                                    const std::string& open_name = "open") {
  ChoiceResult result = over_and_above_choose(inst, pool, memberships, open_name);
  if (pool.size() < 3 || pool.size() % 2 == 0) return result;
  for (int k = 0; k < 2; ++k) {
    std::optional<std::string> weakest_category;
    std::optional<std::string> weakest;
    for (const auto& [category, ids] : result.chosen) {
      for (const auto& id : ids) {
        if (!weakest || inst.merit.prefers(*weakest, id)) {
          weakest = id;
          weakest_category = category;
        }
      }
    }
    if (!weakest) break;
    result.chosen[*weakest_category].erase(*weakest);
    result.rejected.insert(*weakest);
  }
  return result;
}

inline ChoiceRule reserve_first_rule() {
  return [](const InstitutionSpec& inst, const std::set<std::string>& pool,
            const MembershipMap& memberships) {
    return reserve_first_choose(inst, pool, memberships);
  };
}

inline ChoiceRule drop_two_rule() {
  return [](const InstitutionSpec& inst, const std::set<std::string>& pool,
            const MembershipMap& memberships) {
    return drop_two_choose(inst, pool, memberships);
  };
}

// Immediate-acceptance (Boston-style) mechanism on top of the over-and-above
// rule: in round k every still-unassigned individual applies to the k-th
// institution on their list, and acceptances are final. Manipulable via
// preference misreporting, unlike deferred acceptance.
inline Assignment immediate_acceptance(const MarketInstance& instance,
                                       const std::string& open_name = "open") {
  const auto memberships = effective_memberships(instance);
  Assignment assignment;
  for (const auto& i : instance.individuals) assignment.by_individual[i.id] = std::nullopt;

  std::map<std::string, CapacityProfile> remaining;
  for (const auto& s : instance.institutions) remaining[s.id] = s.capacity;

  std::size_t depth = 0;
  for (const auto& [id, prefs] : instance.preferences) depth = std::max(depth, prefs.size());

  for (std::size_t round = 0; round < depth; ++round) {
    std::map<std::string, std::set<std::string>> proposals;
    for (const auto& i : instance.individuals) {
      if (assignment.by_individual[i.id]) continue;
      const auto& prefs = instance.preferences_of(i.id);
      if (round < prefs.size()) proposals[prefs[round]].insert(i.id);
    }
    for (const auto& [sid, pool] : proposals) {
      const auto* base = instance.find_institution(sid);
      if (!base) continue;
      InstitutionSpec scratch = *base;
      scratch.capacity = remaining[sid];
      const auto result = over_and_above_choose(scratch, pool, memberships, open_name);
      for (const auto& [category, ids] : result.chosen) {
        for (const auto& id : ids) {
          assignment.by_individual[id] = Seat{sid, category};
          if (category == open_name)
            remaining[sid].total -= 1;
          else {
            remaining[sid].total -= 1;
            remaining[sid].reserved[category] -= 1;
          }
        }
      }
    }
  }
  return assignment;
}

}  // namespace reserve_match::planted
