#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reserve_match/choice.hpp"
#include "reserve_match/market.hpp"

namespace reserve_match {

// One institution's view of one round: the proposal pool it evaluated, who
// it kept, who it turned away.
struct InstitutionRound {
  std::set<std::string> pool;
  std::set<std::string> held;
  std::set<std::string> rejected;
};

struct RoundLog {
  int round = 0;
  std::map<std::string, InstitutionRound> institutions;
};

struct DaOutcome {
  Assignment assignment;
  std::vector<RoundLog> rounds;
};

// Applicant-proposing deferred acceptance where every institution evaluates
// its proposal pool with the over-and-above choice rule. Individuals walk
// down their preference list, proposing to each institution at most once;
// the run ends on the first round with no rejections. Seat categories are
// read off the terminal choice at each institution (a tentatively held
// individual may move between categories across rounds).
inline DaOutcome run_da_oa(const MarketInstance& instance,
                           const std::string& open_name = "open") {
  const auto memberships = effective_memberships(instance);

  std::map<std::string, std::size_t> next_choice;  // index into preference list
  std::map<std::string, bool> held;
  for (const auto& i : instance.individuals) {
    next_choice[i.id] = 0;
    held[i.id] = false;
  }
  std::map<std::string, std::set<std::string>> held_at;
  std::map<std::string, ChoiceResult> last_choice;

  DaOutcome out;
  while (true) {
    std::map<std::string, std::set<std::string>> proposals;
    for (const auto& i : instance.individuals) {
      if (held[i.id]) continue;
      const auto& prefs = instance.preferences_of(i.id);
      if (next_choice[i.id] < prefs.size()) proposals[prefs[next_choice[i.id]]].insert(i.id);
    }
    if (proposals.empty()) break;

    RoundLog log;
    log.round = static_cast<int>(out.rounds.size()) + 1;
    for (const auto& s : instance.institutions) {
      std::set<std::string> pool = held_at[s.id];
      if (auto it = proposals.find(s.id); it != proposals.end())
        pool.insert(it->second.begin(), it->second.end());

      auto result = over_and_above_choose(s, pool, memberships, open_name);
      const auto kept = result.chosen_union();
      for (const auto& id : result.rejected) {
        held[id] = false;
        ++next_choice[id];  // never propose to a rejecting institution again
      }
      for (const auto& id : kept) held[id] = true;
      held_at[s.id] = kept;
      last_choice[s.id] = result;
      log.institutions[s.id] = {pool, kept, result.rejected};
    }
    out.rounds.push_back(std::move(log));
  }

  for (const auto& i : instance.individuals) out.assignment.by_individual[i.id] = std::nullopt;
  for (const auto& [sid, result] : last_choice)
    for (const auto& [category, ids] : result.chosen)
      for (const auto& id : ids) out.assignment.by_individual[id] = Seat{sid, category};
  return out;
}

inline Assignment da_oa_assignment(const MarketInstance& instance) {
  return run_da_oa(instance).assignment;
}

// ---------------------------------------------------------------------------
// Assignment-level axioms
// ---------------------------------------------------------------------------

namespace detail {

// Rank of an institution in an individual's list; unlisted ranks below
// everything, including being unassigned.
inline std::size_t preference_rank(const std::vector<std::string>& prefs,
                                   const std::optional<std::string>& institution) {
  if (!institution) return prefs.size();
  for (std::size_t k = 0; k < prefs.size(); ++k)
    if (prefs[k] == *institution) return k;
  return prefs.size() + 1;
}

// Institutions an individual strictly prefers to their current seat.
inline std::vector<std::string> preferred_to_match(const MarketInstance& instance,
                                                   const Assignment& a, const std::string& id) {
  const auto& prefs = instance.preferences_of(id);
  auto seat = a.seat_of(id);
  std::optional<std::string> matched;
  if (seat) matched = seat->institution;
  const auto limit = preference_rank(prefs, matched);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < prefs.size() && k < limit; ++k) out.push_back(prefs[k]);
  return out;
}

}  // namespace detail

// Nobody may hold a seat at an institution missing from their list.
inline std::optional<Witness> is_individually_rational(const MarketInstance& instance,
                                                       const Assignment& a) {
  for (const auto& [id, seat] : a.by_individual) {
    if (!seat) continue;
    const auto& prefs = instance.preferences_of(id);
    if (std::find(prefs.begin(), prefs.end(), seat->institution) == prefs.end())
      return Witness{"individual_rationality",
                     {id},
                     "'" + id + "' is assigned to '" + seat->institution +
                         "' which is not on their preference list"};
  }
  return std::nullopt;
}

// Anyone envying a seat must be out-ranked by every open-seat holder there,
// and by every holder of their own reserve category.
inline std::optional<Witness> is_within_category_fair(const MarketInstance& instance,
                                                      const Assignment& a,
                                                      const std::string& open_name = "open") {
  const auto memberships = effective_memberships(instance);
  const auto by_inst = a.by_institution();
  for (const auto& i : instance.individuals) {
    const auto& category = memberships.at(i.id);
    for (const auto& sid : detail::preferred_to_match(instance, a, i.id)) {
      auto it = by_inst.find(sid);
      if (it == by_inst.end()) continue;
      const auto* inst = instance.find_institution(sid);
      for (const auto& [holder, held_category] : it->second) {
        const bool relevant =
            held_category == open_name ||
            (category != kGeneralCategory && held_category == category);
        if (relevant && !inst->merit.prefers(holder, i.id))
          return Witness{"within_category_fairness",
                         {i.id, sid, holder},
                         "'" + i.id + "' prefers '" + sid + "' where '" + holder +
                             "' holds a '" + held_category + "' seat without out-ranking them"};
      }
    }
  }
  return std::nullopt;
}

// Every seat an envying individual is eligible for must be taken.
inline std::optional<Witness> is_non_wasteful(const MarketInstance& instance, const Assignment& a,
                                              const std::string& open_name = "open") {
  const auto memberships = effective_memberships(instance);
  const auto by_inst = a.by_institution();
  for (const auto& i : instance.individuals) {
    const auto& category = memberships.at(i.id);
    for (const auto& sid : detail::preferred_to_match(instance, a, i.id)) {
      const auto* inst = instance.find_institution(sid);
      if (!inst->merit.acceptable(i.id)) continue;  // eligible for nothing there
      int open_used = 0, reserve_used = 0;
      if (auto it = by_inst.find(sid); it != by_inst.end()) {
        for (const auto& [holder, held_category] : it->second) {
          if (held_category == open_name) ++open_used;
          if (category != kGeneralCategory && held_category == category) ++reserve_used;
        }
      }
      if (open_used < inst->capacity.open_capacity())
        return Witness{"non_wastefulness",
                       {i.id, sid},
                       "'" + i.id + "' prefers '" + sid + "' which leaves an open position empty"};
      if (category != kGeneralCategory &&
          reserve_used < inst->capacity.capacity_of(category, open_name))
        return Witness{"non_wastefulness",
                       {i.id, sid},
                       "'" + i.id + "' prefers '" + sid + "' which leaves a '" + category +
                           "' position empty"};
    }
  }
  return std::nullopt;
}

// At each institution, every open-seat holder must out-rank every
// reserve-seat holder.
inline std::optional<Witness> satisfies_over_and_above_assignment(
    const MarketInstance& instance, const Assignment& a, const std::string& open_name = "open") {
  for (const auto& [sid, seats] : a.by_institution()) {
    const auto* inst = instance.find_institution(sid);
    if (!inst) continue;
    for (const auto& [open_holder, c1] : seats) {
      if (c1 != open_name) continue;
      for (const auto& [reserve_holder, c2] : seats) {
        if (c2 == open_name) continue;
        if (!inst->merit.prefers(open_holder, reserve_holder))
          return Witness{"over_and_above_principle",
                         {sid, reserve_holder, open_holder},
                         "at '" + sid + "', '" + reserve_holder + "' holds a '" + c2 +
                             "' seat while out-ranking open-seat holder '" + open_holder + "'"};
      }
    }
  }
  return std::nullopt;
}

// Stability of the induced matching with respect to the over-and-above
// choice profile: individual rationality, every matched set is a fixed
// point of the institution's choice, and no individual both prefers an
// institution and would be chosen there alongside its current matches.
inline std::optional<Witness> is_stable(const MarketInstance& instance, const Assignment& a,
                                        const std::string& open_name = "open") {
  if (auto w = is_individually_rational(instance, a)) {
    w->code = "stability_condition_1";
    return w;
  }
  const auto memberships = effective_memberships(instance);
  for (const auto& s : instance.institutions) {
    const auto matched = a.held_at(s.id);
    const auto again = over_and_above_choose(s, matched, memberships, open_name).chosen_union();
    if (again != matched)
      return Witness{"stability_condition_2",
                     {s.id},
                     "'" + s.id + "' would not re-choose its own matched set"};
  }
  for (const auto& i : instance.individuals) {
    for (const auto& sid : detail::preferred_to_match(instance, a, i.id)) {
      const auto* inst = instance.find_institution(sid);
      auto pool = a.held_at(sid);
      pool.insert(i.id);
      if (over_and_above_choose(*inst, pool, memberships, open_name).is_chosen(i.id))
        return Witness{"stability_condition_3",
                       {i.id, sid},
                       "'" + i.id + "' prefers '" + sid + "' and would be chosen there"};
    }
  }
  return std::nullopt;
}

}  // namespace reserve_match
