#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "reserve_match/choice.hpp"
#include "reserve_match/da.hpp"
#include "reserve_match/market.hpp"

namespace reserve_match::oracle {

// Enumeration guards are hard errors: a silently truncated oracle would be
// worse than none.
struct Guards {
  int max_pool = 10;               // feasible-selection enumeration
  int max_universe = 10;           // subset sweeps
  int max_manip_institutions = 4;  // deviation space is factorial in |S|
  int max_manip_individuals = 6;
};

// ---------------------------------------------------------------------------
// Feasible selections and the choice-rule characterization oracle
// ---------------------------------------------------------------------------

// Walks every capacity- and eligibility-respecting selection of the pool
// exactly once: each applicant is either rejected, placed on an open seat
// (acceptable applicants only), or placed in their own reserve category.
inline void enumerate_feasible_selections(const InstitutionSpec& inst,
                                          const std::set<std::string>& pool,
                                          const MembershipMap& memberships,
                                          const std::function<void(const ChoiceResult&)>& visit,
                                          const Guards& guards = {},
                                          const std::string& open_name = "open") {
  if (static_cast<int>(pool.size()) > guards.max_pool)
    throw Error(ErrorCode::PoolTooLarge, "pool of " + std::to_string(pool.size()) +
                                             " exceeds the enumeration guard of " +
                                             std::to_string(guards.max_pool));

  const std::vector<std::string> ids(pool.begin(), pool.end());
  // Options per applicant: "" = rejected, otherwise a category key.
  std::vector<std::vector<std::string>> options(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    options[k].push_back("");
    if (inst.merit.acceptable(ids[k])) {
      options[k].push_back(open_name);
      auto it = memberships.find(ids[k]);
      if (it != memberships.end() && it->second != kGeneralCategory &&
          inst.capacity.reserved.count(it->second))
        options[k].push_back(it->second);
    }
  }

  std::map<std::string, int> used;
  std::vector<std::string> picked(ids.size());
  std::function<void(std::size_t)> walk = [&](std::size_t k) {
    if (k == ids.size()) {
      ChoiceResult result;
      result.chosen[open_name];
      for (const auto& [category, cap] : inst.capacity.reserved) result.chosen[category];
      for (std::size_t j = 0; j < ids.size(); ++j) {
        if (picked[j].empty())
          result.rejected.insert(ids[j]);
        else
          result.chosen[picked[j]].insert(ids[j]);
      }
      visit(result);
      return;
    }
    for (const auto& option : options[k]) {
      if (!option.empty()) {
        const int cap = inst.capacity.capacity_of(option, open_name);
        if (used[option] >= cap) continue;
        ++used[option];
      }
      picked[k] = option;
      walk(k + 1);
      if (!option.empty()) --used[option];
    }
  };
  walk(0);
}

inline std::vector<ChoiceResult> feasible_selections(const InstitutionSpec& inst,
                                                     const std::set<std::string>& pool,
                                                     const MembershipMap& memberships,
                                                     const Guards& guards = {},
                                                     const std::string& open_name = "open") {
  std::vector<ChoiceResult> out;
  enumerate_feasible_selections(
      inst, pool, memberships, [&](const ChoiceResult& r) { out.push_back(r); }, guards,
      open_name);
  return out;
}

// Exhaustive check that the three choice axioms pin down exactly one
// selection of this pool, and that it is the rule's own output.
struct CharacterizationReport {
  bool confirmed = false;
  ChoiceResult rule_output;
  std::vector<ChoiceResult> satisfying;  // every axiom-satisfying selection
};

inline CharacterizationReport verify_theorem1(const InstitutionSpec& inst,
                                              const std::set<std::string>& pool,
                                              const MembershipMap& memberships,
                                              const Guards& guards = {},
                                              const std::string& open_name = "open") {
  CharacterizationReport report;
  report.rule_output = over_and_above_choose(inst, pool, memberships, open_name);
  enumerate_feasible_selections(
      inst, pool, memberships,
      [&](const ChoiceResult& candidate) {
        if (check_over_and_above_principle(inst, pool, candidate, open_name)) return;
        if (check_within_category_fairness(inst, pool, memberships, candidate)) return;
        if (check_quota_filling(inst, pool, memberships, candidate)) return;
        report.satisfying.push_back(candidate);
      },
      guards, open_name);
  report.confirmed =
      report.satisfying.size() == 1 && report.satisfying.front() == report.rule_output;
  return report;
}

// ---------------------------------------------------------------------------
// Substitutability and size monotonicity by subset enumeration
// ---------------------------------------------------------------------------

struct SubstitutabilityWitness {
  std::set<std::string> base_pool;  // A
  std::string rejected;             // i, rejected from A+i yet chosen from A+i+j
  std::string added;                // j
};

struct SizeMonotonicityWitness {
  std::set<std::string> base_pool;  // A
  std::string added;                // i
  std::size_t before = 0;           // |C(A)|
  std::size_t after = 0;            // |C(A+i)|
};

namespace detail {

// Chosen sets for every subset of the universe, as bitmasks.
inline std::vector<std::uint32_t> chosen_mask_table(const InstitutionSpec& inst,
                                                    const std::vector<std::string>& universe,
                                                    const MembershipMap& memberships,
                                                    const ChoiceRule& rule) {
  const std::size_t n = universe.size();
  std::vector<std::uint32_t> table(std::size_t{1} << n, 0);
  for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
    std::set<std::string> pool;
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (1u << b)) pool.insert(universe[b]);
    const auto chosen = rule(inst, pool, memberships).chosen_union();
    std::uint32_t out = 0;
    for (std::size_t b = 0; b < n; ++b)
      if (chosen.count(universe[b])) out |= 1u << b;
    table[mask] = out;
  }
  return table;
}

inline std::set<std::string> unmask(const std::vector<std::string>& universe,
                                    std::uint32_t mask) {
  std::set<std::string> out;
  for (std::size_t b = 0; b < universe.size(); ++b)
    if (mask & (1u << b)) out.insert(universe[b]);
  return out;
}

inline void check_universe_guard(const std::set<std::string>& universe, const Guards& guards) {
  if (static_cast<int>(universe.size()) > guards.max_universe)
    throw Error(ErrorCode::UniverseTooLarge,
                "universe of " + std::to_string(universe.size()) +
                    " exceeds the subset-sweep guard of " + std::to_string(guards.max_universe));
}

}  // namespace detail

// An applicant rejected from a pool must stay rejected when the pool grows:
// for all A and i, j outside A, i not chosen from A+i implies i not chosen
// from A+i+j.
inline std::optional<SubstitutabilityWitness> check_substitutability(
    const InstitutionSpec& inst, const std::set<std::string>& universe,
    const MembershipMap& memberships, const ChoiceRule& rule = over_and_above_rule(),
    const Guards& guards = {}) {
  detail::check_universe_guard(universe, guards);
  const std::vector<std::string> ids(universe.begin(), universe.end());
  const std::size_t n = ids.size();
  const auto chosen = detail::chosen_mask_table(inst, ids, memberships, rule);

  for (std::uint32_t with_i = 0; with_i < chosen.size(); ++with_i) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t i_bit = 1u << i;
      if (!(with_i & i_bit) || (chosen[with_i] & i_bit)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t j_bit = 1u << j;
        if (with_i & j_bit) continue;
        if (chosen[with_i | j_bit] & i_bit)
          return SubstitutabilityWitness{detail::unmask(ids, with_i & ~i_bit), ids[i], ids[j]};
      }
    }
  }
  return std::nullopt;
}

// Adding an applicant never shrinks the number chosen.
inline std::optional<SizeMonotonicityWitness> check_size_monotonicity(
    const InstitutionSpec& inst, const std::set<std::string>& universe,
    const MembershipMap& memberships, const ChoiceRule& rule = over_and_above_rule(),
    const Guards& guards = {}) {
  detail::check_universe_guard(universe, guards);
  const std::vector<std::string> ids(universe.begin(), universe.end());
  const std::size_t n = ids.size();
  const auto chosen = detail::chosen_mask_table(inst, ids, memberships, rule);

  for (std::uint32_t base = 0; base < chosen.size(); ++base) {
    const auto before = static_cast<std::size_t>(__builtin_popcount(chosen[base]));
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t i_bit = 1u << i;
      if (base & i_bit) continue;
      const auto after = static_cast<std::size_t>(__builtin_popcount(chosen[base | i_bit]));
      if (after < before)
        return SizeMonotonicityWitness{detail::unmask(ids, base), ids[i], before, after};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Incentive-compatibility search
// ---------------------------------------------------------------------------

// A unilateral report: any ordering of any subset of institutions, plus the
// declaration flag. Reserve membership can be declared truthfully or hidden;
// claiming a category one does not belong to is outside the model.
struct Deviation {
  std::string individual;
  std::vector<std::string> preferences;
  bool declare_membership = false;
};

struct ManipulationWitness {
  Deviation deviation;
  std::optional<std::string> truthful_match;
  std::string improved_match;
};

using Mechanism = std::function<Assignment(const MarketInstance&)>;

inline Mechanism da_oa_mechanism() {
  return [](const MarketInstance& instance) { return da_oa_assignment(instance); };
}

namespace detail {

// Every ordering of every subset, in a fixed canonical order: by length,
// then lexicographically by institution index sequence.
inline std::vector<std::vector<std::string>> all_preference_reports(
    const std::vector<std::string>& institutions) {
  std::vector<std::vector<std::string>> out{{}};
  const std::size_t m = institutions.size();
  std::vector<std::vector<std::vector<std::size_t>>> by_length(m + 1);
  by_length[0].push_back({});
  for (std::size_t len = 1; len <= m; ++len) {
    for (const auto& shorter : by_length[len - 1]) {
      for (std::size_t next = 0; next < m; ++next) {
        if (std::find(shorter.begin(), shorter.end(), next) != shorter.end()) continue;
        auto seq = shorter;
        seq.push_back(next);
        by_length[len].push_back(seq);
      }
    }
  }
  for (std::size_t len = 1; len <= m; ++len) {
    std::sort(by_length[len].begin(), by_length[len].end());
    for (const auto& seq : by_length[len]) {
      std::vector<std::string> report;
      for (auto idx : seq) report.push_back(institutions[idx]);
      out.push_back(std::move(report));
    }
  }
  return out;
}

}  // namespace detail

// Tests truth-telling against every unilateral deviation of every
// individual, joint preference-and-membership deviations included. The
// benchmark for each individual is the instance with that individual's own
// report made truthful (stated preferences, membership declared); other
// reports stay as given. Outcomes are compared under the individual's true
// preferences. The first witness in canonical order is returned.
inline std::optional<ManipulationWitness> manipulation_search(
    const MarketInstance& instance, const Mechanism& mechanism = da_oa_mechanism(),
    const Guards& guards = {}) {
  if (static_cast<int>(instance.institutions.size()) > guards.max_manip_institutions ||
      static_cast<int>(instance.individuals.size()) > guards.max_manip_individuals)
    throw Error(ErrorCode::InstanceTooLarge,
                "manipulation search is limited to " +
                    std::to_string(guards.max_manip_institutions) + " institutions and " +
                    std::to_string(guards.max_manip_individuals) + " individuals");

  std::vector<std::string> institution_ids;
  for (const auto& s : instance.institutions) institution_ids.push_back(s.id);
  const auto reports = detail::all_preference_reports(institution_ids);

  for (std::size_t k = 0; k < instance.individuals.size(); ++k) {
    const auto& person = instance.individuals[k];
    const auto& true_prefs = instance.preferences_of(person.id);
    const bool is_reserve_member = person.true_category != kGeneralCategory;

    MarketInstance truthful = instance;
    truthful.individuals[k].declared = is_reserve_member;
    const auto base_seat = mechanism(truthful).seat_of(person.id);
    std::optional<std::string> base_match;
    if (base_seat) base_match = base_seat->institution;
    const auto base_rank = reserve_match::detail::preference_rank(true_prefs, base_match);

    std::vector<bool> declarations = is_reserve_member ? std::vector<bool>{true, false}
                                                       : std::vector<bool>{false};
    for (bool declare : declarations) {
      for (const auto& report : reports) {
        if (declare == truthful.individuals[k].declared && report == true_prefs) continue;
        MarketInstance deviated = instance;
        deviated.individuals[k].declared = declare;
        deviated.preferences[person.id] = report;
        const auto seat = mechanism(deviated).seat_of(person.id);
        if (!seat) continue;
        if (reserve_match::detail::preference_rank(true_prefs, seat->institution) < base_rank)
          return ManipulationWitness{Deviation{person.id, report, declare}, base_match,
                                     seat->institution};
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Seeded instance generator
// ---------------------------------------------------------------------------

struct GenParams {
  int num_institutions = 2;
  int num_individuals = 5;
  // Reserve-category preset; the default is the Indian vertical set.
  std::vector<std::string> reserve_categories = {"SC", "ST", "OBC", "EWS"};
  int min_total_capacity = 1;
  int max_total_capacity = 4;
  // Probability an individual belongs to some reserve category (membership
  // is then uniform across the preset).
  double reserve_member_prob = 0.6;
  // Optional explicit weights keyed by reserve name or "GC"; when non-empty
  // these replace reserve_member_prob. Missing keys weigh zero.
  std::map<std::string, double> membership_weights;
  double declare_prob = 1.0;        // chance a reserve member reports it
  double acceptability_prob = 0.9;  // chance an institution lists an individual
  double listing_prob = 0.9;        // chance an individual lists an institution
};

namespace detail {

// Bounded sampling on top of the raw engine keeps generated instances
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) {
    return n == 0 ? 0 : static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[below(k)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

// Deterministic in the seed. The sampled instance always validates.
inline MarketInstance generate_instance(std::uint64_t seed, const GenParams& params = {}) {
  if (params.num_institutions < 0 || params.num_individuals < 0 ||
      params.min_total_capacity < 0 || params.max_total_capacity < params.min_total_capacity ||
      params.reserve_member_prob < 0 || params.reserve_member_prob > 1 ||
      params.declare_prob < 0 || params.declare_prob > 1 ||
      params.acceptability_prob < 0 || params.acceptability_prob > 1 ||
      params.listing_prob < 0 || params.listing_prob > 1 ||
      (params.reserve_categories.empty() && params.reserve_member_prob > 0 &&
       params.membership_weights.empty()))
    throw Error(ErrorCode::BadParams, "generator parameters out of range");
  double weight_sum = 0;
  for (const auto& [category, weight] : params.membership_weights) {
    if (weight < 0 || (category != kGeneralCategory &&
                       std::find(params.reserve_categories.begin(),
                                 params.reserve_categories.end(),
                                 category) == params.reserve_categories.end()))
      throw Error(ErrorCode::BadParams, "bad membership weight for '" + category + "'");
    weight_sum += weight;
  }
  if (!params.membership_weights.empty() && weight_sum <= 0)
    throw Error(ErrorCode::BadParams, "membership weights must have positive mass");

  detail::Rng rng(seed);
  MarketInstance instance;
  instance.categories.push_back({"open", CategoryKind::open});
  for (const auto& r : params.reserve_categories)
    instance.categories.push_back({r, CategoryKind::reserve});

  for (int k = 0; k < params.num_individuals; ++k) {
    Individual person;
    person.id = "i" + std::to_string(k + 1);
    if (params.membership_weights.empty()) {
      if (rng.unit() < params.reserve_member_prob)
        person.true_category =
            params.reserve_categories[rng.below(params.reserve_categories.size())];
    } else {
      double pick = rng.unit() * weight_sum;
      for (const auto& [category, weight] : params.membership_weights) {
        pick -= weight;
        if (pick < 0) {
          person.true_category = category;
          break;
        }
      }
    }
    if (person.true_category != kGeneralCategory)
      person.declared = rng.unit() < params.declare_prob;
    instance.individuals.push_back(person);
  }

  const auto all_ids = instance.individual_ids();
  for (int k = 0; k < params.num_institutions; ++k) {
    InstitutionSpec inst;
    inst.id = "s" + std::to_string(k + 1);
    const int span = params.max_total_capacity - params.min_total_capacity + 1;
    inst.capacity.total =
        params.min_total_capacity + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));

    std::vector<std::string> reserve_order = params.reserve_categories;
    rng.shuffle(reserve_order);
    int budget = inst.capacity.total;
    for (const auto& r : reserve_order) {
      const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(budget) + 1));
      if (q > 0) inst.capacity.reserved[r] = q;
      budget -= q;
    }

    std::vector<std::string> listed;
    for (const auto& id : all_ids)
      if (rng.unit() < params.acceptability_prob) listed.push_back(id);
    rng.shuffle(listed);
    inst.merit = MeritOrder(listed);
    instance.institutions.push_back(std::move(inst));
  }

  for (const auto& id : all_ids) {
    std::vector<std::string> listed;
    for (const auto& s : instance.institutions)
      if (rng.unit() < params.listing_prob) listed.push_back(s.id);
    rng.shuffle(listed);
    instance.preferences[id] = listed;
  }
  return instance;
}

}  // namespace reserve_match::oracle
