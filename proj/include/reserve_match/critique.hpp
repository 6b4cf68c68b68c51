#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reserve_match/choice.hpp"
#include "reserve_match/instances.hpp"
#include "reserve_match/market.hpp"
#include "reserve_match/oracle.hpp"

// The reservation principles are often quoted informally: inter-se merit,
// reserve positions granted "over and above" open ones, and all positions
// filled subject to eligibility. Read literally, that wording does not pin
// down a unique choice rule. This module implements the informal reading
// verbatim, two alternative rules it fails to exclude, and a report that
// demonstrates the gap on three two-seat markets.
namespace reserve_match::critique {

// Informal inter-se merit: within a category, a position for the
// lower-merit member implies one for the higher. Identical to the formal
// within-category fairness predicate; kept under its quoted name.
inline std::optional<Witness> check_inter_se_merit_as_stated(
    const InstitutionSpec& inst, const std::set<std::string>& pool,
    const MembershipMap& memberships, const ChoiceResult& result) {
  return check_within_category_fairness(inst, pool, memberships, result);
}

// Informal over-and-above reading: category selections are pairwise
// disjoint and reserve capacities are untouched by open-seat awards. Note
// what it does NOT require: open seats going to the higher-merit side.
inline std::optional<Witness> check_over_and_above_as_stated(
    const InstitutionSpec& inst, const std::set<std::string>& /*pool*/,
    const ChoiceResult& result) {
  std::map<std::string, std::string> seen;
  for (const auto& [category, ids] : result.chosen) {
    for (const auto& id : ids) {
      auto [it, inserted] = seen.emplace(id, category);
      if (!inserted)
        return Witness{"over_and_above_as_stated",
                       {id},
                       "'" + id + "' is selected in both '" + it->second + "' and '" + category +
                           "'"};
    }
  }
  for (const auto& [category, cap] : inst.capacity.reserved) {
    auto it = result.chosen.find(category);
    const int filled = it == result.chosen.end() ? 0 : static_cast<int>(it->second.size());
    if (filled > cap)
      return Witness{"over_and_above_as_stated",
                     {category},
                     "category '" + category + "' holds " + std::to_string(filled) +
                         " selections against a reservation of " + std::to_string(cap)};
  }
  return std::nullopt;
}

inline std::size_t positions_filled(const ChoiceResult& result) {
  std::size_t filled = 0;
  for (const auto& [category, ids] : result.chosen) filled += ids.size();
  return filled;
}

// Informal filling requirement: no alternative selection compatible with
// the two informal principles above may fill strictly more positions.
inline std::optional<Witness> check_filling_as_stated(
    const InstitutionSpec& inst, const std::set<std::string>& pool,
    const MembershipMap& memberships, const ChoiceResult& result,
    const oracle::Guards& guards = {}, const std::string& open_name = "open") {
  const std::size_t filled = positions_filled(result);
  std::optional<Witness> witness;
  oracle::enumerate_feasible_selections(
      inst, pool, memberships,
      [&](const ChoiceResult& candidate) {
        if (witness) return;
        if (positions_filled(candidate) <= filled) return;
        if (check_inter_se_merit_as_stated(inst, pool, memberships, candidate)) return;
        if (check_over_and_above_as_stated(inst, pool, candidate)) return;
        witness = Witness{"filling_as_stated",
                          {},
                          "a selection compatible with the other two informal principles fills " +
                              std::to_string(positions_filled(candidate)) + " positions, not " +
                              std::to_string(filled)};
      },
      guards, open_name);
  return witness;
}

// Count of selections passing the informal triple; the non-uniqueness this
// exposes is the whole point of the module.
inline std::vector<ChoiceResult> as_stated_compliant_selections(
    const InstitutionSpec& inst, const std::set<std::string>& pool,
    const MembershipMap& memberships, const oracle::Guards& guards = {},
    const std::string& open_name = "open") {
  std::vector<ChoiceResult> out;
  oracle::enumerate_feasible_selections(
      inst, pool, memberships,
      [&](const ChoiceResult& candidate) {
        if (check_inter_se_merit_as_stated(inst, pool, memberships, candidate)) return;
        if (check_over_and_above_as_stated(inst, pool, candidate)) return;
        if (check_filling_as_stated(inst, pool, memberships, candidate, guards, open_name)) return;
        out.push_back(candidate);
      },
      guards, open_name);
  return out;
}

// Alternative rule on the first example market: swaps the open and reserve
// winners on the full pool, and behaves like the real rule elsewhere.
// Compatible with the informal triple, so the informal wording cannot be a
// characterization.
inline ChoiceResult alternative_choice_example1(const std::set<std::string>& pool) {
  const auto market = instances::example1();
  if (pool == std::set<std::string>{"i", "j"}) {
    ChoiceResult result;
    result.chosen["open"] = {"j"};
    result.chosen["SC"] = {"i"};
    return result;
  }
  return over_and_above_choose(market.institutions.front(), pool,
                               effective_memberships(market));
}

// Alternative rule on the third example market: fills both seats from the
// reserve category's members and leaves the top-merit individual out.
inline ChoiceResult alternative_choice_example3(const std::set<std::string>& pool) {
  const auto market = instances::example3();
  if (pool == std::set<std::string>{"i", "j", "k"}) {
    ChoiceResult result;
    result.chosen["open"] = {"j"};
    result.chosen["SC"] = {"k"};
    result.rejected = {"i"};
    return result;
  }
  return over_and_above_choose(market.institutions.front(), pool,
                               effective_memberships(market));
}

// ---------------------------------------------------------------------------
// Reproduction report
// ---------------------------------------------------------------------------

struct ReproCheck {
  std::string name;
  std::string statement;
  bool holds = false;
  std::string evidence;
};

struct ReproReport {
  std::vector<ReproCheck> checks;
  // Computed rather than asserted: how badly uniqueness fails informally,
  // and that it holds formally.
  std::size_t informal_compliant_example1 = 0;
  std::size_t informal_compliant_example2 = 0;
  std::size_t informal_compliant_example3 = 0;
  std::size_t formal_compliant_example1 = 0;
  std::size_t formal_compliant_example2 = 0;
  std::size_t formal_compliant_example3 = 0;
  std::vector<std::string> example2_informal_violations;  // which informal axioms break

  bool all_hold() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return true;
  }
};

inline ReproReport repro_report() {
  ReproReport report;

  const auto m1 = instances::example1();
  const auto m2 = instances::example2();
  const auto m3 = instances::example3();
  const auto& s1 = m1.institutions.front();
  const auto& s2 = m2.institutions.front();
  const auto& s3 = m3.institutions.front();
  const auto t1 = effective_memberships(m1);
  const auto t2 = effective_memberships(m2);
  const auto t3 = effective_memberships(m3);
  const std::set<std::string> pool1{"i", "j"};
  const std::set<std::string> pool2{"i", "j"};
  const std::set<std::string> pool3{"i", "j", "k"};

  const auto rule1 = over_and_above_choose(s1, pool1, t1);
  const auto rule2 = over_and_above_choose(s2, pool2, t2);
  const auto rule3 = over_and_above_choose(s3, pool3, t3);
  const auto alt1 = alternative_choice_example1(pool1);
  const auto alt3 = alternative_choice_example3(pool3);

  {
    const bool informal_ok = !check_inter_se_merit_as_stated(s1, pool1, t1, alt1) &&
                             !check_over_and_above_as_stated(s1, pool1, alt1) &&
                             !check_filling_as_stated(s1, pool1, t1, alt1);
    const bool differs = !(alt1 == rule1);
    report.checks.push_back(
        {"alternative_passes_informal_triple",
         "on the first market the swapped selection satisfies all three informal principles "
         "yet differs from the over-and-above choice",
         informal_ok && differs,
         informal_ok ? "swapped selection passes; open seat goes to the lower-merit member"
                     : "swapped selection failed an informal principle"});
  }
  {
    const auto filling = check_filling_as_stated(s2, pool2, t2, rule2);
    const bool formal_ok = !check_over_and_above_principle(s2, pool2, rule2) &&
                           !check_within_category_fairness(s2, pool2, t2, rule2) &&
                           !check_quota_filling(s2, pool2, t2, rule2);
    report.checks.push_back(
        {"rule_fails_informal_filling",
         "on the second market the over-and-above choice violates the informal filling "
         "principle while satisfying all three formal axioms",
         filling.has_value() && formal_ok,
         filling ? filling->detail : "no filling violation found"});
  }
  {
    const bool informal_ok = !check_inter_se_merit_as_stated(s3, pool3, t3, alt3) &&
                             !check_over_and_above_as_stated(s3, pool3, alt3) &&
                             !check_filling_as_stated(s3, pool3, t3, alt3);
    const bool skips_top = alt3.rejected.count("i") != 0;
    report.checks.push_back(
        {"informal_triple_admits_skipping_top_merit",
         "on the third market a selection satisfying the informal triple leaves the "
         "highest-merit individual unassigned",
         informal_ok && skips_top,
         "both seats go to reserve-category members; 'i' is left out"});
  }
  {
    auto passes_formal = [](const InstitutionSpec& s, const std::set<std::string>& pool,
                            const MembershipMap& t, const ChoiceResult& r) {
      return !check_over_and_above_principle(s, pool, r) &&
             !check_within_category_fairness(s, pool, t, r) &&
             !check_quota_filling(s, pool, t, r);
    };
    report.checks.push_back({"rule_passes_formal_axioms",
                             "the over-and-above choice satisfies the three formal axioms on "
                             "all three markets",
                             passes_formal(s1, pool1, t1, rule1) &&
                                 passes_formal(s2, pool2, t2, rule2) &&
                                 passes_formal(s3, pool3, t3, rule3),
                             "open-first selection audited on each market"});
  }
  {
    const auto w1 = check_over_and_above_principle(s1, pool1, alt1);
    const auto w3 = check_over_and_above_principle(s3, pool3, alt3);
    report.checks.push_back(
        {"formal_axioms_flag_alternatives",
         "the formal axioms reject both alternative selections (each violates the "
         "over-and-above principle)",
         w1.has_value() && w3.has_value(),
         (w1 ? w1->detail : std::string("first alternative passed")) + "; " +
             (w3 ? w3->detail : std::string("third alternative passed"))});
  }

  report.informal_compliant_example1 = as_stated_compliant_selections(s1, pool1, t1).size();
  report.informal_compliant_example2 = as_stated_compliant_selections(s2, pool2, t2).size();
  report.informal_compliant_example3 = as_stated_compliant_selections(s3, pool3, t3).size();
  report.formal_compliant_example1 = oracle::verify_theorem1(s1, pool1, t1).satisfying.size();
  report.formal_compliant_example2 = oracle::verify_theorem1(s2, pool2, t2).satisfying.size();
  report.formal_compliant_example3 = oracle::verify_theorem1(s3, pool3, t3).satisfying.size();

  if (check_inter_se_merit_as_stated(s2, pool2, t2, rule2))
    report.example2_informal_violations.push_back("inter_se_merit");
  if (check_over_and_above_as_stated(s2, pool2, rule2))
    report.example2_informal_violations.push_back("over_and_above_as_stated");
  if (check_filling_as_stated(s2, pool2, t2, rule2))
    report.example2_informal_violations.push_back("filling_as_stated");

  return report;
}

}  // namespace reserve_match::critique
