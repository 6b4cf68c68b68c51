// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Usage: acceptance_tests <path-to-reserve-match-cli> <fixture-dir>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "reserve_match/critique.hpp"
#include "reserve_match/da.hpp"
#include "reserve_match/instances.hpp"
#include "reserve_match/io.hpp"
#include "reserve_match/oracle.hpp"
#include "reserve_match/planted.hpp"

namespace rm = reserve_match;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli_path;
std::string g_fixture_dir;
bool g_all_pass = true;

struct Criterion {
  int number;
  std::string title;
  double budget_seconds;
};

void report(const Criterion& criterion, bool pass, double seconds, const std::string& note) {
  const bool in_budget = seconds < criterion.budget_seconds;
  const bool ok = pass && in_budget;
  g_all_pass = g_all_pass && ok;
  std::printf("%s  criterion %d: %s (%.2fs, budget %.0fs)%s%s\n", ok ? "PASS" : "FAIL",
              criterion.number, criterion.title.c_str(), seconds, criterion.budget_seconds,
              note.empty() ? "" : " -- ", note.c_str());
  std::fflush(stdout);
}

template <typename Body>
void run(const Criterion& criterion, Body body) {
  const auto start = Clock::now();
  std::string note;
  bool pass = false;
  try {
    pass = body(note);
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  report(criterion, pass, seconds, note);
}

std::set<std::string> everyone(const rm::MarketInstance& market) {
  std::set<std::string> pool;
  for (const auto& i : market.individuals) pool.insert(i.id);
  return pool;
}

bool passes_formal_triple(const rm::InstitutionSpec& s, const std::set<std::string>& pool,
                          const rm::MembershipMap& t, const rm::ChoiceResult& result) {
  return !rm::check_over_and_above_principle(s, pool, result) &&
         !rm::check_within_category_fairness(s, pool, t, result) &&
         !rm::check_quota_filling(s, pool, t, result);
}

bool passes_informal_triple(const rm::InstitutionSpec& s, const std::set<std::string>& pool,
                            const rm::MembershipMap& t, const rm::ChoiceResult& result) {
  return !rm::critique::check_inter_se_merit_as_stated(s, pool, t, result) &&
         !rm::critique::check_over_and_above_as_stated(s, pool, result) &&
         !rm::critique::check_filling_as_stated(s, pool, t, result);
}

// --------------------------------------------------------------------------

bool criterion1(std::string& note) {
  const auto market = rm::instances::example1();
  const auto& s = market.institutions.front();
  const auto t = rm::effective_memberships(market);
  const std::set<std::string> pool{"i", "j"};

  const auto rule = rm::over_and_above_choose(s, pool, t);
  const bool rule_exact = rule.chosen.at("open") == std::set<std::string>{"i"} &&
                          rule.chosen.at("SC") == std::set<std::string>{"j"} &&
                          rule.rejected.empty();

  const auto alt = rm::critique::alternative_choice_example1(pool);
  const bool alt_exact = alt.chosen.at("open") == std::set<std::string>{"j"} &&
                         alt.chosen.at("SC") == std::set<std::string>{"i"};
  const bool alt_informal = passes_informal_triple(s, pool, t, alt);
  const bool alt_fails_formal = rm::check_over_and_above_principle(s, pool, alt).has_value();

  if (!rule_exact) note = "rule output differs from (open {i}, SC {j})";
  if (!alt_informal) note = "swapped selection failed the informal triple";
  if (!alt_fails_formal) note = "swapped selection was not flagged formally";
  return rule_exact && alt_exact && alt_informal && alt_fails_formal;
}

bool criterion2(std::string& note) {
  const auto market = rm::instances::example2();
  const auto& s = market.institutions.front();
  const auto t = rm::effective_memberships(market);
  const std::set<std::string> pool{"i", "j"};

  const auto rule = rm::over_and_above_choose(s, pool, t);
  const bool rule_exact = rule.chosen.at("open") == std::set<std::string>{"i"} &&
                          rule.chosen.at("SC").empty() &&
                          rule.rejected == std::set<std::string>{"j"};
  const auto filling = rm::critique::check_filling_as_stated(s, pool, t, rule);
  const bool formal_ok = passes_formal_triple(s, pool, t, rule);

  if (!rule_exact) note = "rule output differs from (open {i}, SC {})";
  if (!filling) note = "informal filling violation not detected";
  if (!formal_ok) note = "formal axioms unexpectedly failed";
  return rule_exact && filling.has_value() && formal_ok;
}

bool criterion3(std::string& note) {
  const auto market = rm::instances::example3();
  const auto& s = market.institutions.front();
  const auto t = rm::effective_memberships(market);
  const std::set<std::string> pool{"i", "j", "k"};

  const auto alt = rm::critique::alternative_choice_example3(pool);
  const bool alt_exact = alt.chosen.at("open") == std::set<std::string>{"j"} &&
                         alt.chosen.at("SC") == std::set<std::string>{"k"} &&
                         alt.rejected == std::set<std::string>{"i"};
  const bool alt_informal = passes_informal_triple(s, pool, t, alt);
  const bool top_unassigned = alt.rejected.count("i") != 0;
  const bool flagged = rm::check_over_and_above_principle(s, pool, alt).has_value();

  if (!alt_exact) note = "alternative output differs from (open {j}, SC {k})";
  if (!alt_informal) note = "alternative failed the informal triple";
  if (!flagged) note = "formal audit did not flag the alternative";
  return alt_exact && alt_informal && top_unassigned && flagged;
}

bool criterion4(std::string& note) {
  rm::oracle::GenParams params;
  params.num_institutions = 1;
  params.num_individuals = 6;
  params.reserve_categories = {"SC", "ST", "OBC"};
  params.max_total_capacity = 4;
  params.declare_prob = 0.85;
  params.acceptability_prob = 0.9;

  long pools = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto market = rm::oracle::generate_instance(seed, params);
    const auto& s = market.institutions.front();
    const auto t = rm::effective_memberships(market);
    const auto ids = market.individual_ids();
    for (std::uint32_t mask = 0; mask < (1u << ids.size()); ++mask) {
      std::set<std::string> pool;
      for (std::size_t b = 0; b < ids.size(); ++b)
        if (mask & (1u << b)) pool.insert(ids[b]);
      const auto verdict = rm::oracle::verify_theorem1(s, pool, t);
      ++pools;
      if (!verdict.confirmed) {
        std::ostringstream oss;
        oss << "counterexample at seed " << seed << ": " << verdict.satisfying.size()
            << " axiom-satisfying selections";
        note = oss.str();
        return false;
      }
    }
  }
  note = std::to_string(pools) + " pools over 200 instances, all unique";
  return true;
}

bool criterion5(std::string& note) {
  rm::oracle::GenParams params;
  params.num_institutions = 1;
  params.num_individuals = 7;
  params.reserve_categories = {"SC", "ST"};
  params.max_total_capacity = 4;
  params.declare_prob = 0.85;
  params.acceptability_prob = 0.9;

  long planted_subst[2] = {0, 0};  // gate rule, drop-two rule
  long planted_mono[2] = {0, 0};
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto market = rm::oracle::generate_instance(seed, params);
    const auto& s = market.institutions.front();
    const auto t = rm::effective_memberships(market);
    const auto universe = everyone(market);

    if (rm::oracle::check_substitutability(s, universe, t)) {
      note = "substitutability witness against the real rule at seed " + std::to_string(seed);
      return false;
    }
    if (rm::oracle::check_size_monotonicity(s, universe, t)) {
      note = "size-monotonicity witness against the real rule at seed " + std::to_string(seed);
      return false;
    }

    const rm::ChoiceRule planted_rules[2] = {rm::planted::reserve_first_rule(),
                                             rm::planted::drop_two_rule()};
    for (int r = 0; r < 2; ++r) {
      if (rm::oracle::check_substitutability(s, universe, t, planted_rules[r]))
        ++planted_subst[r];
      if (rm::oracle::check_size_monotonicity(s, universe, t, planted_rules[r]))
        ++planted_mono[r];
    }
  }

  std::ostringstream oss;
  oss << "planted witnesses: gate-rule subst " << planted_subst[0] << ", mono " << planted_mono[0]
      << "; drop-two subst " << planted_subst[1] << ", mono " << planted_mono[1];
  note = oss.str();
  return planted_subst[0] > 0 && planted_subst[1] > 0 && planted_mono[0] > 0 &&
         planted_mono[1] > 0;
}

bool criterion6(std::string& note) {
  rm::oracle::GenParams params;
  params.num_institutions = 3;
  params.num_individuals = 5;
  params.reserve_categories = {"SC", "ST"};
  params.declare_prob = 0.85;
  params.acceptability_prob = 0.85;
  params.listing_prob = 0.85;

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto market = rm::oracle::generate_instance(seed, params);
    const auto assignment = rm::da_oa_assignment(market);
    const std::pair<const char*, std::optional<rm::Witness>> checks[] = {
        {"individual rationality", rm::is_individually_rational(market, assignment)},
        {"within-category fairness", rm::is_within_category_fair(market, assignment)},
        {"non-wastefulness", rm::is_non_wasteful(market, assignment)},
        {"over-and-above", rm::satisfies_over_and_above_assignment(market, assignment)},
        {"stability", rm::is_stable(market, assignment)},
    };
    for (const auto& [name, witness] : checks) {
      if (witness) {
        note = std::string(name) + " failed at seed " + std::to_string(seed) + ": " +
               witness->detail;
        return false;
      }
    }
  }
  note = "1000 predicate evaluations over 200 matchings, all pass";
  return true;
}

bool criterion7(std::string& note) {
  rm::oracle::GenParams params;
  params.num_institutions = 3;
  params.num_individuals = 5;
  params.reserve_categories = {"SC", "ST"};
  params.declare_prob = 0.8;
  params.acceptability_prob = 0.85;
  params.listing_prob = 0.85;

  long planted_witnesses = 0;
  const auto planted_mechanism = [](const rm::MarketInstance& m) {
    return rm::planted::immediate_acceptance(m);
  };
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto market = rm::oracle::generate_instance(seed, params);
    if (const auto w = rm::oracle::manipulation_search(market)) {
      note = "profitable deviation against deferred acceptance at seed " + std::to_string(seed) +
             " for '" + w->deviation.individual + "'";
      return false;
    }
    if (rm::oracle::manipulation_search(market, planted_mechanism)) ++planted_witnesses;
  }
  note = "no deviation beats deferred acceptance; immediate acceptance manipulated on " +
         std::to_string(planted_witnesses) + "/100 instances";
  return planted_witnesses >= 1;
}

std::string run_cli(const std::string& args, const std::string& sink) {
  const std::string command = g_cli_path + " " + args + " > " + sink + " 2>/dev/null";
  if (std::system(command.c_str()) == -1) return {};
  return rm::io::read_file(sink);
}

bool criterion8(std::string& note) {
  // Library-level determinism.
  const auto report_a = rm::io::repro_report_to_json(rm::critique::repro_report()).dump(2);
  const auto report_b = rm::io::repro_report_to_json(rm::critique::repro_report()).dump(2);
  if (report_a != report_b) {
    note = "reproduction report differs between runs";
    return false;
  }
  rm::oracle::GenParams params;
  params.num_individuals = 6;
  if (rm::io::serialize_instance(rm::oracle::generate_instance(42, params)) !=
      rm::io::serialize_instance(rm::oracle::generate_instance(42, params))) {
    note = "generated instance differs for the same seed";
    return false;
  }

  if (g_cli_path.empty()) {
    note = "no CLI path supplied";
    return false;
  }
  const std::string base = "/tmp/reserve_match_determinism_";
  const struct {
    std::string args;
    std::string name;
  } invocations[] = {
      {"oracle --random 42 20 --check all --json", "oracle"},
      {"match " + g_fixture_dir + "/da-3ind.json --logs --json", "match"},
      {"repro --json", "repro"},
  };
  for (const auto& [args, name] : invocations) {
    const auto first = run_cli(args, base + name + "_1.json");
    const auto second = run_cli(args, base + name + "_2.json");
    if (first.empty() || first != second) {
      note = "CLI '" + name + "' output differs across identical runs";
      return false;
    }
  }
  note = "library reports and three CLI invocations byte-identical across reruns";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];
  if (argc > 2) g_fixture_dir = argv[2];
  if (g_fixture_dir.empty()) g_fixture_dir = "fixtures";

  run({1, "first example market: swapped selection passes informal axioms, fails formal", 1.0},
      criterion1);
  run({2, "second example market: rule violates informal filling, passes formal axioms", 1.0},
      criterion2);
  run({3, "third example market: informal axioms admit skipping the top-merit applicant", 1.0},
      criterion3);
  run({4, "axioms pin down the rule uniquely on every pool of 200 seeded markets", 60.0},
      criterion4);
  run({5, "substitutability and size monotonicity: clean rule passes, planted rules caught",
       60.0},
      criterion5);
  run({6, "mechanism output passes the full axiom battery on 200 seeded markets", 30.0},
      criterion6);
  run({7, "no profitable deviation against deferred acceptance; immediate acceptance caught",
       300.0},
      criterion7);
  run({8, "identical seeds and files produce byte-identical reports", 60.0}, criterion8);

  std::printf("%s\n", g_all_pass ? "ACCEPTANCE: all criteria pass" : "ACCEPTANCE: FAILURES");
  return g_all_pass ? 0 : 1;
}
