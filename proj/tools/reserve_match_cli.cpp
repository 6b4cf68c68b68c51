// Command-line surface for the reservation-market library: evaluate one
// institution's choice, run the matching mechanism, audit assignments,
// drive the brute-force property checks, and print the characterization-gap
// report. Every command accepts --json for machine-readable output.
//
// Exit codes: 0 success / all checks pass, 1 an audit or property check
// failed, 2 bad input or an enumeration guard refused to run.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reserve_match/critique.hpp"
#include "reserve_match/da.hpp"
#include "reserve_match/instances.hpp"
#include "reserve_match/io.hpp"
#include "reserve_match/oracle.hpp"
#include "reserve_match/planted.hpp"

namespace rm = reserve_match;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

rm::oracle::Guards guards_from_env() {
  rm::oracle::Guards guards;
  auto read = [](const char* name, int fallback) {
    const char* value = std::getenv(name);
    return value ? std::atoi(value) : fallback;
  };
  guards.max_pool = read("RESERVE_MATCH_MAX_POOL", guards.max_pool);
  guards.max_universe = read("RESERVE_MATCH_MAX_UNIVERSE", guards.max_universe);
  guards.max_manip_institutions =
      read("RESERVE_MATCH_MAX_MANIP_INSTITUTIONS", guards.max_manip_institutions);
  guards.max_manip_individuals =
      read("RESERVE_MATCH_MAX_MANIP_INDIVIDUALS", guards.max_manip_individuals);
  return guards;
}

rm::MarketInstance load_validated(const std::string& path) {
  auto instance = rm::io::load_instance(path);
  const auto errors = rm::validate_instance(instance);
  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) {
      if (!joined.empty()) joined += "; ";
      joined += std::string(rm::error_code_name(e.code)) + ": " + e.message;
    }
    throw rm::Error(errors.front().code, joined);
  }
  return instance;
}

std::string open_name_of(const rm::MarketInstance& instance) {
  const auto* open = instance.open_category();
  return open ? open->name : "open";
}

void print_ids(std::ostream& out, const std::set<std::string>& ids) {
  out << "[";
  bool first = true;
  for (const auto& id : ids) {
    if (!first) out << " ";
    out << id;
    first = false;
  }
  out << "]";
}

// ---------------------------------------------------------------------------
// choose
// ---------------------------------------------------------------------------

int cmd_choose(const std::string& instance_path, const std::string& institution_id,
               const std::optional<std::string>& pool_path, bool all, bool as_json) {
  const auto instance = load_validated(instance_path);
  const auto* institution = instance.find_institution(institution_id);
  if (!institution)
    throw rm::Error(rm::ErrorCode::DanglingReference,
                    "no institution '" + institution_id + "' in the instance");

  std::set<std::string> pool;
  if (all) {
    for (const auto& i : instance.individuals) pool.insert(i.id);
  } else {
    const auto doc = json::parse(rm::io::read_file(*pool_path), nullptr, false);
    if (doc.is_discarded() || !doc.is_array())
      throw rm::Error(rm::ErrorCode::ParseError, "pool file must be a JSON array of ids");
    for (const auto& entry : doc) {
      const auto id = entry.get<std::string>();
      if (!instance.find_individual(id))
        throw rm::Error(rm::ErrorCode::DanglingReference,
                        "pool names unknown individual '" + id + "'");
      pool.insert(id);
    }
  }

  const auto open_name = open_name_of(instance);
  const auto memberships = rm::effective_memberships(instance);
  const auto result = rm::over_and_above_choose(*institution, pool, memberships, open_name);

  struct Audit {
    std::string name;
    std::optional<rm::Witness> witness;
  };
  const std::vector<Audit> audits{
      {"over_and_above_principle",
       rm::check_over_and_above_principle(*institution, pool, result, open_name)},
      {"within_category_fairness",
       rm::check_within_category_fairness(*institution, pool, memberships, result)},
      {"quota_filling", rm::check_quota_filling(*institution, pool, memberships, result)},
  };
  bool all_pass = true;
  for (const auto& a : audits) all_pass = all_pass && !a.witness;

  if (as_json) {
    json audit = json::array();
    for (const auto& a : audits)
      audit.push_back({{"axiom", a.name},
                       {"pass", !a.witness},
                       {"witness", rm::io::witness_to_json(a.witness)}});
    std::cout << json{{"audit", audit},
                      {"institution", institution_id},
                      {"result", rm::io::choice_result_to_json(result)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "choice at " << institution_id << ":\n";
    for (const auto& [category, ids] : result.chosen) {
      std::cout << "  " << category << " ";
      print_ids(std::cout, ids);
      std::cout << "\n";
    }
    std::cout << "  rejected ";
    print_ids(std::cout, result.rejected);
    std::cout << "\naxioms:\n";
    for (const auto& a : audits)
      std::cout << "  " << (a.witness ? "FAIL" : "pass") << " " << a.name
                << (a.witness ? "  (" + a.witness->detail + ")" : "") << "\n";
  }
  return all_pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// match
// ---------------------------------------------------------------------------

int cmd_match(const std::string& instance_path, bool with_logs, bool as_json) {
  const auto instance = load_validated(instance_path);
  const auto outcome = rm::run_da_oa(instance, open_name_of(instance));

  if (as_json) {
    json doc = rm::io::assignment_to_json(outcome.assignment);
    if (with_logs) doc["rounds"] = rm::io::round_logs_to_json(outcome.rounds);
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& [id, seat] : outcome.assignment.by_individual) {
      if (seat)
        std::cout << id << " -> " << seat->institution << " [" << seat->category << "]\n";
      else
        std::cout << id << " -> unassigned\n";
    }
    if (with_logs) {
      for (const auto& round : outcome.rounds) {
        std::cout << "round " << round.round << ":\n";
        for (const auto& [sid, entry] : round.institutions) {
          std::cout << "  " << sid << " pool ";
          print_ids(std::cout, entry.pool);
          std::cout << " held ";
          print_ids(std::cout, entry.held);
          std::cout << " rejected ";
          print_ids(std::cout, entry.rejected);
          std::cout << "\n";
        }
      }
    }
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

int cmd_audit(const std::string& instance_path, const std::string& assignment_path,
              bool as_json) {
  const auto instance = load_validated(instance_path);
  const auto assignment_raw = rm::io::load_assignment(assignment_path);

  // Unknown names are input errors; axiom and capacity violations below are
  // audit findings.
  rm::Assignment assignment;
  for (const auto& i : instance.individuals) assignment.by_individual[i.id] = std::nullopt;
  for (const auto& [id, seat] : assignment_raw.by_individual) {
    if (!instance.find_individual(id))
      throw rm::Error(rm::ErrorCode::DanglingReference,
                      "assignment names unknown individual '" + id + "'");
    if (seat) {
      if (!instance.find_institution(seat->institution))
        throw rm::Error(rm::ErrorCode::DanglingReference,
                        "assignment names unknown institution '" + seat->institution + "'");
      bool known_category = false;
      for (const auto& c : instance.categories)
        known_category = known_category || c.name == seat->category;
      if (!known_category)
        throw rm::Error(rm::ErrorCode::DanglingReference,
                        "assignment names unknown category '" + seat->category + "'");
    }
    assignment.by_individual[id] = seat;
  }

  const auto open_name = open_name_of(instance);
  const auto memberships = rm::effective_memberships(instance);

  // Structural conditions on assignments: seat categories must match the
  // holder's effective membership, and no capacity may be exceeded.
  std::optional<rm::Witness> structure;
  for (const auto& [id, seat] : assignment.by_individual) {
    if (!seat || structure) continue;
    const auto& category = memberships.at(id);
    if (seat->category != open_name && seat->category != category)
      structure = rm::Witness{"assignment_structure",
                              {id},
                              "'" + id + "' holds a '" + seat->category +
                                  "' seat but counts as '" + category + "'"};
  }
  for (const auto& [sid, seats] : assignment.by_institution()) {
    if (structure) break;
    const auto* inst = instance.find_institution(sid);
    std::map<std::string, int> used;
    for (const auto& [id, category] : seats) ++used[category];
    int total = 0;
    for (const auto& [category, count] : used) {
      total += count;
      if (category != open_name && count > inst->capacity.capacity_of(category, open_name))
        structure = rm::Witness{
            "assignment_structure", {sid}, "'" + sid + "' over-fills category '" + category + "'"};
    }
    if (!structure && total > inst->capacity.total)
      structure =
          rm::Witness{"assignment_structure", {sid}, "'" + sid + "' exceeds its total capacity"};
  }

  struct Audit {
    std::string name;
    std::optional<rm::Witness> witness;
  };
  const std::vector<Audit> audits{
      {"assignment_structure", structure},
      {"individual_rationality", rm::is_individually_rational(instance, assignment)},
      {"within_category_fairness", rm::is_within_category_fair(instance, assignment, open_name)},
      {"non_wastefulness", rm::is_non_wasteful(instance, assignment, open_name)},
      {"over_and_above_principle",
       rm::satisfies_over_and_above_assignment(instance, assignment, open_name)},
      {"stability", rm::is_stable(instance, assignment, open_name)},
  };
  bool all_pass = true;
  for (const auto& a : audits) all_pass = all_pass && !a.witness;

  if (as_json) {
    json checks = json::array();
    for (const auto& a : audits)
      checks.push_back({{"check", a.name},
                        {"pass", !a.witness},
                        {"witness", rm::io::witness_to_json(a.witness)}});
    std::cout << json{{"all_pass", all_pass}, {"checks", checks}}.dump(2) << "\n";
  } else {
    for (const auto& a : audits)
      std::cout << (a.witness ? "FAIL" : "pass") << " " << a.name
                << (a.witness ? "  (" + a.witness->detail + ")" : "") << "\n";
  }
  return all_pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleTally {
  long instances = 0;
  long pools_checked = 0;
  long failures = 0;
  json witnesses = json::array();

  void note_failure(const json& witness) {
    ++failures;
    if (witnesses.size() < 10) witnesses.push_back(witness);
  }
};

void oracle_theorem1(const rm::MarketInstance& instance, const rm::oracle::Guards& guards,
                     OracleTally& tally) {
  const auto open_name = open_name_of(instance);
  const auto memberships = rm::effective_memberships(instance);
  const auto ids = instance.individual_ids();
  if (static_cast<int>(ids.size()) > guards.max_pool)
    throw rm::Error(rm::ErrorCode::PoolTooLarge,
                    "instance has more individuals than the enumeration guard allows");
  for (const auto& institution : instance.institutions) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ids.size()); ++mask) {
      std::set<std::string> pool;
      for (std::size_t b = 0; b < ids.size(); ++b)
        if (mask & (std::uint64_t{1} << b)) pool.insert(ids[b]);
      const auto report =
          rm::oracle::verify_theorem1(institution, pool, memberships, guards, open_name);
      ++tally.pools_checked;
      if (!report.confirmed)
        tally.note_failure({{"institution", institution.id},
                            {"pool", pool},
                            {"satisfying", report.satisfying.size()}});
    }
  }
}

void oracle_subset_checks(const rm::MarketInstance& instance, const rm::oracle::Guards& guards,
                          bool size_mono, const rm::ChoiceRule& rule, OracleTally& tally) {
  const auto memberships = rm::effective_memberships(instance);
  std::set<std::string> universe;
  for (const auto& i : instance.individuals) universe.insert(i.id);
  for (const auto& institution : instance.institutions) {
    ++tally.pools_checked;
    if (size_mono) {
      if (auto w = rm::oracle::check_size_monotonicity(institution, universe, memberships, rule,
                                                       guards))
        tally.note_failure({{"added", w->added},
                            {"after", w->after},
                            {"before", w->before},
                            {"institution", institution.id},
                            {"pool", w->base_pool}});
    } else {
      if (auto w =
              rm::oracle::check_substitutability(institution, universe, memberships, rule, guards))
        tally.note_failure({{"added", w->added},
                            {"institution", institution.id},
                            {"pool", w->base_pool},
                            {"rejected", w->rejected}});
    }
  }
}

void oracle_manipulation(const rm::MarketInstance& instance, const rm::oracle::Guards& guards,
                         const rm::oracle::Mechanism& mechanism, OracleTally& tally) {
  ++tally.pools_checked;
  if (auto w = rm::oracle::manipulation_search(instance, mechanism, guards))
    tally.note_failure({{"declare", w->deviation.declare_membership},
                        {"improved_match", w->improved_match},
                        {"individual", w->deviation.individual},
                        {"preferences", w->deviation.preferences}});
}

int cmd_oracle(const std::optional<std::string>& instance_path, std::uint64_t seed, int count,
               const std::string& check, bool self_test, bool as_json, int individuals,
               int institutions, int reserves, int max_capacity) {
  const auto guards = guards_from_env();

  std::vector<rm::MarketInstance> markets;
  if (instance_path) {
    markets.push_back(load_validated(*instance_path));
  } else {
    rm::oracle::GenParams params;
    params.num_individuals = individuals;
    params.num_institutions = institutions;
    params.reserve_categories.resize(
        std::min<std::size_t>(reserves, params.reserve_categories.size()));
    params.max_total_capacity = max_capacity;
    params.declare_prob = 0.85;
    params.acceptability_prob = 0.9;
    params.listing_prob = 0.9;
    for (int k = 0; k < count; ++k)
      markets.push_back(rm::oracle::generate_instance(seed + static_cast<std::uint64_t>(k), params));
  }

  const bool run_theorem1 = check == "all" || check == "theorem1";
  const bool run_subst = check == "all" || check == "subst";
  const bool run_sizemono = check == "all" || check == "sizemono";
  const bool run_manip = check == "all" || check == "manip";

  std::map<std::string, OracleTally> tallies;
  for (const auto& market : markets) {
    if (run_theorem1 && !self_test) {
      auto& tally = tallies["theorem1"];
      ++tally.instances;
      oracle_theorem1(market, guards, tally);
    }
    if (run_subst) {
      auto& tally = tallies[self_test ? "subst_planted" : "subst"];
      ++tally.instances;
      if (self_test) {
        oracle_subset_checks(market, guards, false, rm::planted::reserve_first_rule(), tally);
        oracle_subset_checks(market, guards, false, rm::planted::drop_two_rule(), tally);
      } else {
        oracle_subset_checks(market, guards, false, rm::over_and_above_rule(), tally);
      }
    }
    if (run_sizemono) {
      auto& tally = tallies[self_test ? "sizemono_planted" : "sizemono"];
      ++tally.instances;
      if (self_test) {
        oracle_subset_checks(market, guards, true, rm::planted::reserve_first_rule(), tally);
        oracle_subset_checks(market, guards, true, rm::planted::drop_two_rule(), tally);
      } else {
        oracle_subset_checks(market, guards, true, rm::over_and_above_rule(), tally);
      }
    }
    if (run_manip) {
      auto& tally = tallies[self_test ? "manip_planted" : "manip"];
      ++tally.instances;
      const auto mechanism = self_test
                                 ? rm::oracle::Mechanism([](const rm::MarketInstance& m) {
                                     return rm::planted::immediate_acceptance(m);
                                   })
                                 : rm::oracle::da_oa_mechanism();
      oracle_manipulation(market, guards, mechanism, tally);
    }
  }

  // In self-test mode the planted defects are supposed to be caught.
  bool ok = true;
  for (const auto& [name, tally] : tallies)
    ok = ok && (self_test ? tally.failures > 0 : tally.failures == 0);

  if (as_json) {
    json checks = json::object();
    for (const auto& [name, tally] : tallies)
      checks[name] = {{"checked", tally.pools_checked},
                      {"instances", tally.instances},
                      {"witnesses", tally.failures},
                      {"witness_samples", tally.witnesses}};
    std::cout << json{{"checks", checks}, {"ok", ok}, {"self_test", self_test}}.dump(2) << "\n";
  } else {
    for (const auto& [name, tally] : tallies) {
      std::cout << name << ": " << tally.instances << " instances, " << tally.pools_checked
                << " checks, " << tally.failures << " witnesses";
      if (self_test)
        std::cout << (tally.failures > 0 ? " (expected: defects caught)" : " (DEFECTS MISSED)");
      std::cout << "\n";
      for (const auto& w : tally.witnesses) std::cout << "  witness " << w.dump() << "\n";
    }
    std::cout << (ok ? "OK" : "FAILED") << "\n";
  }
  return ok ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// repro
// ---------------------------------------------------------------------------

int cmd_repro(bool as_json) {
  const auto report = rm::critique::repro_report();
  if (as_json) {
    std::cout << rm::io::repro_report_to_json(report).dump(2) << "\n";
  } else {
    std::cout << "characterization gap of the informally stated principles:\n";
    int index = 1;
    for (const auto& check : report.checks) {
      std::cout << "(" << index++ << ") " << (check.holds ? "confirmed" : "FAILED") << ": "
                << check.statement << "\n      " << check.evidence << "\n";
    }
    std::cout << "selections satisfying the informal triple: example1="
              << report.informal_compliant_example1
              << " example2=" << report.informal_compliant_example2
              << " example3=" << report.informal_compliant_example3 << "\n";
    std::cout << "selections satisfying the formal axioms:   example1="
              << report.formal_compliant_example1
              << " example2=" << report.formal_compliant_example2
              << " example3=" << report.formal_compliant_example3 << "\n";
    std::cout << "informal principles violated by the rule on example2:";
    for (const auto& name : report.example2_informal_violations) std::cout << " " << name;
    std::cout << "\n";
  }
  return report.all_hold() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reservation-based seat allocation: over-and-above choice, deferred "
               "acceptance, axiom audits, and brute-force verification"};
  app.require_subcommand(1);

  // choose
  std::string choose_instance, choose_institution;
  std::optional<std::string> choose_pool;
  bool choose_all = false, choose_json = false;
  auto* choose = app.add_subcommand("choose", "evaluate one institution's choice over a pool");
  choose->add_option("instance", choose_instance, "instance file")->required();
  choose->add_option("--institution", choose_institution, "institution id")->required();
  auto* pool_opt = choose->add_option("--pool", choose_pool, "JSON array of applicant ids");
  choose->add_flag("--all", choose_all, "use every individual as the pool")->excludes(pool_opt);
  choose->add_flag("--json", choose_json, "machine-readable output");

  // match
  std::string match_instance;
  bool match_logs = false, match_json = false;
  auto* match = app.add_subcommand("match", "run deferred acceptance over the instance");
  match->add_option("instance", match_instance, "instance file")->required();
  match->add_flag("--logs", match_logs, "include per-round proposal logs");
  match->add_flag("--json", match_json, "machine-readable output");

  // audit
  std::string audit_instance, audit_assignment;
  bool audit_json = false;
  auto* audit = app.add_subcommand("audit", "audit an assignment against every axiom");
  audit->add_option("instance", audit_instance, "instance file")->required();
  audit->add_option("assignment", audit_assignment, "assignment file")->required();
  audit->add_flag("--json", audit_json, "machine-readable output");

  // oracle
  std::optional<std::string> oracle_instance;
  std::vector<std::uint64_t> oracle_random;
  std::string oracle_check = "all";
  bool oracle_self_test = false, oracle_json = false;
  int oracle_individuals = 5, oracle_institutions = 2, oracle_reserves = 2, oracle_capacity = 3;
  auto* oracle = app.add_subcommand("oracle", "brute-force verification sweeps");
  oracle->add_option("instance", oracle_instance, "instance file");
  oracle->add_option("--random", oracle_random, "SEED COUNT: seeded random instances")
      ->expected(2);
  oracle->add_option("--check", oracle_check, "theorem1|subst|sizemono|manip|all")
      ->check(CLI::IsMember({"theorem1", "subst", "sizemono", "manip", "all"}));
  oracle->add_flag("--self-test", oracle_self_test,
                   "run the planted faulty rules and expect witnesses");
  oracle->add_flag("--json", oracle_json, "machine-readable output");
  oracle->add_option("--individuals", oracle_individuals, "generated individuals per instance");
  oracle->add_option("--institutions", oracle_institutions, "generated institutions");
  oracle->add_option("--reserves", oracle_reserves, "generated reserve categories");
  oracle->add_option("--max-capacity", oracle_capacity, "largest generated total capacity");

  // repro
  bool repro_json = false;
  auto* repro = app.add_subcommand("repro", "reproduce the characterization-gap examples");
  repro->add_flag("--json", repro_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (choose->parsed()) {
      if (!choose_all && !choose_pool) {
        std::cerr << "choose requires --pool or --all\n";
        return kExitInput;
      }
      return cmd_choose(choose_instance, choose_institution, choose_pool, choose_all,
                        choose_json);
    }
    if (match->parsed()) return cmd_match(match_instance, match_logs, match_json);
    if (audit->parsed()) return cmd_audit(audit_instance, audit_assignment, audit_json);
    if (oracle->parsed()) {
      if (!oracle_instance && oracle_random.empty()) {
        std::cerr << "oracle requires an instance file or --random SEED COUNT\n";
        return kExitInput;
      }
      const std::uint64_t seed = oracle_random.empty() ? 0 : oracle_random[0];
      const int count = oracle_random.empty() ? 0 : static_cast<int>(oracle_random[1]);
      return cmd_oracle(oracle_instance, seed, count, oracle_check, oracle_self_test,
                        oracle_json, oracle_individuals, oracle_institutions, oracle_reserves,
                        oracle_capacity);
    }
    if (repro->parsed()) return cmd_repro(repro_json);
  } catch (const rm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
