#include <catch2/catch_amalgamated.hpp>

#include "reserve_match/da.hpp"
#include "reserve_match/instances.hpp"
#include "reserve_match/oracle.hpp"

using namespace reserve_match;

TEST_CASE("deferred acceptance walk on the three-individual market") {
  const auto market = instances::da_three_individual();
  REQUIRE(validate_instance(market).empty());
  const auto outcome = run_da_oa(market);

  CHECK(outcome.assignment.seat_of("i1") == Seat{"s1", "open"});
  CHECK(outcome.assignment.seat_of("i2") == Seat{"s1", "SC"});
  CHECK(outcome.assignment.seat_of("i3") == Seat{"s2", "open"});

  REQUIRE(outcome.rounds.size() == 2);
  const auto& first = outcome.rounds[0].institutions.at("s1");
  CHECK(first.pool == std::set<std::string>{"i1", "i2", "i3"});
  CHECK(first.held == std::set<std::string>{"i1", "i2"});
  CHECK(first.rejected == std::set<std::string>{"i3"});
  const auto& second = outcome.rounds[1].institutions.at("s2");
  CHECK(second.pool == std::set<std::string>{"i3"});
  CHECK(second.held == std::set<std::string>{"i3"});
}

TEST_CASE("a single institution reduces to one choice over its proposers") {
  oracle::GenParams params;
  params.num_institutions = 1;
  params.num_individuals = 6;
  params.reserve_categories = {"SC"};
  params.listing_prob = 0.7;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto market = oracle::generate_instance(seed, params);
    const auto outcome = run_da_oa(market);
    const auto t = effective_memberships(market);

    std::set<std::string> proposers;
    for (const auto& i : market.individuals)
      if (!market.preferences_of(i.id).empty()) proposers.insert(i.id);
    const auto direct = over_and_above_choose(market.institutions.front(), proposers, t);

    CAPTURE(seed);
    for (const auto& i : market.individuals) {
      const auto seat = outcome.assignment.seat_of(i.id);
      const auto category = direct.category_of(i.id);
      if (category) {
        REQUIRE(seat.has_value());
        CHECK(seat->category == *category);
      } else {
        CHECK_FALSE(seat.has_value());
      }
    }
    CHECK(outcome.rounds.size() <= 1);
  }
}

TEST_CASE("nobody proposing means zero rounds and everyone unassigned") {
  auto market = instances::da_three_individual();
  for (auto& [id, prefs] : market.preferences) prefs.clear();
  const auto outcome = run_da_oa(market);
  CHECK(outcome.rounds.empty());
  for (const auto& i : market.individuals)
    CHECK_FALSE(outcome.assignment.seat_of(i.id).has_value());
}

TEST_CASE("individual rationality of an assignment") {
  const auto market = instances::da_three_individual();
  const auto good = da_oa_assignment(market);
  CHECK_FALSE(is_individually_rational(market, good));

  Assignment bad = good;
  auto shrunk = market;
  shrunk.preferences["i3"] = {"s1"};  // i3 never listed s2
  REQUIRE(bad.seat_of("i3") == Seat{"s2", "open"});
  const auto witness = is_individually_rational(shrunk, bad);
  REQUIRE(witness);
  CHECK(witness->subjects == std::vector<std::string>{"i3"});

  Assignment nobody;
  nobody.by_individual["i1"] = std::nullopt;
  CHECK_FALSE(is_individually_rational(market, nobody));
}

TEST_CASE("within-category fairness of an assignment") {
  const auto market = instances::da_three_individual();
  CHECK_FALSE(is_within_category_fair(market, da_oa_assignment(market)));

  Assignment swapped;
  swapped.by_individual["i1"] = Seat{"s1", "open"};
  swapped.by_individual["i2"] = Seat{"s2", "open"};
  swapped.by_individual["i3"] = Seat{"s1", "SC"};
  const auto witness = is_within_category_fair(market, swapped);
  REQUIRE(witness);
  CHECK(witness->subjects == std::vector<std::string>{"i2", "s1", "i3"});

  // Everyone at their top choice: nothing to envy.
  auto cosy = instances::da_three_individual();
  cosy.preferences["i3"] = {"s2"};
  CHECK_FALSE(is_within_category_fair(cosy, da_oa_assignment(cosy)));
}

TEST_CASE("non-wastefulness of an assignment") {
  const auto market = instances::da_three_individual();
  CHECK_FALSE(is_non_wasteful(market, da_oa_assignment(market)));

  Assignment wasteful;
  wasteful.by_individual["i1"] = Seat{"s1", "open"};
  wasteful.by_individual["i2"] = Seat{"s1", "SC"};
  wasteful.by_individual["i3"] = std::nullopt;  // while s2 sits empty
  const auto witness = is_non_wasteful(market, wasteful);
  REQUIRE(witness);
  CHECK(witness->subjects == std::vector<std::string>{"i3", "s2"});
}

TEST_CASE("assignment-level over-and-above principle") {
  const auto market = instances::example1();
  Assignment good;
  good.by_individual["i"] = Seat{"s", "open"};
  good.by_individual["j"] = Seat{"s", "SC"};
  CHECK_FALSE(satisfies_over_and_above_assignment(market, good));

  Assignment swapped;
  swapped.by_individual["i"] = Seat{"s", "SC"};
  swapped.by_individual["j"] = Seat{"s", "open"};
  const auto witness = satisfies_over_and_above_assignment(market, swapped);
  REQUIRE(witness);
  CHECK(witness->subjects == std::vector<std::string>{"s", "i", "j"});

  Assignment open_only;
  open_only.by_individual["i"] = Seat{"s", "open"};
  open_only.by_individual["j"] = std::nullopt;
  CHECK_FALSE(satisfies_over_and_above_assignment(market, open_only));
}

TEST_CASE("stability of the induced matching") {
  const auto market = instances::da_three_individual();
  CHECK_FALSE(is_stable(market, da_oa_assignment(market)));

  // Over-filled institution: its matched set is not a fixed point.
  Assignment overfull;
  overfull.by_individual["i1"] = Seat{"s1", "open"};
  overfull.by_individual["i2"] = Seat{"s1", "SC"};
  overfull.by_individual["i3"] = Seat{"s1", "SC"};
  const auto fixed_point = is_stable(market, overfull);
  REQUIRE(fixed_point);
  CHECK(fixed_point->code == "stability_condition_2");
  CHECK(fixed_point->subjects == std::vector<std::string>{"s1"});

  // Blocking pair: i2 prefers s1 and would be chosen there.
  Assignment blocked;
  blocked.by_individual["i1"] = Seat{"s1", "open"};
  blocked.by_individual["i3"] = Seat{"s1", "SC"};
  blocked.by_individual["i2"] = Seat{"s2", "open"};
  const auto blocking = is_stable(market, blocked);
  REQUIRE(blocking);
  CHECK(blocking->code == "stability_condition_3");
  CHECK(blocking->subjects == std::vector<std::string>{"i2", "s1"});
}

TEST_CASE("rerunning the mechanism reproduces the assignment and logs") {
  oracle::GenParams params;
  params.num_institutions = 3;
  params.num_individuals = 5;
  params.listing_prob = 0.8;
  params.declare_prob = 0.8;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto market = oracle::generate_instance(seed, params);
    const auto once = run_da_oa(market);
    const auto twice = run_da_oa(market);
    CHECK(once.assignment == twice.assignment);
    CHECK(once.rounds.size() == twice.rounds.size());
  }
}

TEST_CASE("round logs obey the mechanism's bookkeeping") {
  oracle::GenParams params;
  params.num_institutions = 3;
  params.num_individuals = 6;
  params.listing_prob = 0.8;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto market = oracle::generate_instance(seed, params);
    const auto outcome = run_da_oa(market);
    const auto t = effective_memberships(market);
    CAPTURE(seed);

    CHECK(outcome.rounds.size() <=
          market.individuals.size() * market.institutions.size());

    std::map<std::string, std::set<std::string>> proposals_seen;
    std::map<std::string, std::set<std::string>> held_before;
    for (const auto& log : outcome.rounds) {
      for (const auto& [sid, entry] : log.institutions) {
        // Held set is exactly the choice over the round's pool.
        const auto* s = market.find_institution(sid);
        CHECK(over_and_above_choose(*s, entry.pool, t).chosen_union() == entry.held);
        // Nobody proposes to the same institution twice.
        for (const auto& id : entry.pool) {
          if (held_before[sid].count(id)) continue;
          CHECK_FALSE(proposals_seen[sid].count(id));
          proposals_seen[sid].insert(id);
        }
        held_before[sid] = entry.held;
      }
    }
  }
}

TEST_CASE("mechanism output satisfies the full axiom battery on random markets") {
  oracle::GenParams params;
  params.num_institutions = 3;
  params.num_individuals = 5;
  params.reserve_categories = {"SC", "ST"};
  params.declare_prob = 0.85;
  params.listing_prob = 0.85;
  params.acceptability_prob = 0.85;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto market = oracle::generate_instance(seed, params);
    const auto assignment = da_oa_assignment(market);
    CAPTURE(seed);
    CHECK_FALSE(is_individually_rational(market, assignment));
    CHECK_FALSE(is_within_category_fair(market, assignment));
    CHECK_FALSE(is_non_wasteful(market, assignment));
    CHECK_FALSE(satisfies_over_and_above_assignment(market, assignment));
    CHECK_FALSE(is_stable(market, assignment));
  }
}
