#pragma once

#include "reserve_match/market.hpp"

// Canned markets used by the documentation, the test suites and the
// characterization-gap report. Each one also ships as a file under
// fixtures/.
namespace reserve_match::instances {

// One institution, one open and one SC seat; two SC members with i ranked
// above j.
inline MarketInstance example1() {
  MarketInstance m;
  m.categories = {{"open", CategoryKind::open}, {"SC", CategoryKind::reserve}};
  m.individuals = {{"i", "SC", true}, {"j", "SC", true}};
  InstitutionSpec s;
  s.id = "s";
  s.capacity.total = 2;
  s.capacity.reserved["SC"] = 1;
  s.merit = MeritOrder({"i", "j"});
  m.institutions = {s};
  m.preferences = {{"i", {"s"}}, {"j", {"s"}}};
  return m;
}

// Same seats; i is an SC member, j holds no reserve membership.
inline MarketInstance example2() {
  MarketInstance m = example1();
  m.individuals = {{"i", "SC", true}, {"j", kGeneralCategory, false}};
  return m;
}

// Same seats; the top-merit individual i holds no membership, j and k are
// SC members with j ranked above k.
inline MarketInstance example3() {
  MarketInstance m;
  m.categories = {{"open", CategoryKind::open}, {"SC", CategoryKind::reserve}};
  m.individuals = {
      {"i", kGeneralCategory, false}, {"j", "SC", true}, {"k", "SC", true}};
  InstitutionSpec s;
  s.id = "s";
  s.capacity.total = 2;
  s.capacity.reserved["SC"] = 1;
  s.merit = MeritOrder({"i", "j", "k"});
  m.institutions = {s};
  m.preferences = {{"i", {"s"}}, {"j", {"s"}}, {"k", {"s"}}};
  return m;
}

// Two institutions, three individuals, everyone preferring s1: the matching
// run rejects i3 at s1 in round one and places them at s2 in round two.
inline MarketInstance da_three_individual() {
  MarketInstance m;
  m.categories = {{"open", CategoryKind::open}, {"SC", CategoryKind::reserve}};
  m.individuals = {
      {"i1", kGeneralCategory, false}, {"i2", "SC", true}, {"i3", "SC", true}};
  InstitutionSpec s1;
  s1.id = "s1";
  s1.capacity.total = 2;
  s1.capacity.reserved["SC"] = 1;
  s1.merit = MeritOrder({"i1", "i2", "i3"});
  InstitutionSpec s2;
  s2.id = "s2";
  s2.capacity.total = 1;
  s2.merit = MeritOrder({"i1", "i2", "i3"});
  m.institutions = {s1, s2};
  m.preferences = {{"i1", {"s1", "s2"}}, {"i2", {"s1", "s2"}}, {"i3", {"s1", "s2"}}};
  return m;
}

}  // namespace reserve_match::instances
