#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "reserve_match/critique.hpp"
#include "reserve_match/da.hpp"
#include "reserve_match/market.hpp"
#include "reserve_match/oracle.hpp"

// Instance and assignment documents plus report serialization. The instance
// document is a single JSON object with top-level keys `categories`,
// `individuals`, `institutions` and `preferences`; merit and preference
// lists are ordered arrays, highest first. Serialization is canonical:
// parsing a serialized document and serializing it again is byte-identical.
namespace reserve_match::io {

using json = nlohmann::json;

inline const char* category_kind_name(CategoryKind kind) {
  switch (kind) {
    case CategoryKind::open: return "open";
    case CategoryKind::reserve: return "reserve";
    case CategoryKind::general: return "general";
  }
  return "reserve";
}

inline CategoryKind parse_category_kind(const std::string& s) {
  if (s == "open") return CategoryKind::open;
  if (s == "reserve") return CategoryKind::reserve;
  if (s == "general") return CategoryKind::general;
  throw Error(ErrorCode::ParseError, "unknown category kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Instance documents
// ---------------------------------------------------------------------------

inline json instance_to_json(const MarketInstance& instance) {
  json doc;
  doc["categories"] = json::array();
  for (const auto& c : instance.categories)
    doc["categories"].push_back({{"kind", category_kind_name(c.kind)}, {"name", c.name}});
  doc["individuals"] = json::array();
  for (const auto& i : instance.individuals) {
    json entry{{"category", i.true_category}, {"id", i.id}};
    if (i.true_category != kGeneralCategory) entry["declared"] = i.declared;
    doc["individuals"].push_back(entry);
  }
  doc["institutions"] = json::array();
  for (const auto& s : instance.institutions) {
    json capacity{{"total", s.capacity.total}};
    capacity["reserved"] = json::object();
    for (const auto& [cat, q] : s.capacity.reserved) capacity["reserved"][cat] = q;
    doc["institutions"].push_back(
        {{"capacity", capacity}, {"id", s.id}, {"merit", s.merit.ranked()}});
  }
  doc["preferences"] = json::object();
  for (const auto& [id, prefs] : instance.preferences) doc["preferences"][id] = prefs;
  return doc;
}

inline std::string serialize_instance(const MarketInstance& instance) {
  return instance_to_json(instance).dump(2) + "\n";
}

inline MarketInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "instance document must be an object");
  MarketInstance instance;
  try {
    for (const auto& entry : doc.at("categories")) {
      instance.categories.push_back({entry.at("name").get<std::string>(),
                                     parse_category_kind(entry.at("kind").get<std::string>())});
    }
    for (const auto& entry : doc.at("individuals")) {
      Individual person;
      person.id = entry.at("id").get<std::string>();
      person.true_category = entry.value("category", kGeneralCategory);
      person.declared = entry.value("declared", false);
      instance.individuals.push_back(person);
    }
    for (const auto& entry : doc.at("institutions")) {
      InstitutionSpec inst;
      inst.id = entry.at("id").get<std::string>();
      const auto& capacity = entry.at("capacity");
      inst.capacity.total = capacity.at("total").get<int>();
      if (capacity.contains("reserved"))
        for (const auto& [cat, q] : capacity.at("reserved").items())
          inst.capacity.reserved[cat] = q.get<int>();
      inst.merit = MeritOrder(entry.at("merit").get<std::vector<std::string>>());
      instance.institutions.push_back(std::move(inst));
    }
    if (doc.contains("preferences"))
      for (const auto& [id, prefs] : doc.at("preferences").items())
        instance.preferences[id] = prefs.get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return instance;
}

inline MarketInstance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return instance_from_json(doc);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline MarketInstance load_instance(const std::string& path) {
  return parse_instance(read_file(path));
}

// ---------------------------------------------------------------------------
// Assignment documents
// ---------------------------------------------------------------------------

inline json assignment_to_json(const Assignment& a) {
  json doc = json::object();
  for (const auto& [id, seat] : a.by_individual) {
    if (seat)
      doc[id] = {{"category", seat->category}, {"institution", seat->institution}};
    else
      doc[id] = "unassigned";
  }
  return json{{"assignment", doc}};
}

inline Assignment assignment_from_json(const json& doc) {
  Assignment a;
  try {
    const auto& body = doc.contains("assignment") ? doc.at("assignment") : doc;
    if (!body.is_object())
      throw Error(ErrorCode::ParseError, "assignment document must be an object");
    for (const auto& [id, seat] : body.items()) {
      if (seat.is_string() && seat.get<std::string>() == "unassigned") {
        a.by_individual[id] = std::nullopt;
      } else if (seat.is_object()) {
        a.by_individual[id] =
            Seat{seat.at("institution").get<std::string>(), seat.at("category").get<std::string>()};
      } else {
        throw Error(ErrorCode::ParseError,
                    "assignment for '" + id + "' must be a seat object or \"unassigned\"");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return a;
}

inline Assignment parse_assignment(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return assignment_from_json(doc);
}

inline Assignment load_assignment(const std::string& path) {
  return parse_assignment(read_file(path));
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline json witness_to_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  return json{{"code", w->code}, {"detail", w->detail}, {"subjects", w->subjects}};
}

inline json choice_result_to_json(const ChoiceResult& result) {
  json chosen = json::object();
  for (const auto& [category, ids] : result.chosen) chosen[category] = ids;
  return json{{"chosen", chosen}, {"rejected", result.rejected}};
}

inline json round_logs_to_json(const std::vector<RoundLog>& rounds) {
  json out = json::array();
  for (const auto& r : rounds) {
    json institutions = json::object();
    for (const auto& [sid, entry] : r.institutions)
      institutions[sid] = {
          {"held", entry.held}, {"pool", entry.pool}, {"rejected", entry.rejected}};
    out.push_back({{"institutions", institutions}, {"round", r.round}});
  }
  return out;
}

inline json repro_report_to_json(const critique::ReproReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"evidence", c.evidence},
                      {"holds", c.holds},
                      {"name", c.name},
                      {"statement", c.statement}});
  return json{
      {"all_hold", report.all_hold()},
      {"checks", checks},
      {"example2_informal_violations", report.example2_informal_violations},
      {"selection_counts",
       {{"formal",
         {{"example1", report.formal_compliant_example1},
          {"example2", report.formal_compliant_example2},
          {"example3", report.formal_compliant_example3}}},
        {"informal",
         {{"example1", report.informal_compliant_example1},
          {"example2", report.informal_compliant_example2},
          {"example3", report.informal_compliant_example3}}}}}};
}

}  // namespace reserve_match::io
