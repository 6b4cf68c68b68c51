#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace reserve_match {

// Membership label for individuals that hold no (declared) reserve
// membership. It is never a position category.
inline const std::string kGeneralCategory = "GC";

enum class CategoryKind { open, reserve, general };

struct CategoryId {
  std::string name;
  CategoryKind kind = CategoryKind::reserve;
};

struct Individual {
  std::string id;
  std::string true_category = kGeneralCategory;  // reserve name or "GC"
  bool declared = false;                         // reserve membership reported?

  // Reserve members who do not report their membership count as GC and
  // compete for open positions only.
  const std::string& effective_category() const {
    return declared ? true_category : kGeneralCategory;
  }
};

struct CapacityProfile {
  int total = 0;
  std::map<std::string, int> reserved;  // reserve category -> positions

  int reserved_total() const {
    int sum = 0;
    for (const auto& [name, q] : reserved) sum += q;
    return sum;
  }
  // Open positions are whatever the reserves leave over.
  int open_capacity() const { return total - reserved_total(); }
  int capacity_of(const std::string& category, const std::string& open_name) const {
    if (category == open_name) return open_capacity();
    auto it = reserved.find(category);
    return it == reserved.end() ? 0 : it->second;
  }
};

// Strict merit ranking, highest first. Individuals not listed are
// unacceptable at the institution.
class MeritOrder {
 public:
  MeritOrder() = default;
  explicit MeritOrder(std::vector<std::string> ranked) : ranked_(std::move(ranked)) {
    for (std::size_t k = 0; k < ranked_.size(); ++k) pos_.emplace(ranked_[k], k);
  }

  const std::vector<std::string>& ranked() const { return ranked_; }
  bool acceptable(const std::string& id) const { return pos_.count(id) != 0; }
  std::optional<std::size_t> position(const std::string& id) const {
    auto it = pos_.find(id);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }
  // a strictly out-ranks b. Any listed individual out-ranks any unlisted
  // one; two unlisted individuals are incomparable.
  bool prefers(const std::string& a, const std::string& b) const {
    auto pa = position(a);
    if (!pa) return false;
    auto pb = position(b);
    return !pb || *pa < *pb;
  }
  // true iff the list holds duplicates (strict-order violation).
  bool has_duplicates() const { return pos_.size() != ranked_.size(); }

 private:
  std::vector<std::string> ranked_;
  std::unordered_map<std::string, std::size_t> pos_;
};

struct InstitutionSpec {
  std::string id;
  CapacityProfile capacity;
  MeritOrder merit;
};

// Per individual: institution ids, most preferred first. Unlisted
// institutions are unacceptable to the individual.
using PreferenceProfile = std::map<std::string, std::vector<std::string>>;

struct MarketInstance {
  std::vector<CategoryId> categories;
  std::vector<InstitutionSpec> institutions;
  std::vector<Individual> individuals;
  PreferenceProfile preferences;

  const CategoryId* open_category() const {
    for (const auto& c : categories)
      if (c.kind == CategoryKind::open) return &c;
    return nullptr;
  }
  std::vector<std::string> reserve_category_names() const {
    std::vector<std::string> out;
    for (const auto& c : categories)
      if (c.kind == CategoryKind::reserve) out.push_back(c.name);
    std::sort(out.begin(), out.end());
    return out;
  }
  const Individual* find_individual(const std::string& id) const {
    for (const auto& i : individuals)
      if (i.id == id) return &i;
    return nullptr;
  }
  const InstitutionSpec* find_institution(const std::string& id) const {
    for (const auto& s : institutions)
      if (s.id == id) return &s;
    return nullptr;
  }
  std::vector<std::string> individual_ids() const {
    std::vector<std::string> out;
    for (const auto& i : individuals) out.push_back(i.id);
    return out;
  }
  const std::vector<std::string>& preferences_of(const std::string& id) const {
    static const std::vector<std::string> empty;
    auto it = preferences.find(id);
    return it == preferences.end() ? empty : it->second;
  }
};

// Effective category of every individual under the reported memberships.
using MembershipMap = std::unordered_map<std::string, std::string>;

inline MembershipMap effective_memberships(const MarketInstance& instance) {
  MembershipMap t;
  for (const auto& i : instance.individuals) t.emplace(i.id, i.effective_category());
  return t;
}

// The shipped vertical-reserve preset.
inline std::vector<CategoryId> indian_categories() {
  return {{"open", CategoryKind::open},
          {"SC", CategoryKind::reserve},
          {"ST", CategoryKind::reserve},
          {"OBC", CategoryKind::reserve},
          {"EWS", CategoryKind::reserve}};
}

// ---------------------------------------------------------------------------
// Choice results, assignments, matchings
// ---------------------------------------------------------------------------

// Per-category chosen sets for one institution and one applicant pool.
// Every position category of the institution appears as a key.
struct ChoiceResult {
  std::map<std::string, std::set<std::string>> chosen;
  std::set<std::string> rejected;

  std::set<std::string> chosen_union() const {
    std::set<std::string> all;
    for (const auto& [cat, ids] : chosen) all.insert(ids.begin(), ids.end());
    return all;
  }
  bool is_chosen(const std::string& id) const {
    for (const auto& [cat, ids] : chosen)
      if (ids.count(id)) return true;
    return false;
  }
  std::optional<std::string> category_of(const std::string& id) const {
    for (const auto& [cat, ids] : chosen)
      if (ids.count(id)) return cat;
    return std::nullopt;
  }
  friend bool operator==(const ChoiceResult& a, const ChoiceResult& b) {
    return a.chosen == b.chosen && a.rejected == b.rejected;
  }
};

struct Seat {
  std::string institution;
  std::string category;
  friend bool operator==(const Seat& a, const Seat& b) {
    return a.institution == b.institution && a.category == b.category;
  }
};

// Institution-and-category outcome for every individual. Unassigned is an
// explicit state (nullopt), never a sentinel institution.
struct Assignment {
  std::map<std::string, std::optional<Seat>> by_individual;

  std::optional<Seat> seat_of(const std::string& id) const {
    auto it = by_individual.find(id);
    if (it == by_individual.end()) return std::nullopt;
    return it->second;
  }
  // Institution view: set of (individual, category) pairs.
  std::map<std::string, std::set<std::pair<std::string, std::string>>> by_institution() const {
    std::map<std::string, std::set<std::pair<std::string, std::string>>> out;
    for (const auto& [id, seat] : by_individual)
      if (seat) out[seat->institution].insert({id, seat->category});
    return out;
  }
  std::set<std::string> held_at(const std::string& institution) const {
    std::set<std::string> out;
    for (const auto& [id, seat] : by_individual)
      if (seat && seat->institution == institution) out.insert(id);
    return out;
  }
  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.by_individual == b.by_individual;
  }
};

// Category-erased view of an assignment.
struct Matching {
  std::map<std::string, std::optional<std::string>> by_individual;
  std::map<std::string, std::set<std::string>> by_institution;
};

inline Matching induced_matching(const Assignment& a) {
  Matching m;
  for (const auto& [id, seat] : a.by_individual) {
    if (seat) {
      m.by_individual[id] = seat->institution;
      m.by_institution[seat->institution].insert(id);
    } else {
      m.by_individual[id] = std::nullopt;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Errors and validation
// ---------------------------------------------------------------------------

enum class ErrorCode {
  DuplicateId,
  DanglingReference,
  TieInMerit,
  CapacityOverflow,
  MultipleOpenCategories,
  MissingOpenCategory,
  InvalidDeclaration,
  NotInPool,
  Unacceptable,
  UnknownCategory,
  PoolTooLarge,
  UniverseTooLarge,
  InstanceTooLarge,
  BadParams,
  ParseError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::TieInMerit: return "TieInMerit";
    case ErrorCode::CapacityOverflow: return "CapacityOverflow";
    case ErrorCode::MultipleOpenCategories: return "MultipleOpenCategories";
    case ErrorCode::MissingOpenCategory: return "MissingOpenCategory";
    case ErrorCode::InvalidDeclaration: return "InvalidDeclaration";
    case ErrorCode::NotInPool: return "NotInPool";
    case ErrorCode::Unacceptable: return "Unacceptable";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::PoolTooLarge: return "PoolTooLarge";
    case ErrorCode::UniverseTooLarge: return "UniverseTooLarge";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct ValidationError {
  ErrorCode code;
  std::string message;
};

// Checks every structural invariant of an instance. Returns the list of
// violations; an empty list means the instance is usable as-is.
inline std::vector<ValidationError> validate_instance(const MarketInstance& instance) {
  std::vector<ValidationError> errors;
  auto fail = [&](ErrorCode code, std::string msg) {
    errors.push_back({code, std::move(msg)});
  };

  std::set<std::string> category_names;
  std::set<std::string> reserve_names;
  int open_count = 0;
  for (const auto& c : instance.categories) {
    if (!category_names.insert(c.name).second)
      fail(ErrorCode::DuplicateId, "duplicate category '" + c.name + "'");
    if (c.name == kGeneralCategory)
      fail(ErrorCode::DuplicateId,
           "'" + kGeneralCategory + "' is reserved as the no-membership label");
    if (c.kind == CategoryKind::open) ++open_count;
    if (c.kind == CategoryKind::reserve) reserve_names.insert(c.name);
    if (c.kind == CategoryKind::general)
      fail(ErrorCode::UnknownCategory,
           "category '" + c.name + "' declared with kind 'general'; "
           "general is a membership label, not a position category");
  }
  if (open_count > 1) fail(ErrorCode::MultipleOpenCategories, "more than one open category");
  if (open_count == 0) fail(ErrorCode::MissingOpenCategory, "no open category declared");

  std::set<std::string> individual_ids;
  for (const auto& i : instance.individuals) {
    if (!individual_ids.insert(i.id).second)
      fail(ErrorCode::DuplicateId, "duplicate individual '" + i.id + "'");
    if (i.true_category != kGeneralCategory && !reserve_names.count(i.true_category))
      fail(ErrorCode::DanglingReference,
           "individual '" + i.id + "' references unknown category '" + i.true_category + "'");
    if (i.declared && i.true_category == kGeneralCategory)
      fail(ErrorCode::InvalidDeclaration,
           "individual '" + i.id + "' declares membership but belongs to no reserve category");
  }

  std::set<std::string> institution_ids;
  for (const auto& s : instance.institutions) {
    if (!institution_ids.insert(s.id).second)
      fail(ErrorCode::DuplicateId, "duplicate institution '" + s.id + "'");
    if (s.capacity.total < 0)
      fail(ErrorCode::CapacityOverflow, "institution '" + s.id + "' has negative capacity");
    for (const auto& [cat, q] : s.capacity.reserved) {
      if (!reserve_names.count(cat))
        fail(ErrorCode::DanglingReference,
             "institution '" + s.id + "' reserves positions for unknown category '" + cat + "'");
      if (q < 0)
        fail(ErrorCode::CapacityOverflow,
             "institution '" + s.id + "' has negative reserve for '" + cat + "'");
    }
    if (s.capacity.open_capacity() < 0)
      fail(ErrorCode::CapacityOverflow,
           "institution '" + s.id + "' reserves more positions than its total capacity");
    if (s.merit.has_duplicates())
      fail(ErrorCode::TieInMerit,
           "institution '" + s.id + "' lists an individual twice in its merit order");
    for (const auto& id : s.merit.ranked())
      if (!individual_ids.count(id))
        fail(ErrorCode::DanglingReference,
             "institution '" + s.id + "' ranks unknown individual '" + id + "'");
  }

  for (const auto& [id, prefs] : instance.preferences) {
    if (!individual_ids.count(id))
      fail(ErrorCode::DanglingReference, "preferences given for unknown individual '" + id + "'");
    std::set<std::string> seen;
    for (const auto& sid : prefs) {
      if (!seen.insert(sid).second)
        fail(ErrorCode::DuplicateId,
             "individual '" + id + "' lists institution '" + sid + "' twice");
      if (!institution_ids.count(sid))
        fail(ErrorCode::DanglingReference,
             "individual '" + id + "' ranks unknown institution '" + sid + "'");
    }
  }
  return errors;
}

// Throwing convenience for call sites that require a valid instance.
inline const MarketInstance& ensure_valid(const MarketInstance& instance) {
  auto errors = validate_instance(instance);
  if (!errors.empty()) throw Error(errors.front().code, errors.front().message);
  return instance;
}

}  // namespace reserve_match
