#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lll/error.hpp"
#include "lll/rational.hpp"

namespace lll {

using VariableId = uint32_t;
using EventId = uint32_t;
using Value = uint32_t;

inline constexpr int kInfiniteRadius = std::numeric_limits<int>::max();

// Distribution over {0, ..., k-1}. Declared variables must have strictly
// positive weights; synthetic variables introduced by substitution may carry
// zeros (their support is restricted by construction).
struct Distribution {
  std::vector<Rational> weights;

  size_t size() const { return weights.size(); }
  void validate(bool allow_zero) const;
};

struct Variable {
  std::string name;
  Distribution dist;
  bool synthetic = false;
};

// Extensional bad event: occurs exactly on the listed forbidden assignments
// of its variable set. Forbidden assignments are stored as mixed-radix codes
// over the vbl domains (least significant position first), kept sorted.
struct BadEvent {
  std::string name;
  std::vector<VariableId> vbl;      // duplicate-free, declaration order
  std::vector<uint64_t> forbidden;  // sorted codes
  bool synthetic = false;
};

// Assignment of every variable, indexed by VariableId.
using Assignment = std::vector<Value>;

// Set of events, sorted by id. Regions address subsets of the dependency
// graph's vertex set.
using Region = std::vector<EventId>;

// Partial assignment with sorted scope.
class PartialAssignment {
 public:
  PartialAssignment() = default;

  void set(VariableId v, Value x);
  bool contains(VariableId v) const;
  Value at(VariableId v) const;
  size_t size() const { return scope_.size(); }
  bool empty() const { return scope_.empty(); }
  const std::vector<VariableId>& scope() const { return scope_; }
  const std::vector<Value>& values() const { return values_; }

  // Union of two partial assignments; conflicting values on a shared
  // variable are an error.
  PartialAssignment merged(const PartialAssignment& other) const;

  bool operator==(const PartialAssignment& other) const {
    return scope_ == other.scope_ && values_ == other.values_;
  }

 private:
  std::vector<VariableId> scope_;  // sorted
  std::vector<Value> values_;      // parallel to scope_
};

// An instance: finite-domain variables with product measure nu, plus
// extensional bad events. Immutable once frozen; freezing validates the
// data and precomputes adjacency and the canonical serialization.
class LLLInstance {
 public:
  VariableId add_variable(std::string name, Distribution dist,
                          bool synthetic = false);
  // Forbidden rows are full tuples over vbl, in vbl order.
  EventId add_event(std::string name, std::vector<VariableId> vbl,
                    const std::vector<std::vector<Value>>& forbidden,
                    bool synthetic = false);
  EventId add_event_codes(std::string name, std::vector<VariableId> vbl,
                          std::vector<uint64_t> forbidden,
                          bool synthetic = false);
  void set_gamma(Rational gamma);
  void freeze();

  bool frozen() const { return frozen_; }
  size_t num_variables() const { return vars_.size(); }
  size_t num_events() const { return events_.size(); }
  const Variable& variable(VariableId v) const { return vars_[v]; }
  const BadEvent& event(EventId e) const { return events_[e]; }
  const std::optional<Rational>& gamma() const { return gamma_; }
  std::optional<VariableId> find_variable(const std::string& name) const;
  std::optional<EventId> find_event(const std::string& name) const;

  // Events incident to a variable, ascending.
  const std::vector<EventId>& events_of(VariableId v) const;
  // Dependency graph adjacency: events sharing a variable, no self loops.
  const std::vector<EventId>& neighbors(EventId e) const;

  bool event_occurs(EventId e, const Assignment& y) const;
  // Restriction of the event to a partial assignment covering its vbl.
  bool event_occurs(EventId e, const PartialAssignment& pa) const;

  uint64_t domain_size(VariableId v) const { return vars_[v].dist.size(); }
  // Product of domain sizes over a sorted variable set, guarded against the
  // given budget.
  uint64_t enumeration_size(const std::vector<VariableId>& vars,
                            uint64_t budget) const;

  uint64_t code_of(const std::vector<VariableId>& vbl,
                   const Assignment& y) const;
  std::vector<Value> decode(const std::vector<VariableId>& vbl,
                            uint64_t code) const;

  // Canonical text form; doubles as cache key. Available after freeze().
  const std::string& canonical() const;

  bool operator==(const LLLInstance& other) const {
    return canonical() == other.canonical();
  }

 private:
  void require_frozen() const;
  std::vector<Variable> vars_;
  std::vector<BadEvent> events_;
  std::vector<std::vector<EventId>> var_events_;
  std::vector<std::vector<EventId>> adj_;
  std::optional<Rational> gamma_;
  std::string canonical_;
  bool frozen_ = false;
};

// --- Geometry over the dependency graph ---

// Adjacency lists of D_I (symmetric, loop-free), index = EventId.
std::vector<std::vector<EventId>> dependency_graph(const LLLInstance& inst);

// BFS distance from the region to every event; kInfiniteRadius when
// unreachable. Region must be nonempty and within range.
std::vector<int> event_distances(const LLLInstance& inst, const Region& region);

// Ring index of each variable: the smallest r with the variable in
// vbl(B_r(region)); kInfiniteRadius for variables never reached.
std::vector<int> variable_depths(const LLLInstance& inst, const Region& region);

// B_r(region): all events at distance <= r.
Region ball(const LLLInstance& inst, const Region& region, int r);

// Union of rings R_i, ..., R_j. j = kInfiniteRadius yields everything
// outside vbl(B_{i-1}(region)), including variables in other components.
std::vector<VariableId> ring(const LLLInstance& inst, const Region& region,
                             int i, int j);

struct EventRings {
  Region intersecting;  // vbl meets the ring span
  Region contained;     // vbl inside the ring span
};
EventRings event_rings(const LLLInstance& inst, const Region& region, int i,
                       int j);

// vbl(region): union of the events' variable sets, sorted.
std::vector<VariableId> region_variables(const LLLInstance& inst,
                                         const Region& region);

// Induced instance: events of the region over the variables they touch.
// Variables keep their names; ids are re-densified in ascending original
// order. A declared gamma is not inherited.
LLLInstance sub_instance(const LLLInstance& inst, const Region& region);

// Copy of the instance extended with additional variables and events
// (appended in order, flagged as given). Name collisions are an error.
LLLInstance extend_instance(const LLLInstance& inst,
                            const std::vector<Variable>& new_vars,
                            const std::vector<BadEvent>& new_events);

// Set helpers used throughout; inputs sorted.
std::vector<VariableId> sorted_union(const std::vector<VariableId>& a,
                                     const std::vector<VariableId>& b);
std::vector<VariableId> sorted_difference(const std::vector<VariableId>& a,
                                          const std::vector<VariableId>& b);
bool sorted_contains(const std::vector<VariableId>& haystack,
                     const std::vector<VariableId>& needle);
bool sorted_intersects(const std::vector<VariableId>& a,
                       const std::vector<VariableId>& b);

}  // namespace lll
