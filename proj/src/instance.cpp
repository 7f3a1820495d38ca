#include "lll/instance.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace lll {

void Distribution::validate(bool allow_zero) const {
  if (weights.empty())
    throw InvariantViolation("distribution needs at least one outcome");
  Rational total = 0;
  for (const Rational& w : weights) {
    if (w < 0 || (!allow_zero && w == 0))
      throw InvariantViolation("distribution weights must be strictly positive");
    total += w;
  }
  if (total != 1)
    throw InvariantViolation("distribution weights must sum to 1, got " +
                             to_string(total));
}

void PartialAssignment::set(VariableId v, Value x) {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), v);
  size_t idx = static_cast<size_t>(it - scope_.begin());
  if (it != scope_.end() && *it == v) {
    values_[idx] = x;
    return;
  }
  scope_.insert(it, v);
  values_.insert(values_.begin() + static_cast<ptrdiff_t>(idx), x);
}

bool PartialAssignment::contains(VariableId v) const {
  return std::binary_search(scope_.begin(), scope_.end(), v);
}

Value PartialAssignment::at(VariableId v) const {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), v);
  if (it == scope_.end() || *it != v)
    throw InvariantViolation("partial assignment does not cover variable " +
                             std::to_string(v));
  return values_[static_cast<size_t>(it - scope_.begin())];
}

PartialAssignment PartialAssignment::merged(const PartialAssignment& other) const {
  PartialAssignment out = *this;
  for (size_t k = 0; k < other.scope_.size(); ++k) {
    VariableId v = other.scope_[k];
    if (contains(v) && at(v) != other.values_[k])
      throw InvariantViolation("conflicting values for variable " +
                               std::to_string(v) + " in merge");
    out.set(v, other.values_[k]);
  }
  return out;
}

VariableId LLLInstance::add_variable(std::string name, Distribution dist,
                                     bool synthetic) {
  if (frozen_) throw InvariantViolation("instance is frozen");
  dist.validate(/*allow_zero=*/synthetic);
  vars_.push_back(Variable{std::move(name), std::move(dist), synthetic});
  return static_cast<VariableId>(vars_.size() - 1);
}

EventId LLLInstance::add_event(std::string name, std::vector<VariableId> vbl,
                               const std::vector<std::vector<Value>>& forbidden,
                               bool synthetic) {
  std::vector<uint64_t> codes;
  codes.reserve(forbidden.size());
  for (const auto& row : forbidden) {
    if (row.size() != vbl.size())
      throw InvariantViolation("forbidden tuple arity mismatch for event " +
                               name);
    uint64_t code = 0;
    uint64_t radix = 1;
    for (size_t k = 0; k < vbl.size(); ++k) {
      if (vbl[k] >= vars_.size())
        throw InvariantViolation("event " + name +
                                 " references unknown variable");
      uint64_t dom = vars_[vbl[k]].dist.size();
      if (row[k] >= dom)
        throw InvariantViolation("forbidden value out of domain in event " +
                                 name);
      code += radix * row[k];
      radix *= dom;
    }
    codes.push_back(code);
  }
  return add_event_codes(std::move(name), std::move(vbl), std::move(codes),
                         synthetic);
}

EventId LLLInstance::add_event_codes(std::string name,
                                     std::vector<VariableId> vbl,
                                     std::vector<uint64_t> forbidden,
                                     bool synthetic) {
  if (frozen_) throw InvariantViolation("instance is frozen");
  uint64_t product = 1;
  std::set<VariableId> seen;
  for (VariableId v : vbl) {
    if (v >= vars_.size())
      throw InvariantViolation("event " + name + " references unknown variable");
    if (!seen.insert(v).second)
      throw InvariantViolation("event " + name + " repeats variable " +
                               std::to_string(v));
    uint64_t dom = vars_[v].dist.size();
    if (product > (uint64_t{1} << 62) / dom)
      throw InvariantViolation("event " + name + " has oversized domain");
    product *= dom;
  }
  std::sort(forbidden.begin(), forbidden.end());
  forbidden.erase(std::unique(forbidden.begin(), forbidden.end()),
                  forbidden.end());
  if (!forbidden.empty() && forbidden.back() >= product)
    throw InvariantViolation("forbidden code out of range in event " + name);
  events_.push_back(
      BadEvent{std::move(name), std::move(vbl), std::move(forbidden), synthetic});
  return static_cast<EventId>(events_.size() - 1);
}

void LLLInstance::set_gamma(Rational gamma) {
  if (frozen_) throw InvariantViolation("instance is frozen");
  if (!(gamma > 0 && gamma <= 1))
    throw InvariantViolation("gamma must lie in (0, 1]");
  gamma_ = std::move(gamma);
}

void LLLInstance::freeze() {
  if (frozen_) return;
  std::set<std::string> names;
  for (const Variable& v : vars_) {
    if (v.name.empty() || !names.insert(v.name).second)
      throw InvariantViolation("duplicate or empty variable name: " + v.name);
  }
  names.clear();
  for (const BadEvent& e : events_) {
    if (e.name.empty() || !names.insert(e.name).second)
      throw InvariantViolation("duplicate or empty event name: " + e.name);
  }

  var_events_.assign(vars_.size(), {});
  for (EventId e = 0; e < events_.size(); ++e)
    for (VariableId v : events_[e].vbl) var_events_[v].push_back(e);

  adj_.assign(events_.size(), {});
  for (EventId e = 0; e < events_.size(); ++e) {
    std::set<EventId> nb;
    for (VariableId v : events_[e].vbl)
      for (EventId other : var_events_[v])
        if (other != e) nb.insert(other);
    adj_[e].assign(nb.begin(), nb.end());
  }

  std::ostringstream out;
  for (const Variable& v : vars_) {
    out << (v.synthetic ? "svar " : "var ") << v.name << ' ' << v.dist.size();
    for (const Rational& w : v.dist.weights) out << ' ' << to_string(w);
    out << '\n';
  }
  for (const BadEvent& e : events_) {
    out << (e.synthetic ? "sevent " : "event ") << e.name;
    for (VariableId v : e.vbl) out << ' ' << vars_[v].name;
    out << '\n';
    for (uint64_t code : e.forbidden) {
      out << "forbid " << e.name;
      uint64_t rest = code;
      for (VariableId v : e.vbl) {
        uint64_t dom = vars_[v].dist.size();
        out << ' ' << rest % dom;
        rest /= dom;
      }
      out << '\n';
    }
  }
  if (gamma_) out << "gamma " << to_string(*gamma_) << '\n';
  canonical_ = out.str();
  frozen_ = true;
}

void LLLInstance::require_frozen() const {
  if (!frozen_) throw InvariantViolation("instance must be frozen first");
}

std::optional<VariableId> LLLInstance::find_variable(
    const std::string& name) const {
  for (VariableId v = 0; v < vars_.size(); ++v)
    if (vars_[v].name == name) return v;
  return std::nullopt;
}

std::optional<EventId> LLLInstance::find_event(const std::string& name) const {
  for (EventId e = 0; e < events_.size(); ++e)
    if (events_[e].name == name) return e;
  return std::nullopt;
}

const std::vector<EventId>& LLLInstance::events_of(VariableId v) const {
  require_frozen();
  return var_events_[v];
}

const std::vector<EventId>& LLLInstance::neighbors(EventId e) const {
  require_frozen();
  return adj_[e];
}

bool LLLInstance::event_occurs(EventId e, const Assignment& y) const {
  if (y.size() != vars_.size())
    throw InvariantViolation("assignment arity mismatch");
  const BadEvent& ev = events_[e];
  uint64_t code = code_of(ev.vbl, y);
  return std::binary_search(ev.forbidden.begin(), ev.forbidden.end(), code);
}

bool LLLInstance::event_occurs(EventId e, const PartialAssignment& pa) const {
  const BadEvent& ev = events_[e];
  uint64_t code = 0;
  uint64_t radix = 1;
  for (VariableId v : ev.vbl) {
    code += radix * pa.at(v);
    radix *= vars_[v].dist.size();
  }
  return std::binary_search(ev.forbidden.begin(), ev.forbidden.end(), code);
}

uint64_t LLLInstance::enumeration_size(const std::vector<VariableId>& vars,
                                       uint64_t budget) const {
  uint64_t product = 1;
  for (VariableId v : vars) {
    uint64_t dom = vars_[v].dist.size();
    if (product > budget / dom) {
      unsigned __int128 wide = static_cast<unsigned __int128>(product) * dom;
      uint64_t reported = wide > ~uint64_t{0} ? ~uint64_t{0}
                                              : static_cast<uint64_t>(wide);
      throw BudgetExceeded(reported, budget);
    }
    product *= dom;
  }
  return product;
}

uint64_t LLLInstance::code_of(const std::vector<VariableId>& vbl,
                              const Assignment& y) const {
  uint64_t code = 0;
  uint64_t radix = 1;
  for (VariableId v : vbl) {
    code += radix * y[v];
    radix *= vars_[v].dist.size();
  }
  return code;
}

std::vector<Value> LLLInstance::decode(const std::vector<VariableId>& vbl,
                                       uint64_t code) const {
  std::vector<Value> row(vbl.size());
  for (size_t k = 0; k < vbl.size(); ++k) {
    uint64_t dom = vars_[vbl[k]].dist.size();
    row[k] = static_cast<Value>(code % dom);
    code /= dom;
  }
  return row;
}

const std::string& LLLInstance::canonical() const {
  require_frozen();
  return canonical_;
}

std::vector<std::vector<EventId>> dependency_graph(const LLLInstance& inst) {
  std::vector<std::vector<EventId>> adj(inst.num_events());
  for (EventId e = 0; e < inst.num_events(); ++e) adj[e] = inst.neighbors(e);
  return adj;
}

static void check_region(const LLLInstance& inst, const Region& region) {
  if (region.empty()) throw InvariantViolation("region must be nonempty");
  for (EventId e : region)
    if (e >= inst.num_events())
      throw InvariantViolation("region references unknown event " +
                               std::to_string(e));
  if (!std::is_sorted(region.begin(), region.end()) ||
      std::adjacent_find(region.begin(), region.end()) != region.end())
    throw InvariantViolation("region must be sorted and duplicate-free");
}

std::vector<int> event_distances(const LLLInstance& inst, const Region& region) {
  check_region(inst, region);
  std::vector<int> dist(inst.num_events(), kInfiniteRadius);
  std::deque<EventId> queue;
  for (EventId e : region) {
    dist[e] = 0;
    queue.push_back(e);
  }
  while (!queue.empty()) {
    EventId e = queue.front();
    queue.pop_front();
    for (EventId nb : inst.neighbors(e)) {
      if (dist[nb] == kInfiniteRadius) {
        dist[nb] = dist[e] + 1;
        queue.push_back(nb);
      }
    }
  }
  return dist;
}

std::vector<int> variable_depths(const LLLInstance& inst, const Region& region) {
  std::vector<int> edist = event_distances(inst, region);
  std::vector<int> depth(inst.num_variables(), kInfiniteRadius);
  for (EventId e = 0; e < inst.num_events(); ++e) {
    if (edist[e] == kInfiniteRadius) continue;
    for (VariableId v : inst.event(e).vbl)
      depth[v] = std::min(depth[v], edist[e]);
  }
  return depth;
}

Region ball(const LLLInstance& inst, const Region& region, int r) {
  if (r < 0) throw InvariantViolation("ball radius must be nonnegative");
  std::vector<int> dist = event_distances(inst, region);
  Region out;
  for (EventId e = 0; e < inst.num_events(); ++e)
    if (dist[e] <= r) out.push_back(e);
  return out;
}

std::vector<VariableId> ring(const LLLInstance& inst, const Region& region,
                             int i, int j) {
  if (i < 0 || i > j)
    throw InvariantViolation("ring span requires 0 <= i <= j");
  std::vector<int> depth = variable_depths(inst, region);
  std::vector<VariableId> out;
  for (VariableId v = 0; v < inst.num_variables(); ++v) {
    if (depth[v] >= i && (j == kInfiniteRadius || depth[v] <= j))
      out.push_back(v);
  }
  return out;
}

EventRings event_rings(const LLLInstance& inst, const Region& region, int i,
                       int j) {
  std::vector<VariableId> span = ring(inst, region, i, j);
  EventRings out;
  for (EventId e = 0; e < inst.num_events(); ++e) {
    const auto& vbl = inst.event(e).vbl;
    // Events without variables have no position in the dependency graph and
    // belong to no ring.
    if (vbl.empty()) continue;
    std::vector<VariableId> sorted_vbl(vbl);
    std::sort(sorted_vbl.begin(), sorted_vbl.end());
    if (sorted_intersects(span, sorted_vbl)) out.intersecting.push_back(e);
    if (sorted_contains(span, sorted_vbl)) out.contained.push_back(e);
  }
  return out;
}

std::vector<VariableId> region_variables(const LLLInstance& inst,
                                         const Region& region) {
  check_region(inst, region);
  std::set<VariableId> vars;
  for (EventId e : region)
    for (VariableId v : inst.event(e).vbl) vars.insert(v);
  return {vars.begin(), vars.end()};
}

LLLInstance sub_instance(const LLLInstance& inst, const Region& region) {
  check_region(inst, region);
  std::vector<VariableId> vars = region_variables(inst, region);
  std::map<VariableId, VariableId> remap;
  LLLInstance out;
  for (VariableId v : vars) {
    const Variable& var = inst.variable(v);
    remap[v] = out.add_variable(var.name, var.dist, var.synthetic);
  }
  for (EventId e : region) {
    const BadEvent& ev = inst.event(e);
    std::vector<VariableId> vbl;
    vbl.reserve(ev.vbl.size());
    for (VariableId v : ev.vbl) vbl.push_back(remap.at(v));
    out.add_event_codes(ev.name, std::move(vbl), ev.forbidden, ev.synthetic);
  }
  // A declared satisfiability bound only provably transfers to the instance
  // itself, so it is kept for the full region and dropped otherwise.
  if (inst.gamma() && region.size() == inst.num_events())
    out.set_gamma(*inst.gamma());
  out.freeze();
  return out;
}

LLLInstance extend_instance(const LLLInstance& inst,
                            const std::vector<Variable>& new_vars,
                            const std::vector<BadEvent>& new_events) {
  LLLInstance out;
  for (VariableId v = 0; v < inst.num_variables(); ++v) {
    const Variable& var = inst.variable(v);
    out.add_variable(var.name, var.dist, var.synthetic);
  }
  for (const Variable& var : new_vars)
    out.add_variable(var.name, var.dist, var.synthetic);
  for (EventId e = 0; e < inst.num_events(); ++e) {
    const BadEvent& ev = inst.event(e);
    out.add_event_codes(ev.name, ev.vbl, ev.forbidden, ev.synthetic);
  }
  for (const BadEvent& ev : new_events)
    out.add_event_codes(ev.name, ev.vbl, ev.forbidden, ev.synthetic);
  if (inst.gamma()) out.set_gamma(*inst.gamma());
  out.freeze();
  return out;
}

std::vector<VariableId> sorted_union(const std::vector<VariableId>& a,
                                     const std::vector<VariableId>& b) {
  std::vector<VariableId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<VariableId> sorted_difference(const std::vector<VariableId>& a,
                                          const std::vector<VariableId>& b) {
  std::vector<VariableId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

bool sorted_contains(const std::vector<VariableId>& haystack,
                     const std::vector<VariableId>& needle) {
  return std::includes(haystack.begin(), haystack.end(), needle.begin(),
                       needle.end());
}

bool sorted_intersects(const std::vector<VariableId>& a,
                       const std::vector<VariableId>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else
      return true;
  }
  return false;
}

}  // namespace lll
