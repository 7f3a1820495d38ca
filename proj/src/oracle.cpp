#include "lll/oracle.hpp"

#include <algorithm>
#include <functional>

namespace lll {

uint64_t MarginalTable::sample(Rng& rng) const {
  Integer common = 1;
  for (const Rational& p : probs)
    mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), p.get_den().get_mpz_t());
  Integer draw = rng.below(common);
  Integer cumulative = 0;
  for (uint64_t code = 0; code < probs.size(); ++code) {
    cumulative += probs[code].get_num() * (common / probs[code].get_den());
    if (draw < cumulative) return code;
  }
  throw InvariantViolation("marginal table does not sum to 1");
}

namespace {

// Shared enumeration core: assigns free variables depth first, pruning a
// subtree as soon as some checked event is fully determined and occurs.
class Enumerator {
 public:
  Enumerator(const LLLInstance& inst,
             const std::vector<const BadEvent*>& checked,
             const PartialAssignment& fixed, uint64_t budget)
      : inst_(inst), y_(inst.num_variables(), 0) {
    std::vector<VariableId> scope;
    for (const BadEvent* e : checked) {
      std::vector<VariableId> vbl(e->vbl);
      std::sort(vbl.begin(), vbl.end());
      scope = sorted_union(scope, vbl);
    }
    free_ = sorted_difference(scope, fixed.scope());
    inst.enumeration_size(free_, budget);

    for (size_t k = 0; k < fixed.scope().size(); ++k)
      y_[fixed.scope()[k]] = fixed.values()[k];

    // Index of each free variable in enumeration order.
    std::vector<size_t> position(inst.num_variables(), SIZE_MAX);
    for (size_t k = 0; k < free_.size(); ++k) position[free_[k]] = k;
    events_at_.assign(free_.size() + 1, {});
    for (const BadEvent* e : checked) {
      size_t last = 0;  // depth after which the event is determined
      bool unknown = false;
      for (VariableId v : e->vbl) {
        if (position[v] == SIZE_MAX) {
          if (!fixed.contains(v)) unknown = true;
          continue;
        }
        last = std::max(last, position[v] + 1);
      }
      if (unknown)
        throw InvariantViolation("checked event escapes enumeration scope");
      events_at_[last].push_back(e);
    }
  }

  // Sum of nu-weights of free assignments avoiding all checked events.
  // This equals the conditional avoidance probability given `fixed`.
  Rational run() {
    Rational total = 0;
    descend(0, Rational(1), total);
    return total;
  }

 private:
  bool occurs(const BadEvent* e) const {
    uint64_t code = inst_.code_of(e->vbl, y_);
    return std::binary_search(e->forbidden.begin(), e->forbidden.end(), code);
  }

  void descend(size_t depth, const Rational& weight, Rational& total) {
    for (const BadEvent* e : events_at_[depth])
      if (occurs(e)) return;
    if (depth == free_.size()) {
      total += weight;
      return;
    }
    VariableId v = free_[depth];
    const auto& dist = inst_.variable(v).dist;
    for (Value val = 0; val < dist.size(); ++val) {
      if (dist.weights[val] == 0) continue;
      y_[v] = val;
      descend(depth + 1, weight * dist.weights[val], total);
    }
  }

  const LLLInstance& inst_;
  Assignment y_;
  std::vector<VariableId> free_;
  std::vector<std::vector<const BadEvent*>> events_at_;
};

Rational scope_weight(const LLLInstance& inst, const PartialAssignment& pa) {
  Rational w = 1;
  for (size_t k = 0; k < pa.scope().size(); ++k)
    w *= inst.variable(pa.scope()[k]).dist.weights[pa.values()[k]];
  return w;
}

void check_disjoint_scope(const PartialAssignment& tau,
                          const std::vector<VariableId>& s) {
  for (VariableId v : s)
    if (tau.contains(v))
      throw InvariantViolation("scope overlaps conditioning boundary");
}

}  // namespace

Rational probability_avoiding(const LLLInstance& inst,
                              const std::vector<const BadEvent*>& checked,
                              const PartialAssignment& fixed, uint64_t budget) {
  return Enumerator(inst, checked, fixed, budget).run();
}

std::vector<const BadEvent*> events_not_inside(
    const LLLInstance& inst, const std::vector<VariableId>& scope) {
  std::vector<const BadEvent*> out;
  for (EventId e = 0; e < inst.num_events(); ++e) {
    std::vector<VariableId> vbl(inst.event(e).vbl);
    std::sort(vbl.begin(), vbl.end());
    if (!sorted_contains(scope, vbl)) out.push_back(&inst.event(e));
  }
  return out;
}

Rational omega_weight(const LLLInstance& inst, const PartialAssignment& tau,
                      uint64_t budget) {
  Rational conditional = probability_avoiding(
      inst, events_not_inside(inst, tau.scope()), tau, budget);
  return scope_weight(inst, tau) * conditional;
}

Rational satisfiability(const LLLInstance& inst, uint64_t budget) {
  std::vector<const BadEvent*> all;
  all.reserve(inst.num_events());
  for (EventId e = 0; e < inst.num_events(); ++e) all.push_back(&inst.event(e));
  return probability_avoiding(inst, all, PartialAssignment(), budget);
}

MarginalTable marginal(const LLLInstance& inst, const PartialAssignment& tau,
                       const std::vector<VariableId>& s, uint64_t budget) {
  check_disjoint_scope(tau, s);
  if (s.empty()) throw InvariantViolation("marginal scope must be nonempty");
  if (!std::is_sorted(s.begin(), s.end()) ||
      std::adjacent_find(s.begin(), s.end()) != s.end())
    throw InvariantViolation("marginal scope must be sorted and duplicate-free");
  uint64_t count = inst.enumeration_size(s, budget);
  std::vector<const BadEvent*> checked = events_not_inside(inst, tau.scope());

  MarginalTable table;
  table.scope = s;
  table.probs.assign(count, Rational(0));
  Rational total = 0;
  for (uint64_t code = 0; code < count; ++code) {
    PartialAssignment joint = tau;
    std::vector<Value> row = inst.decode(s, code);
    Rational w = 1;
    for (size_t k = 0; k < s.size(); ++k) {
      joint.set(s[k], row[k]);
      w *= inst.variable(s[k]).dist.weights[row[k]];
    }
    if (w == 0) continue;
    table.probs[code] = w * probability_avoiding(inst, checked, joint, budget);
    total += table.probs[code];
  }
  if (total == 0)
    throw InvariantViolation("infeasible boundary: no satisfying extension");
  for (Rational& p : table.probs) p /= total;
  return table;
}

PartialAssignment sample_marginal(const LLLInstance& inst,
                                  const PartialAssignment& tau,
                                  const std::vector<VariableId>& s, Rng& rng,
                                  uint64_t budget) {
  MarginalTable table = marginal(inst, tau, s, budget);
  std::vector<Value> row = inst.decode(s, table.sample(rng));
  PartialAssignment out;
  for (size_t k = 0; k < s.size(); ++k) out.set(s[k], row[k]);
  return out;
}

Rational avoid_probability(const LLLInstance& inst, const BadEvent& extra,
                           uint64_t budget) {
  std::vector<const BadEvent*> checked;
  checked.reserve(inst.num_events() + 1);
  for (EventId e = 0; e < inst.num_events(); ++e)
    checked.push_back(&inst.event(e));
  Rational denom = probability_avoiding(inst, checked, {}, budget);
  if (denom == 0)
    throw InvariantViolation("avoid_probability on unsatisfiable instance");
  checked.push_back(&extra);
  return probability_avoiding(inst, checked, {}, budget) / denom;
}

Rational partial_sat(const LLLInstance& inst, const Region& region, int i,
                     const PartialAssignment& sigma, int j,
                     const PartialAssignment& tau, uint64_t budget) {
  if (i < 0 || i >= j) throw InvariantViolation("partial_sat requires 0 <= i < j");
  if (std::vector<VariableId>(sigma.scope()) != ring(inst, region, i, i))
    throw InvariantViolation("sigma scope must equal ring i");
  if (std::vector<VariableId>(tau.scope()) != ring(inst, region, j, j))
    throw InvariantViolation("tau scope must equal ring j");
  PartialAssignment joint = sigma.merged(tau);
  if (i + 1 > j - 1) return Rational(1);
  EventRings zone = event_rings(inst, region, i + 1, j - 1);
  std::vector<const BadEvent*> checked;
  checked.reserve(zone.intersecting.size());
  for (EventId e : zone.intersecting) checked.push_back(&inst.event(e));
  return probability_avoiding(inst, checked, joint, budget);
}

bool is_eps_correlated(const LLLInstance& inst,
                       const std::vector<VariableId>& s,
                       const std::vector<VariableId>& t, const Rational& eps,
                       uint64_t budget) {
  if (sorted_intersects(s, t))
    throw InvariantViolation("correlation sets must be disjoint");
  std::vector<VariableId> all;
  for (VariableId v = 0; v < inst.num_variables(); ++v) all.push_back(v);
  if (sorted_union(s, t) == all)
    throw InvariantViolation("correlation sets must not cover all variables");
  if (s.empty() || t.empty()) return true;

  uint64_t ns = inst.enumeration_size(s, budget);
  uint64_t nt = inst.enumeration_size(t, budget);
  std::vector<std::vector<Rational>> w(ns, std::vector<Rational>(nt));
  for (uint64_t cs = 0; cs < ns; ++cs) {
    std::vector<Value> srow = inst.decode(s, cs);
    for (uint64_t ct = 0; ct < nt; ++ct) {
      std::vector<Value> trow = inst.decode(t, ct);
      PartialAssignment joint;
      for (size_t k = 0; k < s.size(); ++k) joint.set(s[k], srow[k]);
      for (size_t k = 0; k < t.size(); ++k) joint.set(t[k], trow[k]);
      w[cs][ct] = omega_weight(inst, joint, budget);
    }
  }
  Rational bound = Rational(1) + eps;
  for (uint64_t s1 = 0; s1 < ns; ++s1)
    for (uint64_t s2 = 0; s2 < ns; ++s2)
      for (uint64_t t1 = 0; t1 < nt; ++t1)
        for (uint64_t t2 = 0; t2 < nt; ++t2)
          if (w[s1][t1] * w[s2][t2] > bound * w[s1][t2] * w[s2][t1])
            return false;
  return true;
}

MarginalTable exact_distribution(const LLLInstance& inst, uint64_t budget) {
  std::vector<VariableId> all;
  for (VariableId v = 0; v < inst.num_variables(); ++v) all.push_back(v);
  if (all.empty()) throw InvariantViolation("instance has no variables");
  // Variable-free events are invisible to the boundary semantics of
  // marginal(); an always-occurring one makes mu undefined, so reject here.
  for (EventId e = 0; e < inst.num_events(); ++e) {
    const BadEvent& ev = inst.event(e);
    if (ev.vbl.empty() && !ev.forbidden.empty())
      throw InvariantViolation("instance is unsatisfiable: event " + ev.name +
                               " always occurs");
  }
  return marginal(inst, PartialAssignment(), all, budget);
}

}  // namespace lll
