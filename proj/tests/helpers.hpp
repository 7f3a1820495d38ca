#pragma once

// Shared instance builders for the test suite. These mirror the bundled
// instance files; tests that exercise parsing compare against the files.

#include <vector>

#include "lll/instance.hpp"

namespace lll::testing {

inline Distribution fair_bit() {
  return Distribution{{make_rational(1, 2), make_rational(1, 2)}};
}

// Two fair bits, one event forbidding (1,1).
inline LLLInstance pair_instance() {
  LLLInstance inst;
  VariableId x1 = inst.add_variable("x1", fair_bit());
  VariableId x2 = inst.add_variable("x2", fair_bit());
  inst.add_event("a", {x1, x2}, {{1, 1}});
  inst.set_gamma(make_rational(3, 4));
  inst.freeze();
  return inst;
}

// Chain of k events forbidding 11 on consecutive fair bits (k+1 variables).
inline LLLInstance chain_instance(int k) {
  LLLInstance inst;
  std::vector<VariableId> xs;
  for (int i = 1; i <= k + 1; ++i)
    xs.push_back(inst.add_variable("x" + std::to_string(i), fair_bit()));
  for (int i = 0; i < k; ++i)
    inst.add_event("e" + std::to_string(i), {xs[i], xs[i + 1]}, {{1, 1}});
  inst.freeze();
  return inst;
}

inline LLLInstance path3_instance() {
  LLLInstance inst;
  VariableId x1 = inst.add_variable("x1", fair_bit());
  VariableId x2 = inst.add_variable("x2", fair_bit());
  VariableId x3 = inst.add_variable("x3", fair_bit());
  inst.add_event("a", {x1, x2}, {{1, 1}});
  inst.add_event("b", {x2, x3}, {{1, 1}});
  inst.set_gamma(make_rational(5, 8));
  inst.freeze();
  return inst;
}

// Five fair bits around a cycle, events forbid 11 on each edge.
inline LLLInstance cycle5_instance() {
  LLLInstance inst;
  std::vector<VariableId> xs;
  for (int i = 1; i <= 5; ++i)
    xs.push_back(inst.add_variable("x" + std::to_string(i), fair_bit()));
  for (int i = 0; i < 5; ++i)
    inst.add_event("e" + std::to_string(i), {xs[i], xs[(i + 1) % 5]}, {{1, 1}});
  inst.freeze();
  return inst;
}

// Two independent copies of the pair instance.
inline LLLInstance two_component_instance() {
  LLLInstance inst;
  VariableId x1 = inst.add_variable("x1", fair_bit());
  VariableId x2 = inst.add_variable("x2", fair_bit());
  VariableId x3 = inst.add_variable("x3", fair_bit());
  VariableId x4 = inst.add_variable("x4", fair_bit());
  inst.add_event("a", {x1, x2}, {{1, 1}});
  inst.add_event("b", {x3, x4}, {{1, 1}});
  inst.freeze();
  return inst;
}

// Skewed chain whose rare boundary assignment forces a long-range
// correlation: f_i occurs iff c_{i-1}=1 and c_i=0. The anchor event e0 never
// occurs and pins the region at c0.
inline LLLInstance counterexample_instance(int k) {
  LLLInstance inst;
  Distribution skew{{make_rational(15, 16), make_rational(1, 16)}};
  std::vector<VariableId> cs;
  for (int i = 0; i <= k; ++i)
    cs.push_back(inst.add_variable("c" + std::to_string(i), skew));
  inst.add_event("e0", {cs[0]}, {});
  for (int i = 1; i <= k; ++i)
    inst.add_event("f" + std::to_string(i), {cs[i - 1], cs[i]}, {{1, 0}});
  inst.set_gamma(make_rational(1, 2));
  inst.freeze();
  return inst;
}

// Corridor fixture for full-branch sampler traces. Two channels hang off the
// anchor a0: a forcing corridor r1-r2 (r1=1 leaves r2=0 a 1/32 chance, so the
// ring fixpoint condemns (r1,s1)=(1,1) at delta=1/10) and a soft chain
// a0-s1-s2-s3-s4 that keeps the boundary filter acceptance below one. The
// deep corridor u-w plays the same trick for the growth guard: any current
// assignment with (u,w)=(1,0) grows the ball by one step. Run with
// Lambda={e0}, eps=1/2, gamma=alpha=6/25, delta=1/10 and c0=1/40,
// zeta0=9/20, eps0=4; satisfiability is 8139079/2^25, just above 6/25.
inline LLLInstance corridor_instance() {
  LLLInstance inst;
  auto bit = [](long num, long den) {
    return Distribution{
        {make_rational(den - num, den), make_rational(num, den)}};
  };
  VariableId a0 = inst.add_variable("a0", bit(1, 2));
  VariableId r1 = inst.add_variable("r1", bit(3, 8));
  VariableId r2 = inst.add_variable("r2", bit(31, 32));
  VariableId s1 = inst.add_variable("s1", bit(1, 2));
  VariableId s2 = inst.add_variable("s2", bit(1, 2));
  VariableId s3 = inst.add_variable("s3", bit(1, 2));
  VariableId s4 = inst.add_variable("s4", bit(1, 2));
  VariableId u = inst.add_variable("u", bit(1, 16));
  VariableId w = inst.add_variable("w", bit(255, 256));
  inst.add_event("e0", {a0}, {});
  inst.add_event("g1", {a0, r1}, {});
  inst.add_event("g2", {r1, r2}, {{1, 1}});
  inst.add_event("h1", {a0, s1}, {{1, 1}});
  inst.add_event("h2", {s1, s2}, {{1, 1}});
  inst.add_event("h3", {s2, s3}, {{1, 1}});
  inst.add_event("h4", {s3, s4}, {{1, 1}});
  inst.add_event("g7", {s4, u}, {});
  inst.add_event("g8", {u, w}, {{1, 1}});
  inst.set_gamma(make_rational(6, 25));
  inst.freeze();
  return inst;
}

// Two-ring fixture whose sandwich is nearly unsatisfiable: f2 allows only
// (c1,c2) = (0,3), and that row carries tiny weight. Used to drive the
// empty-ring (tail) direction of the ring fixpoint.
inline LLLInstance tail_instance() {
  LLLInstance inst;
  Distribution skew{{make_rational(15, 16), make_rational(1, 16)}};
  Distribution spike{{make_rational(61, 64), make_rational(1, 64),
                      make_rational(1, 64), make_rational(1, 64)}};
  VariableId c0 = inst.add_variable("c0", skew);
  VariableId c1 = inst.add_variable("c1", skew);
  VariableId c2 = inst.add_variable("c2", spike);
  inst.add_event("z", {c0}, {});
  inst.add_event("f1", {c0, c1}, {{1, 0}});
  inst.add_event_codes("f2", {c1, c2}, {0, 1, 2, 3, 4, 5, 7});
  inst.freeze();
  return inst;
}

}  // namespace lll::testing
