#pragma once

#include <vector>

#include "lll/instance.hpp"
#include "lll/rng.hpp"

namespace lll {

// Hard ceiling on the number of assignments any single exact computation may
// enumerate; exceeding it raises BudgetExceeded rather than degrading.
inline constexpr uint64_t kDefaultBudget = uint64_t{1} << 24;

// Exact distribution over a sorted variable scope, dense by mixed-radix code.
struct MarginalTable {
  std::vector<VariableId> scope;
  std::vector<Rational> probs;

  // Draws a code. Consumes one uniform integer below the common denominator
  // of all entries, so identical tables consume identical randomness.
  uint64_t sample(Rng& rng) const;
};

// Pr over X ~ nu that X avoids every listed event, conditioned on the fixed
// partial assignment. Only variables of checked events outside the fixed
// scope are enumerated.
Rational probability_avoiding(const LLLInstance& inst,
                              const std::vector<const BadEvent*>& checked,
                              const PartialAssignment& fixed,
                              uint64_t budget = kDefaultBudget);

// Events whose variable set is not contained in the given sorted scope.
// Events without variables are trivially contained and never selected.
std::vector<const BadEvent*> events_not_inside(
    const LLLInstance& inst, const std::vector<VariableId>& scope);

// nu(Omega^tau): weight of assignments agreeing with tau that avoid every
// event reaching outside scope(tau). Events inside the scope are not checked.
Rational omega_weight(const LLLInstance& inst, const PartialAssignment& tau,
                      uint64_t budget = kDefaultBudget);

// nu(Omega) = Pr[X avoids every event].
Rational satisfiability(const LLLInstance& inst,
                        uint64_t budget = kDefaultBudget);

// Conditional marginal of X_S given the boundary tau, i.e. the S-marginal of
// nu conditioned on avoiding every event reaching outside scope(tau).
// S must be disjoint from scope(tau); an infeasible boundary is an error.
MarginalTable marginal(const LLLInstance& inst, const PartialAssignment& tau,
                       const std::vector<VariableId>& s,
                       uint64_t budget = kDefaultBudget);

PartialAssignment sample_marginal(const LLLInstance& inst,
                                  const PartialAssignment& tau,
                                  const std::vector<VariableId>& s, Rng& rng,
                                  uint64_t budget = kDefaultBudget);

// Pr over X ~ mu (nu conditioned on avoiding all events) that X also avoids
// the extra event. The instance must be satisfiable.
Rational avoid_probability(const LLLInstance& inst, const BadEvent& extra,
                           uint64_t budget = kDefaultBudget);

// Pr[X avoids every event meeting rings i+1..j-1 of the region | X fixed to
// sigma on ring i and tau on ring j]. Scopes must match the rings exactly.
Rational partial_sat(const LLLInstance& inst, const Region& region, int i,
                     const PartialAssignment& sigma, int j,
                     const PartialAssignment& tau,
                     uint64_t budget = kDefaultBudget);

// Definition check over all boundary pairs: nu(Omega^{s1 t1}) nu(Omega^{s2 t2})
// <= (1+eps) nu(Omega^{s1 t2}) nu(Omega^{s2 t1}). Trivially true when either
// set is empty; requires S, T disjoint with S u T a proper subset of U.
bool is_eps_correlated(const LLLInstance& inst,
                       const std::vector<VariableId>& s,
                       const std::vector<VariableId>& t, const Rational& eps,
                       uint64_t budget = kDefaultBudget);

// mu itself: the distribution over full assignments conditioned on avoiding
// every event. Instance must be satisfiable.
MarginalTable exact_distribution(const LLLInstance& inst,
                                 uint64_t budget = kDefaultBudget);

}  // namespace lll
