#pragma once

#include <vector>

#include "lll/augment.hpp"
#include "lll/instance.hpp"
#include "lll/oracle.hpp"
#include "lll/rng.hpp"

namespace lll {

// The uniform rho in [0,1), realized lazily. Bits are drawn only when a
// comparison cannot be decided from the current dyadic interval
// [lo, lo + 2^-bits); repeated comparisons stay mutually consistent because
// the interval only ever shrinks.
class LazyUniform {
 public:
  const std::vector<bool>& bits() const { return bits_; }
  const Rational& lo() const { return lo_; }
  Rational hi() const { return lo_ + width_; }

 private:
  friend bool lazy_compare(LazyUniform& rho, const Rational& t, Rng& rng);
  std::vector<bool> bits_;
  Rational lo_{0};
  Rational width_{1};
};

// True iff rho < t, for a threshold 0 <= t <= 1. Consumes the minimal number
// of additional bits needed to separate rho's interval from t.
bool lazy_compare(LazyUniform& rho, const Rational& t, Rng& rng);

struct SamplerConfig {
  Rational c0 = Rational(1);              // scales every ell0 radius
  Rational eps0 = make_rational(1, 8);    // ring-pair gap fed to augment
  Rational zeta0 = make_rational(1, 64);  // decay rate of the indecision zone
  int d = 2;                              // cluster radius multiplier
  CheckMode mode = CheckMode::estimate;
  uint64_t budget = kDefaultBudget;
  SharedCache* cache = nullptr;  // shared across runs; may be null

  void validate() const;
};

enum class Branch { resample, recurse_hat, recurse_complement };

// One node per sampler activation.
struct TraceNode {
  Region lambda;
  Rational eps;
  Rational gamma;
  Rational delta;
  Rational alpha;
  int ell = 0;          // ell0(eps, gamma, delta)
  int iterations = 1;   // value of i when the branch was decided
  Branch branch = Branch::resample;
  Interval interval;    // running [L, R] at the decision
  std::vector<Interval> refinements;  // running [L, R] after each iteration
  Rational acceptance;  // filter acceptance probability; not on the R branch
  int radius = 0;       // final r or s; 0 when the filter succeeded
  int growth_steps = 0;
  uint64_t potential = 0;  // value returned by this activation
  std::vector<TraceNode> children;  // the recursive call, if any
};

// Accumulates across top-level calls when reused.
struct ExecutionTrace {
  uint64_t potential = 0;
  std::vector<TraceNode> calls;
  uint64_t words = 0;  // rng words consumed
  uint64_t bits = 0;   // rng bits consumed
};

// Exact acceptance probability f(Y_T) / max f of the Bayes filter around the
// region, where S = vbl(lambda), T = U \ vbl(B_ell(lambda)) in the geometry
// of `base`, and f(tau) = nu(Omega_hat^tau) / nu(Omega_hat^{Y_S and tau}).
// `hat` is `base` plus the augmenting event; pass the same instance twice to
// filter without augmentation. f depends on tau only through the ring
// R_{ell+1}(lambda), so only B_{ell+1}(lambda) is enumerated.
Rational filter_acceptance(const LLLInstance& base, const LLLInstance& hat,
                           const Region& lambda, const Assignment& y, int ell,
                           uint64_t budget = kDefaultBudget);

// Draws the filter decision: true with probability filter_acceptance(...).
bool bayes_filter(const LLLInstance& base, const LLLInstance& hat,
                  const Region& lambda, const Assignment& y, int ell, Rng& rng,
                  uint64_t budget = kDefaultBudget);

// Unaugmented form.
inline bool bayes_filter(const LLLInstance& inst, const Region& lambda,
                         const Assignment& y, int ell, Rng& rng,
                         uint64_t budget = kDefaultBudget) {
  return bayes_filter(inst, inst, lambda, y, ell, rng, budget);
}

// Filter at radius 1 and resample everything inside on success, otherwise
// widen the region to B_2(lambda) and retry. Correct whenever (Y, lambda)
// satisfies the conditional Gibbs property; correlation decay only speeds it
// up. In oracle-check mode the feasibility part of that property is
// asserted.
void recursive_sampling_with_decay(Assignment& y, const LLLInstance& inst,
                                   const Region& lambda, Rng& rng,
                                   const SamplerConfig& cfg = {});

// The full recursive sampler. Builds the augmenting event around lambda,
// brackets P = Pr[A_lambda avoided] by ever tighter intervals, and uses a
// lazily drawn uniform to commit to the conditioned instance including or
// excluding A_lambda; the zone of indecision between the brackets triggers
// refinement. Requires 0 < eps <= 1/2, 0 < alpha <= gamma < 1 and
// 0 < delta <= zeta0 * alpha, plus the augmented conditional Gibbs invariant
// (feasibility asserted in oracle-check mode). On return y follows mu_I; the
// returned potential counts ball growths, indecisions, and the second-branch
// surcharges.
uint64_t recursive_sampling(Assignment& y, const LLLInstance& inst,
                            const Region& lambda, const Rational& eps,
                            const Rational& gamma, const Rational& delta,
                            const Rational& alpha, Rng& rng,
                            const SamplerConfig& cfg = {},
                            ExecutionTrace* trace = nullptr);

}  // namespace lll
