#pragma once

#include <optional>

#include "lll/cache.hpp"
#include "lll/instance.hpp"
#include "lll/oracle.hpp"

namespace lll {

inline constexpr VariableId kNoVariable = ~VariableId{0};
inline constexpr EventId kNoEvent = ~EventId{0};

// Radius prescribed by the decay analysis: the smallest shell depth at which
// an augmented boundary of quality (eps, gamma, delta) exists. All logs are
// base 2; c0 scales the whole expression.
int ell0(const Rational& eps, const Rational& gamma, const Rational& delta,
         const Rational& c0 = Rational(1));

struct AugmentParams {
  Rational eps;
  Rational gamma;
  Rational delta;
  int ell = 0;
  Rational eps0 = make_rational(1, 8);
};

// The synthetic boundary event produced by the ring fixpoint. Occurs on an
// assignment of vbl() iff every contained event is avoided and either some
// nonempty ring's assignment is in that ring's forbidden set, or some empty
// ring acquired the (trivial) empty assignment during the fixpoint.
class AugmentingEvent {
 public:
  const Region& lambda() const { return lambda_; }
  const AugmentParams& params() const { return params_; }
  // Number of nonempty rings covered, min(ell, last nonempty ring index).
  int head_rings() const { return static_cast<int>(ring_vars_.size()); }
  const std::vector<VariableId>& ring_vars(int i) const {
    return ring_vars_[static_cast<size_t>(i - 1)];
  }
  const std::vector<uint64_t>& forbidden_in_ring(int i) const {
    return forbidden_[static_cast<size_t>(i - 1)];
  }
  // Smallest empty-ring index j whose F_j picked up the empty assignment;
  // when set, the event reduces to "all contained events avoided".
  std::optional<int> tail_trigger() const { return tail_trigger_; }
  const Region& contained_events() const { return contained_; }
  const std::vector<VariableId>& vbl() const { return compiled_.vbl; }
  const BadEvent& compiled() const { return compiled_; }
  const Rational& occurrence_probability() const { return probability_; }
  bool never_occurs() const { return compiled_.forbidden.empty(); }
  bool occurs(const LLLInstance& inst, const Assignment& y) const;

 private:
  friend AugmentingEvent augment(const LLLInstance&, const Region&,
                                 const AugmentParams&, uint64_t);
  Region lambda_;
  AugmentParams params_;
  std::vector<std::vector<VariableId>> ring_vars_;  // rings 1..head
  std::vector<std::vector<uint64_t>> forbidden_;    // F_i, sorted codes
  std::optional<int> tail_trigger_;
  Region contained_;
  BadEvent compiled_;
  Rational probability_;
};

// Ring fixpoint construction. Scans ring pairs (i, j) lexicographically and
// candidate assignments in code order, accumulating forbidden boundary
// assignments whose expected sandwich-avoidance falls below delta/(2 ell),
// until a full pass adds nothing. Deterministic. The occurrence probability
// is computed exactly and checked against delta.
AugmentingEvent augment(const LLLInstance& inst, const Region& lambda,
                        const AugmentParams& params,
                        uint64_t budget = kDefaultBudget);

// Memoized variant; cache may be null.
std::shared_ptr<const AugmentingEvent> cached_augment(
    SharedCache* cache, const LLLInstance& inst, const Region& lambda,
    const AugmentParams& params, uint64_t budget = kDefaultBudget);

struct Interval {
  Rational lo;
  Rational hi;
};

enum class CheckMode { estimate, oracle_check };

struct EstimateResult {
  Interval interval;
  Rational phat;  // center before clamping
  int ell = 0;    // shell depth used
  bool exact = false;
};

// Two-sided estimate of Pr over mu_I that the extra event is avoided,
// computed from the ball of depth ell+1 around the region. Width 4 eps^k,
// clamped to [0,1]. When the ball saturates the region's component and the
// event lives inside it, the estimate is exact and the interval collapses.
// In oracle_check mode the true probability is computed globally and its
// containment asserted.
EstimateResult estimate_interval(const LLLInstance& inst, const Region& lambda,
                                 const BadEvent& extra, const Rational& eps,
                                 int k, const Rational& alpha1,
                                 const Rational& alpha2, CheckMode mode,
                                 const Rational& eps0 = make_rational(1, 8),
                                 const Rational& c0 = Rational(1),
                                 uint64_t budget = kDefaultBudget,
                                 SharedCache* cache = nullptr);

// Boundary substitution: compresses everything inside the depth-ell ball
// around the region, given its boundary assignment sigma, into one synthetic
// variable beta plus one synthetic event kappa on R_{ell+1} u {beta}.
struct Substitution {
  Region lambda;
  int ell = 0;
  std::vector<VariableId> ring_r;       // R_{ell+1}, original ids
  std::vector<Rational> p_table;        // P(pi) by code over ring_r
  Distribution nu_beta;                 // law of beta over the same codes
  std::vector<VariableId> removed_vars;  // vbl(B_ell), original ids
  Region removed_events;                 // B_{ell+1}, original ids
  LLLInstance instance;                  // the substituted instance
  VariableId beta = kNoVariable;         // in instance
  EventId kappa = kNoEvent;              // in instance
  std::vector<VariableId> var_map;       // instance var -> original id
  std::vector<EventId> event_map;        // instance event -> original id
};

Substitution substitute(const LLLInstance& inst, const Region& lambda,
                        const PartialAssignment& sigma,
                        const AugmentParams& params,
                        uint64_t budget = kDefaultBudget);

}  // namespace lll
