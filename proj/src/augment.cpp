#include "lll/augment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace lll {

namespace {

// ceil(a * log2(b)) for rational a > 0 and integer b >= 2, exact. Uses the
// identity ceil(x/q) = ceil(ceil(x)/q) for positive integer q.
long ceil_mul_log2(const Rational& a, const Integer& b) {
  const Integer& pa = a.get_num();
  const Integer& qa = a.get_den();
  Integer bpow;
  mpz_pow_ui(bpow.get_mpz_t(), b.get_mpz_t(), pa.get_ui());
  long k = ceil_log2(Rational(bpow));
  Integer t = (Integer(k) + qa - 1) / qa;
  return t.get_si();
}

bool fits_exact_pow(const Rational& a, const Integer& b) {
  if (!a.get_num().fits_ulong_p() || !a.get_den().fits_slong_p()) return false;
  // Cap the intermediate power at ~10^6 bits.
  return mpz_sizeinbase(b.get_mpz_t(), 2) * a.get_num().get_ui() < 8000000;
}

PartialAssignment pa_from_code(const LLLInstance& inst,
                               const std::vector<VariableId>& vars,
                               uint64_t code) {
  PartialAssignment out;
  std::vector<Value> row = inst.decode(vars, code);
  for (size_t k = 0; k < vars.size(); ++k) out.set(vars[k], row[k]);
  return out;
}

}  // namespace

int ell0(const Rational& eps, const Rational& gamma, const Rational& delta,
         const Rational& c0) {
  if (!(eps > 0 && eps < 1) || !(gamma > 0 && gamma < 1))
    throw InvariantViolation("ell0 requires eps, gamma in (0, 1)");
  if (!(delta > 0 && delta < gamma / 2))
    throw InvariantViolation("ell0 requires 0 < delta < gamma/2");
  if (!(c0 > 0)) throw InvariantViolation("ell0 requires c0 > 0");

  long l1 = 0, l2 = 0, l3 = 0;
  bool exact = exact_log2(Rational(2) / eps, &l1) &&
               exact_log2(Rational(2) / gamma, &l2) &&
               exact_log2(Rational(1) / delta, &l3);
  if (exact) {
    Integer prod = Integer(l1) * Integer(l2) * Integer(l3);
    Rational a = c0 * Rational(prod);
    Integer b = 2 * prod;
    if (fits_exact_pow(a, b)) {
      long t = ceil_mul_log2(a, b);
      if (t < 1) throw InvariantViolation("ell0 collapsed below 1");
      return static_cast<int>(t);
    }
  }
  // Non-power-of-two arguments: the value is irrational, so a long double
  // evaluation with a relative upward nudge rounds stably.
  long double x1 = log2l(2.0L / static_cast<long double>(eps.get_d()));
  long double x2 = log2l(2.0L / static_cast<long double>(gamma.get_d()));
  long double x3 = log2l(1.0L / static_cast<long double>(delta.get_d()));
  long double base = x1 * x2 * x3;
  long double val =
      static_cast<long double>(c0.get_d()) * base * log2l(2.0L * base);
  long t = static_cast<long>(ceill(val * (1.0L + 1e-12L)));
  if (t < 1) throw InvariantViolation("ell0 collapsed below 1");
  return static_cast<int>(t);
}

bool AugmentingEvent::occurs(const LLLInstance& inst,
                             const Assignment& y) const {
  if (compiled_.forbidden.empty()) return false;
  uint64_t code = inst.code_of(compiled_.vbl, y);
  return std::binary_search(compiled_.forbidden.begin(),
                            compiled_.forbidden.end(), code);
}

AugmentingEvent augment(const LLLInstance& inst, const Region& lambda,
                        const AugmentParams& params, uint64_t budget) {
  if (!(params.eps > 0 && params.eps < 1) ||
      !(params.gamma > 0 && params.gamma < 1) ||
      !(params.delta > 0 && params.delta < 1))
    throw InvariantViolation("augment requires eps, gamma, delta in (0, 1)");
  if (params.ell < 1) throw InvariantViolation("augment requires ell >= 1");
  if (!(params.eps0 > 0)) throw InvariantViolation("augment requires eps0 > 0");

  const int ell = params.ell;
  std::vector<int> depths = variable_depths(inst, lambda);

  AugmentingEvent out;
  out.lambda_ = lambda;
  out.params_ = params;

  // Nonempty rings form a prefix: once a ring is empty the ball has stopped
  // growing, so all deeper rings are empty too.
  for (int r = 1; r <= ell; ++r) {
    std::vector<VariableId> vars;
    for (VariableId v = 0; v < inst.num_variables(); ++v)
      if (depths[v] == r) vars.push_back(v);
    if (vars.empty()) break;
    out.ring_vars_.push_back(std::move(vars));
  }
  const int head = static_cast<int>(out.ring_vars_.size());

  for (EventId e = 0; e < inst.num_events(); ++e) {
    const auto& vbl = inst.event(e).vbl;
    if (vbl.empty()) continue;
    bool inside = true;
    for (VariableId v : vbl)
      if (depths[v] < 1 || depths[v] > ell) inside = false;
    if (inside) out.contained_.push_back(e);
  }

  std::vector<VariableId> lam_vbl;
  for (VariableId v = 0; v < inst.num_variables(); ++v)
    if (depths[v] >= 1 && depths[v] != kInfiniteRadius && depths[v] <= ell)
      lam_vbl.push_back(v);

  out.compiled_ = BadEvent{"lambda", lam_vbl, {}, /*synthetic=*/true};
  out.probability_ = 0;
  if (head == 0) return out;  // empty ring system: the event never occurs

  // Smallest integer ring gap exceeding D = (1/eps0) * log2(ell/delta):
  // gap > D  <=>  2^(gap*p) * b^q > a^q  for eps0 = p/q and ell/delta = a/b.
  int min_gap = ell;  // sentinel: no admissible pair
  {
    Rational ratio = Rational(ell) / params.delta;
    unsigned long p = params.eps0.get_num().fits_ulong_p()
                          ? params.eps0.get_num().get_ui()
                          : 0;
    unsigned long q = params.eps0.get_den().fits_ulong_p()
                          ? params.eps0.get_den().get_ui()
                          : 0;
    if (p == 0 || q == 0)
      throw InvariantViolation("augment eps0 out of supported range");
    Integer a_pow, b_pow;
    mpz_pow_ui(a_pow.get_mpz_t(), ratio.get_num().get_mpz_t(), q);
    mpz_pow_ui(b_pow.get_mpz_t(), ratio.get_den().get_mpz_t(), q);
    Integer lhs = b_pow;
    for (int gap = 1; gap < ell; ++gap) {
      mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), p);
      if (lhs > a_pow) {
        min_gap = gap;
        break;
      }
    }
  }

  const Rational threshold = params.delta / (2 * ell);

  // Event positions for sandwich zones: variable depths of an event span at
  // most two consecutive values, but we track the exact range.
  std::vector<std::pair<int, int>> span(inst.num_events(), {kInfiniteRadius, -1});
  for (EventId e = 0; e < inst.num_events(); ++e) {
    for (VariableId v : inst.event(e).vbl) {
      span[e].first = std::min(span[e].first, depths[v]);
      span[e].second = std::max(span[e].second, depths[v]);
    }
  }

  std::vector<std::set<uint64_t>> forbidden(head);
  std::optional<int> tail_trigger;

  // Expected sandwich avoidance for the pair (i, j) conditioned on the fixed
  // boundary: events of the accumulated instance meeting rings i+1..j-1,
  // which adds the current ring events of the sandwiched rings.
  auto pair_probability = [&](int i, int j, const PartialAssignment& fixed) {
    std::vector<BadEvent> ring_events;
    std::vector<const BadEvent*> checked;
    for (EventId e = 0; e < inst.num_events(); ++e) {
      if (span[e].second < 0) continue;
      if (span[e].first <= j - 1 && span[e].second >= i + 1)
        checked.push_back(&inst.event(e));
    }
    for (int mm = i + 1; mm <= std::min(j - 1, head); ++mm) {
      if (forbidden[mm - 1].empty()) continue;
      ring_events.push_back(BadEvent{
          "ring", out.ring_vars_[mm - 1],
          {forbidden[mm - 1].begin(), forbidden[mm - 1].end()}, true});
    }
    for (const BadEvent& e : ring_events) checked.push_back(&e);
    return probability_avoiding(inst, checked, fixed, budget);
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 1; i <= head; ++i) {
      uint64_t count_i = inst.enumeration_size(out.ring_vars_[i - 1], budget);
      for (int j = i + min_gap; j <= ell; ++j) {
        if (j > head && j != std::max(head + 1, i + min_gap))
          continue;  // all empty-ring partners beyond the first are identical
        // Source-ring candidates first, then target-ring ones, by code.
        for (uint64_t code = 0; code < count_i; ++code) {
          if (forbidden[i - 1].count(code)) continue;
          PartialAssignment sigma =
              pa_from_code(inst, out.ring_vars_[i - 1], code);
          if (pair_probability(i, j, sigma) < threshold) {
            forbidden[i - 1].insert(code);
            changed = true;
          }
        }
        if (j <= head) {
          uint64_t count_j = inst.enumeration_size(out.ring_vars_[j - 1], budget);
          for (uint64_t code = 0; code < count_j; ++code) {
            if (forbidden[j - 1].count(code)) continue;
            PartialAssignment tau =
                pa_from_code(inst, out.ring_vars_[j - 1], code);
            if (pair_probability(i, j, tau) < threshold) {
              forbidden[j - 1].insert(code);
              changed = true;
            }
          }
        } else if (!tail_trigger || j < *tail_trigger) {
          // Empty target ring: the only candidate is the empty assignment,
          // and its expectation is unconditioned.
          if (pair_probability(i, j, PartialAssignment()) < threshold) {
            tail_trigger = j;
            changed = true;
          }
        }
      }
    }
  }

  out.forbidden_.resize(head);
  for (int i = 1; i <= head; ++i)
    out.forbidden_[i - 1] = {forbidden[i - 1].begin(), forbidden[i - 1].end()};
  out.tail_trigger_ = tail_trigger;

  // Compile the extensional form over vbl(lambda) and the exact occurrence
  // probability under nu.
  uint64_t total = inst.enumeration_size(lam_vbl, budget);
  for (uint64_t code = 0; code < total; ++code) {
    PartialAssignment sigma = pa_from_code(inst, lam_vbl, code);
    bool contained_ok = true;
    for (EventId e : out.contained_) {
      if (inst.event_occurs(e, sigma)) {
        contained_ok = false;
        break;
      }
    }
    if (!contained_ok) continue;
    bool hit = tail_trigger.has_value();
    for (int i = 1; !hit && i <= head; ++i) {
      uint64_t ring_code = 0, radix = 1;
      for (VariableId v : out.ring_vars_[i - 1]) {
        ring_code += radix * sigma.at(v);
        radix *= inst.domain_size(v);
      }
      if (forbidden[i - 1].count(ring_code)) hit = true;
    }
    if (!hit) continue;
    out.compiled_.forbidden.push_back(code);
    Rational w = 1;
    std::vector<Value> row = inst.decode(lam_vbl, code);
    for (size_t k = 0; k < lam_vbl.size(); ++k)
      w *= inst.variable(lam_vbl[k]).dist.weights[row[k]];
    out.probability_ += w;
  }
  if (out.probability_ > params.delta)
    throw InvariantViolation(
        "augmenting event exceeds its rarity bound: probability " +
        to_string(out.probability_) + " > delta " + to_string(params.delta));
  return out;
}

std::shared_ptr<const AugmentingEvent> cached_augment(
    SharedCache* cache, const LLLInstance& inst, const Region& lambda,
    const AugmentParams& params, uint64_t budget) {
  if (!cache)
    return std::make_shared<const AugmentingEvent>(
        augment(inst, lambda, params, budget));
  std::ostringstream key;
  key << "aug|" << to_string(params.eps) << '|' << to_string(params.gamma)
      << '|' << to_string(params.delta) << '|' << params.ell << '|'
      << to_string(params.eps0) << '|';
  for (EventId e : lambda) key << e << ',';
  key << '|' << inst.canonical();
  return cache->get_or_compute<AugmentingEvent>(
      key.str(), [&] { return augment(inst, lambda, params, budget); });
}

EstimateResult estimate_interval(const LLLInstance& inst, const Region& lambda,
                                 const BadEvent& extra, const Rational& eps,
                                 int k, const Rational& alpha1,
                                 const Rational& alpha2, CheckMode mode,
                                 const Rational& eps0, const Rational& c0,
                                 uint64_t budget, SharedCache* cache) {
  if (!(eps > 0 && eps < make_rational(1, 2)))
    throw InvariantViolation("estimate_interval requires eps in (0, 1/2)");
  if (k < 1) throw InvariantViolation("estimate_interval requires k >= 1");
  if (!(alpha1 > 0 && alpha1 <= alpha2 && alpha2 < 1))
    throw InvariantViolation("estimate_interval requires 0 < alpha1 <= alpha2 < 1");

  Rational epsk = pow_rational(eps, static_cast<unsigned long>(k));
  Rational delta_w = alpha1 * epsk;
  int ell = ell0(epsk, alpha2, delta_w, c0);
  AugmentParams wparams{epsk, alpha2, delta_w, ell, eps0};
  auto aug = cached_augment(cache, inst, lambda, wparams, budget);

  std::vector<int> depths = variable_depths(inst, lambda);
  std::vector<VariableId> inner;
  for (VariableId v = 0; v < inst.num_variables(); ++v)
    if (depths[v] <= ell) inner.push_back(v);

  // Events reaching into the ball's variables; everything else belongs to
  // the far side T and is left unchecked.
  std::vector<const BadEvent*> checked;
  for (EventId e = 0; e < inst.num_events(); ++e) {
    bool reaches = false;
    for (VariableId v : inst.event(e).vbl)
      if (depths[v] <= ell) reaches = true;
    if (reaches) checked.push_back(&inst.event(e));
  }
  if (!aug->never_occurs()) checked.push_back(&aug->compiled());

  Rational den = probability_avoiding(inst, checked, {}, budget);
  if (den == 0)
    throw InvariantViolation("estimate_interval: boundary weight vanished");
  checked.push_back(&extra);
  Rational num = probability_avoiding(inst, checked, {}, budget);
  Rational phat = num / den;

  // When the ball already saturates the component, the extra event lives
  // inside it, and the augmenting event vanishes, the conditioned measure
  // factorizes over components and the quotient above is the true
  // probability, not an estimate.
  std::vector<int> edist = event_distances(inst, lambda);
  bool saturated = true;
  for (EventId e = 0; e < inst.num_events(); ++e)
    if (edist[e] != kInfiniteRadius && edist[e] > ell) saturated = false;
  std::vector<VariableId> extra_vbl(extra.vbl);
  std::sort(extra_vbl.begin(), extra_vbl.end());
  bool exact =
      saturated && aug->never_occurs() && sorted_contains(inner, extra_vbl);

  EstimateResult result;
  result.phat = phat;
  result.ell = ell;
  result.exact = exact;
  if (exact) {
    result.interval = {phat, phat};
  } else {
    Rational lo = phat - 2 * epsk;
    Rational hi = phat + 2 * epsk;
    result.interval = {lo < 0 ? Rational(0) : lo, hi > 1 ? Rational(1) : hi};
  }

  if (mode == CheckMode::oracle_check) {
    Rational truth = avoid_probability(inst, extra, budget);
    if (truth < result.interval.lo || truth > result.interval.hi)
      throw InvariantViolation("estimate interval missed the true value: " +
                               to_string(truth) + " outside [" +
                               to_string(result.interval.lo) + ", " +
                               to_string(result.interval.hi) + "]");
    if (satisfiability(inst, budget) < alpha1)
      throw InvariantViolation("estimate precondition: instance below alpha1");
    Region rest;
    for (EventId e = 0; e < inst.num_events(); ++e)
      if (!std::binary_search(lambda.begin(), lambda.end(), e))
        rest.push_back(e);
    if (!rest.empty() &&
        satisfiability(sub_instance(inst, rest), budget) < alpha2)
      throw InvariantViolation(
          "estimate precondition: complement below alpha2");
  }
  return result;
}

namespace {

std::string unique_var_name(const LLLInstance& inst, const std::string& base) {
  if (!inst.find_variable(base)) return base;
  for (int k = 1;; ++k) {
    std::string name = base + "@" + std::to_string(k);
    if (!inst.find_variable(name)) return name;
  }
}

std::string unique_event_name(const LLLInstance& inst, const std::string& base) {
  if (!inst.find_event(base)) return base;
  for (int k = 1;; ++k) {
    std::string name = base + "@" + std::to_string(k);
    if (!inst.find_event(name)) return name;
  }
}

}  // namespace

Substitution substitute(const LLLInstance& inst, const Region& lambda,
                        const PartialAssignment& sigma,
                        const AugmentParams& params, uint64_t budget) {
  std::vector<int> depths = variable_depths(inst, lambda);
  std::vector<VariableId> s_vars;
  for (VariableId v = 0; v < inst.num_variables(); ++v)
    if (depths[v] == 0) s_vars.push_back(v);
  if (sigma.scope() != s_vars)
    throw InvariantViolation("substitute: sigma must cover exactly vbl(region)");

  const int ell = params.ell;
  AugmentingEvent aug = augment(inst, lambda, params, budget);

  Substitution sub;
  sub.lambda = lambda;
  sub.ell = ell;
  for (VariableId v = 0; v < inst.num_variables(); ++v) {
    if (depths[v] <= ell) sub.removed_vars.push_back(v);
    if (depths[v] == ell + 1) sub.ring_r.push_back(v);
  }

  // Events straddling the shell: those reaching a variable of depth 1..ell,
  // plus the augmenting event itself.
  std::vector<const BadEvent*> checked;
  for (EventId e = 0; e < inst.num_events(); ++e) {
    bool straddles = false;
    for (VariableId v : inst.event(e).vbl)
      if (depths[v] >= 1 && depths[v] <= ell) straddles = true;
    if (straddles) checked.push_back(&inst.event(e));
  }
  if (!aug.never_occurs()) checked.push_back(&aug.compiled());

  uint64_t m = inst.enumeration_size(sub.ring_r, budget);
  if (m > budget / (m ? m : 1))
    throw BudgetExceeded(m * m, budget);
  sub.p_table.reserve(m);
  for (uint64_t code = 0; code < m; ++code) {
    PartialAssignment joint = sigma;
    std::vector<Value> row = inst.decode(sub.ring_r, code);
    for (size_t t = 0; t < sub.ring_r.size(); ++t)
      joint.set(sub.ring_r[t], row[t]);
    sub.p_table.push_back(probability_avoiding(inst, checked, joint, budget));
  }

  // Order codes by P ascending, ties by code; the cumulative-difference
  // construction turns the sorted P values into a distribution for beta.
  std::vector<uint64_t> order(m);
  for (uint64_t c = 0; c < m; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](uint64_t a, uint64_t b) {
    return sub.p_table[a] < sub.p_table[b];
  });
  const Rational& pmax = sub.p_table[order.back()];
  if (pmax == 0)
    throw InvariantViolation("substitute: no feasible extension of sigma");
  sub.nu_beta.weights.assign(m, Rational(0));
  sub.nu_beta.weights[order[0]] = sub.p_table[order[0]] / pmax;
  for (uint64_t t = 1; t < m; ++t)
    sub.nu_beta.weights[order[t]] =
        (sub.p_table[order[t]] - sub.p_table[order[t - 1]]) / pmax;

  sub.removed_events = ball(inst, lambda, ell + 1);

  // Assemble the substituted instance: survivors keep their ascending order,
  // then beta; surviving events never touch removed variables.
  LLLInstance out;
  std::vector<VariableId> remap(inst.num_variables(), kNoVariable);
  for (VariableId v = 0; v < inst.num_variables(); ++v) {
    if (depths[v] <= ell) continue;
    const Variable& var = inst.variable(v);
    VariableId nv = out.add_variable(var.name, var.dist, var.synthetic);
    remap[v] = nv;
    sub.var_map.push_back(v);
  }
  sub.beta = out.add_variable(unique_var_name(out, "beta"), sub.nu_beta,
                              /*synthetic=*/true);
  sub.var_map.push_back(kNoVariable);

  for (EventId e = 0; e < inst.num_events(); ++e) {
    if (std::binary_search(sub.removed_events.begin(),
                           sub.removed_events.end(), e))
      continue;
    const BadEvent& ev = inst.event(e);
    std::vector<VariableId> vbl;
    for (VariableId v : ev.vbl) {
      if (remap[v] == kNoVariable)
        throw InvariantViolation(
            "substitute: surviving event touches a removed variable");
      vbl.push_back(remap[v]);
    }
    out.add_event_codes(ev.name, std::move(vbl), ev.forbidden, ev.synthetic);
    sub.event_map.push_back(e);
  }
  std::vector<VariableId> kappa_vbl;
  for (VariableId v : sub.ring_r) kappa_vbl.push_back(remap[v]);
  kappa_vbl.push_back(sub.beta);
  std::vector<uint64_t> kappa_forbidden;
  for (uint64_t cr = 0; cr < m; ++cr)
    for (uint64_t cb = 0; cb < m; ++cb)
      if (sub.p_table[cr] < sub.p_table[cb])
        kappa_forbidden.push_back(cr + m * cb);
  sub.kappa = out.add_event_codes(unique_event_name(out, "kappa"),
                                  std::move(kappa_vbl),
                                  std::move(kappa_forbidden),
                                  /*synthetic=*/true);
  sub.event_map.push_back(kNoEvent);
  out.freeze();
  sub.instance = std::move(out);
  return sub;
}

}  // namespace lll
