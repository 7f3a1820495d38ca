#include "lll/sampler.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace lll {

bool lazy_compare(LazyUniform& rho, const Rational& t, Rng& rng) {
  if (!is_probability(t))
    throw InvariantViolation("lazy_compare requires a threshold in [0, 1]");
  for (;;) {
    if (rho.lo_ >= t) return false;
    if (rho.lo_ + rho.width_ <= t) return true;
    bool b = rng.next_bit();
    rho.bits_.push_back(b);
    rho.width_ /= 2;
    if (b) rho.lo_ += rho.width_;
  }
}

void SamplerConfig::validate() const {
  if (!(c0 > 0)) throw InvariantViolation("sampler config requires c0 > 0");
  if (!(eps0 > 0)) throw InvariantViolation("sampler config requires eps0 > 0");
  if (!(zeta0 > 0 && zeta0 < 1))
    throw InvariantViolation("sampler config requires 0 < zeta0 < 1");
  if (d < 1) throw InvariantViolation("sampler config requires d >= 1");
  if (budget == 0) throw InvariantViolation("sampler config requires a budget");
}

namespace {

// Exact Bernoulli draw. The endpoints consume no randomness, so degenerate
// filters stay deterministic.
bool bernoulli(const Rational& p, Rng& rng) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  return rng.below(Integer(p.get_den())) < p.get_num();
}

PartialAssignment restrict_to(const std::vector<VariableId>& scope,
                              const Assignment& y) {
  PartialAssignment pa;
  for (VariableId v : scope) pa.set(v, y[v]);
  return pa;
}

Rational weight_of(const LLLInstance& inst, const PartialAssignment& pa) {
  Rational w(1);
  for (size_t i = 0; i < pa.size(); ++i)
    w *= inst.variable(pa.scope()[i]).dist.weights[pa.values()[i]];
  return w;
}

std::string unique_event_name(const LLLInstance& inst,
                              const std::string& base) {
  if (!inst.find_event(base)) return base;
  for (int k = 1;; ++k) {
    std::string name = base + "@" + std::to_string(k);
    if (!inst.find_event(name)) return name;
  }
}

void check_region(const LLLInstance& inst, const Region& region) {
  for (size_t i = 0; i < region.size(); ++i) {
    if (region[i] >= inst.num_events())
      throw InvariantViolation("region event id out of range");
    if (i > 0 && region[i - 1] >= region[i])
      throw InvariantViolation("region must be sorted and duplicate-free");
  }
}

// S, T and the boundary ring of the filter, in the geometry of `base`. The
// geometry predates the augmentation: the augmenting event's variables span
// the rings 1..ell and would collapse the depths if it entered the graph.
struct FilterGeometry {
  std::vector<VariableId> s;      // vbl(lambda)
  std::vector<VariableId> t;      // depth > ell, infinite included
  std::vector<VariableId> ring;   // depth exactly ell + 1
  std::vector<VariableId> inner;  // U \ T, the resample scope
};

FilterGeometry filter_geometry(const LLLInstance& base, const Region& lambda,
                               int ell) {
  if (ell < 0) throw InvariantViolation("filter radius must be nonnegative");
  FilterGeometry g;
  if (lambda.empty()) {
    for (VariableId v = 0; v < base.num_variables(); ++v) g.t.push_back(v);
    return g;
  }
  g.s = region_variables(base, lambda);
  std::vector<int> depth = variable_depths(base, lambda);
  for (VariableId v = 0; v < base.num_variables(); ++v) {
    if (depth[v] > ell) {
      g.t.push_back(v);
      if (depth[v] == ell + 1) g.ring.push_back(v);
    } else {
      g.inner.push_back(v);
    }
  }
  return g;
}

// Y_{U \ T} ~ mu^{Y_T}_{hat, U \ T}.
void conditional_resample(const LLLInstance& hat, const FilterGeometry& g,
                          Assignment& y, Rng& rng, uint64_t budget) {
  if (g.inner.empty()) return;
  PartialAssignment drawn =
      sample_marginal(hat, restrict_to(g.t, y), g.inner, rng, budget);
  for (size_t i = 0; i < drawn.size(); ++i)
    y[drawn.scope()[i]] = drawn.values()[i];
}

}  // namespace

Rational filter_acceptance(const LLLInstance& base, const LLLInstance& hat,
                           const Region& lambda, const Assignment& y, int ell,
                           uint64_t budget) {
  if (hat.num_variables() != base.num_variables())
    throw InvariantViolation("augmentation must not add variables");
  if (y.size() != base.num_variables())
    throw InvariantViolation("assignment does not match the instance");
  check_region(base, lambda);
  FilterGeometry g = filter_geometry(base, lambda, ell);

  // f(tau) = nu(Omega^tau) / nu(Omega^{Y_S and tau}) with both weights over
  // hat. The numerator checks the events reaching inside vbl(B_ell(lambda)),
  // the denominator those also not settled by S; each set only constrains
  // tau through the boundary ring, so f factorizes through pi = tau|ring.
  std::vector<const BadEvent*> reach_t = events_not_inside(hat, g.t);
  std::vector<const BadEvent*> reach_st =
      events_not_inside(hat, sorted_union(g.s, g.t));

  PartialAssignment ys = restrict_to(g.s, y);
  PartialAssignment pi_y = restrict_to(g.ring, y);
  if (weight_of(hat, ys) == 0 || weight_of(hat, pi_y) == 0)
    throw InvariantViolation("bayes filter: f(Y_T) is undefined");

  uint64_t codes = hat.enumeration_size(g.ring, budget);
  Rational f_y(-1);
  Rational f_max(0);
  bool have_max = false;
  bool y_feasible = false;
  for (uint64_t code = 0; code < codes; ++code) {
    PartialAssignment pi;
    std::vector<Value> vals = hat.decode(g.ring, code);
    for (size_t i = 0; i < g.ring.size(); ++i) pi.set(g.ring[i], vals[i]);
    if (weight_of(hat, pi) == 0) continue;
    Rational den = probability_avoiding(hat, reach_st, ys.merged(pi), budget);
    if (den == 0) continue;
    Rational f = probability_avoiding(hat, reach_t, pi, budget) / den;
    if (!have_max || f > f_max) {
      f_max = f;
      have_max = true;
    }
    if (pi == pi_y) {
      f_y = f;
      y_feasible = true;
    }
  }
  if (!y_feasible)
    throw InvariantViolation("bayes filter: f(Y_T) is undefined");
  if (!have_max || f_max == 0)
    throw InvariantViolation("bayes filter: max f vanished");
  return f_y / f_max;
}

bool bayes_filter(const LLLInstance& base, const LLLInstance& hat,
                  const Region& lambda, const Assignment& y, int ell, Rng& rng,
                  uint64_t budget) {
  return bernoulli(filter_acceptance(base, hat, lambda, y, ell, budget), rng);
}

void recursive_sampling_with_decay(Assignment& y, const LLLInstance& inst,
                                   const Region& lambda, Rng& rng,
                                   const SamplerConfig& cfg) {
  cfg.validate();
  if (y.size() != inst.num_variables())
    throw InvariantViolation("assignment does not match the instance");
  check_region(inst, lambda);
  Region region = lambda;
  if (cfg.mode == CheckMode::oracle_check && !region.empty()) {
    // Feasibility part of the conditional Gibbs property: the boundary must
    // admit a conditioned extension.
    PartialAssignment ys = restrict_to(region_variables(inst, region), y);
    if (omega_weight(inst, ys, cfg.budget) == 0)
      throw InvariantViolation("conditional Gibbs: infeasible boundary");
  }
  for (;;) {
    FilterGeometry g = filter_geometry(inst, region, 1);
    Rational acc = filter_acceptance(inst, inst, region, y, 1, cfg.budget);
    if (bernoulli(acc, rng)) {
      conditional_resample(inst, g, y, rng, cfg.budget);
      return;
    }
    region = ball(inst, region, 2);
  }
}

namespace {

struct SamplerContext {
  const SamplerConfig& cfg;
  Rng& rng;
};

// Complement of the event over the same variables: occurs exactly where the
// original does not.
BadEvent complement_event(const LLLInstance& inst, const BadEvent& ev,
                          uint64_t budget) {
  uint64_t domain = inst.enumeration_size(ev.vbl, budget);
  BadEvent out;
  out.vbl = ev.vbl;
  out.synthetic = true;
  for (uint64_t code = 0; code < domain; ++code)
    if (!std::binary_search(ev.forbidden.begin(), ev.forbidden.end(), code))
      out.forbidden.push_back(code);
  return out;
}

uint64_t sample_recursive(Assignment& y, const LLLInstance& inst,
                          const Region& lambda, const Rational& eps,
                          const Rational& gamma, const Rational& delta,
                          const Rational& alpha, SamplerContext& ctx,
                          TraceNode& node) {
  const SamplerConfig& cfg = ctx.cfg;
  if (lambda.empty())
    throw InvariantViolation("recursive sampling requires a nonempty region");
  check_region(inst, lambda);
  if (y.size() != inst.num_variables())
    throw InvariantViolation("assignment does not match the instance");
  if (!(eps > 0 && 2 * eps <= 1))
    throw InvariantViolation("recursive sampling requires 0 < eps <= 1/2");
  if (!(alpha > 0 && alpha <= gamma && gamma < 1))
    throw InvariantViolation(
        "recursive sampling requires 0 < alpha <= gamma < 1");
  // Closed upper bound: the first recursive branch passes delta = zeta0 *
  // alpha exactly.
  if (!(delta > 0 && delta <= cfg.zeta0 * alpha))
    throw InvariantViolation(
        "recursive sampling requires 0 < delta <= zeta0 * alpha");
  if (!(2 * cfg.zeta0 < 1))
    throw InvariantViolation("recursive sampling requires zeta0 < 1/2");

  int ell = ell0(eps, gamma, delta, cfg.c0);
  node.lambda = lambda;
  node.eps = eps;
  node.gamma = gamma;
  node.delta = delta;
  node.alpha = alpha;
  node.ell = ell;

  auto a_lam = cached_augment(cfg.cache, inst, lambda,
                              AugmentParams{eps, gamma, delta, ell, cfg.eps0},
                              cfg.budget);
  BadEvent lam_event = a_lam->compiled();
  lam_event.name = unique_event_name(inst, "lambda");
  LLLInstance hat = extend_instance(inst, {}, {lam_event});
  EventId lam_id = static_cast<EventId>(inst.num_events());

  if (cfg.mode == CheckMode::oracle_check) {
    if (satisfiability(inst, cfg.budget) < alpha)
      throw InvariantViolation("recursive sampling: instance below alpha");
    Region rest;
    for (EventId e = 0; e < inst.num_events(); ++e)
      if (!std::binary_search(lambda.begin(), lambda.end(), e))
        rest.push_back(e);
    if (!rest.empty() &&
        satisfiability(sub_instance(inst, rest), cfg.budget) < gamma)
      throw InvariantViolation("recursive sampling: complement below gamma");
    PartialAssignment ys = restrict_to(region_variables(inst, lambda), y);
    if (omega_weight(hat, ys, cfg.budget) == 0)
      throw InvariantViolation(
          "augmented conditional Gibbs: infeasible boundary");
  }

  Region ball0 = ball(inst, lambda, ell);
  LazyUniform rho;
  Interval running{Rational(0), Rational(1)};
  uint64_t potential = 0;
  for (int i = 1;; ++i) {
    EstimateResult est =
        estimate_interval(inst, ball0, a_lam->compiled(), cfg.zeta0, i, alpha,
                          gamma, cfg.mode, cfg.eps0, cfg.c0, cfg.budget,
                          cfg.cache);
    if (est.interval.lo > running.lo) running.lo = est.interval.lo;
    if (est.interval.hi < running.hi) running.hi = est.interval.hi;
    if (running.lo > running.hi)
      throw InvariantViolation("estimate intervals drifted apart");
    node.refinements.push_back(running);

    if (lazy_compare(rho, running.lo, ctx.rng)) {
      // rho < L <= P: conditioned on avoiding A_lambda.
      node.iterations = i;
      node.interval = running;
      FilterGeometry g = filter_geometry(inst, lambda, ell);
      Rational acc = filter_acceptance(inst, hat, lambda, y, ell, cfg.budget);
      node.acceptance = acc;
      if (bernoulli(acc, ctx.rng)) {
        node.branch = Branch::resample;
        conditional_resample(hat, g, y, ctx.rng, cfg.budget);
      } else {
        node.branch = Branch::recurse_hat;
        Rational delta_1 = cfg.zeta0 * alpha / 2;
        int step = ell0(make_rational(1, 2), gamma, delta_1, cfg.c0);
        AugmentParams guard_params{make_rational(1, 2), gamma, delta_1, step,
                                   cfg.eps0};
        int r = ell + 1;
        for (;;) {
          auto guard = cached_augment(cfg.cache, hat, ball(inst, lambda, r),
                                      guard_params, cfg.budget);
          if (!guard->occurs(hat, y)) break;
          r += step;
          potential += 1;
          node.growth_steps += 1;
        }
        node.radius = r;
        Region next = ball(inst, lambda, r);
        next.push_back(lam_id);
        node.children.emplace_back();
        potential +=
            sample_recursive(y, hat, next, make_rational(1, 2), gamma, delta_1,
                             alpha / 2, ctx, node.children.back());
      }
      node.potential = potential;
      return potential;
    }
    if (!lazy_compare(rho, running.hi, ctx.rng)) {
      // rho >= R >= P: conditioned on hitting A_lambda. R < 1 here because
      // rho < 1, so the complement instance is satisfiable.
      node.iterations = i;
      node.interval = running;
      node.branch = Branch::recurse_complement;
      Rational remainder = 1 - running.hi;
      BadEvent bar = complement_event(inst, a_lam->compiled(), cfg.budget);
      bar.name = unique_event_name(inst, "lambda-bar");
      LLLInstance hat_bar = extend_instance(inst, {}, {bar});
      Rational delta_2 = cfg.zeta0 * alpha * remainder / 2;
      int step = ell0(make_rational(1, 2), gamma, delta_2, cfg.c0);
      AugmentParams guard_params{make_rational(1, 2), gamma, delta_2, step,
                                 cfg.eps0};
      int s = ell + 1;
      for (;;) {
        auto guard = cached_augment(cfg.cache, hat_bar, ball(inst, lambda, s),
                                    guard_params, cfg.budget);
        if (!guard->occurs(hat_bar, y)) break;
        s += step;
        potential += 1;
        node.growth_steps += 1;
      }
      node.radius = s;
      Region next = ball(inst, lambda, s);
      next.push_back(lam_id);
      node.children.emplace_back();
      uint64_t sub = sample_recursive(y, hat_bar, next, make_rational(1, 2),
                                      gamma, delta_2, alpha * remainder, ctx,
                                      node.children.back());
      potential +=
          static_cast<uint64_t>(ceil_log2(Rational(1) / remainder)) + 1 + sub;
      node.potential = potential;
      return potential;
    }
    // Zone of indecision: refine the estimate.
    potential += 1;
  }
}

}  // namespace

uint64_t recursive_sampling(Assignment& y, const LLLInstance& inst,
                            const Region& lambda, const Rational& eps,
                            const Rational& gamma, const Rational& delta,
                            const Rational& alpha, Rng& rng,
                            const SamplerConfig& cfg, ExecutionTrace* trace) {
  cfg.validate();
  uint64_t words = rng.words_consumed();
  uint64_t bits = rng.bits_consumed();
  TraceNode root;
  SamplerContext ctx{cfg, rng};
  uint64_t potential =
      sample_recursive(y, inst, lambda, eps, gamma, delta, alpha, ctx, root);
  if (trace) {
    trace->potential += potential;
    trace->calls.push_back(std::move(root));
    trace->words += rng.words_consumed() - words;
    trace->bits += rng.bits_consumed() - bits;
  }
  return potential;
}

}  // namespace lll
