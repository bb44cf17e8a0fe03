#include "rigidity/closure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "rigidity/intersections.hpp"

namespace rigidity {

namespace {

using nlohmann::json;

constexpr long long kFracSearchCap = 1000000;

double round_down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
double round_up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

bool compatible_fields(const ExactQuadratic& x, const ExactQuadratic& y) {
  return x.radicand() == 0 || y.radicand() == 0 || x.radicand() == y.radicand();
}

// Preconditions must hold with certainty before a rule fires: False is a
// normal inapplicable outcome, Unknown asks the caller for tighter inputs.
bool certainly(Truth t, const char* what) {
  if (t == Truth::Unknown)
    fail(ErrorKind::Refinement, std::string("comparison '") + what + "' is undecided over the given enclosures");
  return t == Truth::True;
}

RuleOutcome not_applicable(std::string reason) {
  RuleOutcome o;
  o.reason = std::move(reason);
  return o;
}

Scalar scale_scalar(const Scalar& x, long long k) { return scalar_scale(x, k); }

}  // namespace

ContextBound context_bound(const ExtendedReal& v) {
  if (v.is_infinite()) return ContextBound::infinite();
  double d = v.finite_value();
  return ContextBound::finite(Scalar(Interval(round_down(d), round_up(d))));
}

Truth less_than_bound(const Scalar& x, const ContextBound& b) {
  if (b.is_infinite()) return Truth::True;
  return scalar_less(x, b.value());
}

void ClosureContext::validate() const {
  if (!(rbar_tol > 0.0)) fail(ErrorKind::Parameter, "context: rbar tolerance must be positive");
  if (rbar_budget < 0) fail(ErrorKind::Parameter, "context: negative rbar budget");
  if (!conv.is_infinite() && !inj.is_infinite()) {
    // reject only certain violations of conv <= inj / 2; overlapping
    // enclosures of equal bounds must pass
    if (scalar_less_equal(scale_scalar(conv.value(), 2), inj.value()) == Truth::False)
      fail(ErrorKind::Precondition, "context: convexity bound exceeds half the injectivity bound");
  }
  if (two_point_homogeneous && !model)
    fail(ErrorKind::Parameter, "context: homogeneity flag set but no model supplied for the lens oracle");
}

const char* rule_name(RuleId r) {
  switch (r) {
    case RuleId::Double: return "DOUBLE";
    case RuleId::Many: return "MANY";
    case RuleId::Diff: return "DIFF";
    case RuleId::Oy: return "OY";
    case RuleId::Bar: return "BAR";
    case RuleId::Frac: return "FRAC";
  }
  fail(ErrorKind::Internal, "unknown rule id");
}

const char* rule_lemma(RuleId r) {
  switch (r) {
    case RuleId::Double: return "doubling-rule";
    case RuleId::Many: return "multiple-rule";
    case RuleId::Diff: return "floor-difference-rule";
    case RuleId::Oy: return "small-difference-rule";
    case RuleId::Bar: return "lens-diameter-rule";
    case RuleId::Frac: return "fractional-part-rule";
  }
  fail(ErrorKind::Internal, "unknown rule id");
}

RuleId rule_from_name(const std::string& name) {
  for (RuleId r : {RuleId::Double, RuleId::Many, RuleId::Diff, RuleId::Oy, RuleId::Bar, RuleId::Frac})
    if (name == rule_name(r)) return r;
  fail(ErrorKind::Parameter, "unknown rule '" + name + "'");
}

PreservedSet::PreservedSet(ClosureContext ctx, std::vector<Scalar> seeds) : context(std::move(ctx)) {
  context.validate();
  if (seeds.empty()) fail(ErrorKind::Parameter, "a derivation needs at least one seed");
  for (const Scalar& s : seeds)
    if (!certainly(scalar_positive(s), "seed > 0")) fail(ErrorKind::Precondition, "seed " + s.str() + " is not positive");
  elements = std::move(seeds);
  seed_count = elements.size();
}

namespace {

// Floor of the ratio of two positive scalars, or Refinement when the
// enclosures cannot pin a single integer down.
long long interval_ratio_floor(const Scalar& r1, const Scalar& r2) {
  Interval a = r1.enclosure(), b = r2.enclosure();
  double qlo = round_down(a.lo / b.hi), qhi = round_up(a.hi / b.lo);
  double fl = std::floor(qlo), fh = std::floor(qhi);
  if (fl != fh)
    fail(ErrorKind::Refinement, "floor of the ratio is undecided over the given enclosures");
  return static_cast<long long>(fl);
}

RuleOutcome finish_step(PreservedSet& state, RuleId rule, std::vector<std::size_t> inputs, Scalar output,
                        std::optional<long long> param) {
  DerivationStep step;
  step.rule = rule;
  step.inputs = std::move(inputs);
  step.output = std::move(output);
  step.param = param;
  step.lemma = rule_lemma(rule);
  state.elements.push_back(step.output);
  state.steps.push_back(step);
  RuleOutcome o;
  o.step = std::move(step);
  return o;
}

}  // namespace

RuleOutcome apply_rule(PreservedSet& state, RuleId rule, const std::vector<std::size_t>& inputs,
                       std::optional<long long> param) {
  for (std::size_t i : inputs)
    if (i >= state.elements.size()) fail(ErrorKind::Parameter, "rule input index out of range");
  bool takes_param = rule == RuleId::Many || rule == RuleId::Frac;
  if (param.has_value() != takes_param)
    fail(ErrorKind::Parameter, std::string(rule_name(rule)) + (takes_param ? " requires a parameter" : " takes no parameter"));
  const ClosureContext& ctx = state.context;

  auto in_convex_range = [&](const Scalar& r, const char* who) {
    if (!certainly(scalar_positive(r), "r > 0")) return not_applicable(std::string(who) + ": input is not positive");
    if (!certainly(less_than_bound(r, ctx.conv), "r < conv"))
      return not_applicable(std::string(who) + ": input is not below the convexity bound");
    return RuleOutcome{std::nullopt, "", false};
  };

  switch (rule) {
    case RuleId::Double: {
      if (inputs.size() != 1) fail(ErrorKind::Parameter, "DOUBLE takes one input");
      const Scalar& r = state.elements[inputs[0]];
      if (RuleOutcome pre = in_convex_range(r, "DOUBLE"); !pre.reason.empty()) return pre;
      return finish_step(state, rule, inputs, scale_scalar(r, 2), std::nullopt);
    }

    case RuleId::Many: {
      if (inputs.size() != 1) fail(ErrorKind::Parameter, "MANY takes one input");
      long long j = *param;
      if (j < 1) fail(ErrorKind::Parameter, "MANY: multiplier must be at least 1");
      if (ctx.conv.is_infinite())
        return not_applicable("MANY: no finite convexity bound, so no multiple is forced into range");
      const Scalar& r = state.elements[inputs[0]];
      if (RuleOutcome pre = in_convex_range(r, "MANY"); !pre.reason.empty()) return pre;
      Scalar out = scale_scalar(r, j);
      if (!certainly(less_than_bound(out, ctx.conv), "j*r < conv"))
        return not_applicable("MANY: the requested multiple reaches the convexity bound");
      return finish_step(state, rule, inputs, std::move(out), j);
    }

    case RuleId::Diff: {
      if (inputs.size() != 2) fail(ErrorKind::Parameter, "DIFF takes two inputs");
      const Scalar& r1 = state.elements[inputs[0]];
      const Scalar& r2 = state.elements[inputs[1]];
      if (RuleOutcome pre = in_convex_range(r1, "DIFF"); !pre.reason.empty()) return pre;
      if (RuleOutcome pre = in_convex_range(r2, "DIFF"); !pre.reason.empty()) return pre;
      if (!certainly(scalar_greater(r1, r2), "r1 > r2")) return not_applicable("DIFF: first input is not the larger one");

      if (r1.is_exact() && r2.is_exact() && compatible_fields(r1.exact(), r2.exact())) {
        BigInt k = floor_int(r1.exact() / r2.exact());
        if (k < 1) fail(ErrorKind::Internal, "DIFF: ratio of ordered positive inputs floored below 1");
        ExactQuadratic out = r1.exact() - ExactQuadratic(Rational(k)) * r2.exact();
        if (out.sign() < 0) fail(ErrorKind::Internal, "DIFF: negative remainder");
        if (out.is_zero()) {
          RuleOutcome o = not_applicable("DIFF: the difference is exactly zero, the inputs are commensurable");
          o.commensurable = true;
          return o;
        }
        return finish_step(state, rule, inputs, Scalar(out), std::nullopt);
      }

      long long k = interval_ratio_floor(r1, r2);
      Interval out = r1.enclosure() - r2.enclosure().scaled(k);
      if (!(out.lo > 0.0))
        fail(ErrorKind::Refinement, "DIFF: the remainder cannot be separated from zero at the given enclosure widths");
      return finish_step(state, rule, inputs, Scalar(out), std::nullopt);
    }

    case RuleId::Oy: {
      if (inputs.size() != 2) fail(ErrorKind::Parameter, "OY takes two inputs");
      const Scalar& r1 = state.elements[inputs[0]];
      const Scalar& r2 = state.elements[inputs[1]];
      if (RuleOutcome pre = in_convex_range(r1, "OY"); !pre.reason.empty()) return pre;
      if (RuleOutcome pre = in_convex_range(r2, "OY"); !pre.reason.empty()) return pre;
      // r1 - r2 <= 2 r2 < r1 + r2, rearranged to avoid mixed subtraction
      if (!certainly(scalar_less_equal(r1, scale_scalar(r2, 3)), "r1 <= 3 r2"))
        return not_applicable("OY: first input exceeds three times the second");
      if (!certainly(scalar_less(r2, r1), "r2 < r1")) return not_applicable("OY: second input is not the smaller one");
      Scalar out = scalar_sub(r1, r2);
      if (!out.is_exact() && !(out.interval().lo > 0.0))
        fail(ErrorKind::Refinement, "OY: the difference cannot be separated from zero at the given enclosure widths");
      return finish_step(state, rule, inputs, std::move(out), std::nullopt);
    }

    case RuleId::Bar: {
      if (inputs.size() != 1) fail(ErrorKind::Parameter, "BAR takes one input");
      if (!ctx.two_point_homogeneous) return not_applicable("BAR: space is not flagged two-point homogeneous");
      if (!ctx.model) fail(ErrorKind::Parameter, "BAR: context has no model for the lens oracle");
      const Scalar& r = state.elements[inputs[0]];
      if (!certainly(scalar_positive(r), "r > 0")) return not_applicable("BAR: input is not positive");
      if (!ctx.conv.is_infinite() &&
          !certainly(scalar_less(scale_scalar(r, 3), scale_scalar(ctx.conv.value(), 2)), "3 r < 2 conv"))
        return not_applicable("BAR: input is not below two thirds of the convexity bound");
      // the lens of larger balls contains the lens of smaller ones, so the
      // balanced radius is monotone in r and the enclosure ends bracket it
      Interval in = r.enclosure();
      RBarResult lo_end = rbar(*ctx.model, in.lo, ctx.rbar_tol, ctx.rbar_budget, ctx.rbar_seed);
      RBarResult hi_end = in.hi == in.lo ? lo_end : rbar(*ctx.model, in.hi, ctx.rbar_tol, ctx.rbar_budget, ctx.rbar_seed);
      Interval out(std::min(lo_end.lo, hi_end.lo), std::max(lo_end.hi, hi_end.hi));
      if (!(out.lo > 0.0)) fail(ErrorKind::Internal, "BAR: oracle produced a non-positive enclosure");
      return finish_step(state, rule, inputs, Scalar(out), std::nullopt);
    }

    case RuleId::Frac: {
      if (inputs.size() != 1) fail(ErrorKind::Parameter, "FRAC takes one input");
      if (!ctx.periodic_period_one) return not_applicable("FRAC: geodesics are not flagged periodic with period one");
      long long n = *param;
      if (n < 1) fail(ErrorKind::Parameter, "FRAC: multiple index must be at least 1");
      const Scalar& r = state.elements[inputs[0]];
      if (!r.is_exact())
        fail(ErrorKind::Refinement, "FRAC: irrationality is undecidable for an enclosure input");
      if (r.exact().is_rational()) return not_applicable("FRAC: input is rational, the rule needs an irrational distance");
      if (RuleOutcome pre = in_convex_range(r, "FRAC"); !pre.reason.empty()) return pre;
      ExactQuadratic value = frac(r.exact() * ExactQuadratic(Rational(n)));
      if (value.sign() <= 0) return not_applicable("FRAC: the fractional part vanishes");
      if (!certainly(less_than_bound(Scalar(value), ctx.inj), "frac(n r) < inj"))
        return not_applicable("FRAC: the fractional part is not below the injectivity bound");
      return finish_step(state, rule, inputs, Scalar(value), n);
    }
  }
  fail(ErrorKind::Internal, "unknown rule id");
}

const char* derive_status_name(DeriveStatus s) {
  switch (s) {
    case DeriveStatus::Achieved: return "achieved";
    case DeriveStatus::RationalSeeds: return "rational-seeds";
    case DeriveStatus::BudgetExhausted: return "budget-exhausted";
  }
  fail(ErrorKind::Internal, "unknown derive status");
}

namespace {

DerivationCertificate make_certificate(const PreservedSet& state, std::vector<Scalar> seeds, const Scalar& eps,
                                       const std::string& strategy) {
  DerivationCertificate cert;
  cert.strategy = strategy;
  cert.seeds = std::move(seeds);
  cert.context = state.context;
  cert.steps = state.steps;
  cert.epsilon = eps;
  return cert;
}

// Smallest element index under the three-valued order; ties and undecided
// comparisons keep the earlier index, so the scan is deterministic.
std::size_t smallest_element(const PreservedSet& state) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.elements.size(); ++i)
    if (scalar_less(state.elements[i], state.elements[best]) == Truth::True) best = i;
  return best;
}

// Fractional-part search shared by strategy C and the exhaustive fallback:
// smallest n with 0 < frac(n r) < min(eps, inj), walking frac(n r) by exact
// incremental addition.  0 when the cap is reached.
long long find_fractional_multiple(const ExactQuadratic& r, const Scalar& eps, const ContextBound& inj) {
  ExactQuadratic step = frac(r);
  ExactQuadratic one(1);
  ExactQuadratic cur(0);
  for (long long n = 1; n <= kFracSearchCap; ++n) {
    cur += step;
    if ((cur - one).sign() >= 0) cur -= one;
    if (cur.sign() <= 0) continue;
    Scalar v{cur};
    if (scalar_less(v, eps) == Truth::True && less_than_bound(v, inj) == Truth::True) return n;
  }
  return 0;
}

DeriveOutcome derive_strategy_a(PreservedSet& state, std::vector<Scalar> seeds, const Scalar& eps, int step_budget) {
  if (seeds.size() != 2) fail(ErrorKind::Parameter, "strategy A needs exactly two seeds");
  if (!seeds[0].is_exact() || !seeds[1].is_exact())
    fail(ErrorKind::Refinement, "strategy A cannot decide seed-ratio rationality for enclosure seeds");

  DeriveOutcome out;
  bool rational_ratio = false;
  if (compatible_fields(seeds[0].exact(), seeds[1].exact())) {
    if (seeds[0].exact() == seeds[1].exact())
      rational_ratio = true;
    else
      rational_ratio = (seeds[0].exact() / seeds[1].exact()).is_rational();
  }
  // seeds in different quadratic fields always have an irrational ratio
  if (rational_ratio) {
    out.status = DeriveStatus::RationalSeeds;
    out.report = "seed ratio is rational: the difference cascade terminates at zero instead of producing arbitrarily "
                 "small positive distances";
    out.certificate = make_certificate(state, std::move(seeds), eps, "A");
    return out;
  }

  std::size_t larger = 0, smaller = 1;
  if (certainly(scalar_less(seeds[0], seeds[1]), "seed order")) std::swap(larger, smaller);

  while (static_cast<int>(state.steps.size()) < step_budget) {
    RuleOutcome step = apply_rule(state, RuleId::Diff, {larger, smaller});
    if (step.commensurable) {
      out.status = DeriveStatus::RationalSeeds;
      out.report = "difference cascade reached exactly zero: the seeds are commensurable";
      out.certificate = make_certificate(state, std::move(seeds), eps, "A");
      return out;
    }
    if (!step.applied()) fail(ErrorKind::Precondition, "strategy A: " + step.reason);
    std::size_t produced = state.elements.size() - 1;
    if (scalar_less(state.elements[produced], state.elements[smaller]) != Truth::True)
      fail(ErrorKind::Internal, "strategy A: iterate failed to decrease");
    if (scalar_less(state.elements[produced], eps) == Truth::True) {
      out.status = DeriveStatus::Achieved;
      out.certificate = make_certificate(state, std::move(seeds), eps, "A");
      out.certificate.achieved = state.elements[produced];
      return out;
    }
    larger = smaller;
    smaller = produced;
  }
  out.status = DeriveStatus::BudgetExhausted;
  out.report = "step budget exhausted before reaching epsilon";
  out.certificate = make_certificate(state, std::move(seeds), eps, "A");
  return out;
}

DeriveOutcome derive_strategy_b(PreservedSet& state, std::vector<Scalar> seeds, const Scalar& eps, int step_budget) {
  if (seeds.size() != 1) fail(ErrorKind::Parameter, "strategy B takes exactly one seed");
  if (!state.context.two_point_homogeneous)
    fail(ErrorKind::Precondition, "strategy B needs the two-point homogeneity flag");

  DeriveOutcome out;
  std::size_t cur = 0;
  while (static_cast<int>(state.steps.size()) + 1 < step_budget) {
    RuleOutcome bar = apply_rule(state, RuleId::Bar, {cur});
    if (!bar.applied()) fail(ErrorKind::Precondition, "strategy B: " + bar.reason);
    std::size_t bar_idx = state.elements.size() - 1;
    RuleOutcome oy = apply_rule(state, RuleId::Oy, {bar_idx, cur});
    if (!oy.applied()) fail(ErrorKind::Precondition, "strategy B: " + oy.reason);
    std::size_t next = state.elements.size() - 1;
    if (scalar_less(state.elements[next], state.elements[cur]) != Truth::True)
      fail(ErrorKind::Refinement, "strategy B: iterate decrease undecided at the accumulated enclosure width");
    if (scalar_less(state.elements[next], eps) == Truth::True) {
      out.status = DeriveStatus::Achieved;
      out.certificate = make_certificate(state, std::move(seeds), eps, "B");
      out.certificate.achieved = state.elements[next];
      return out;
    }
    // closing difference step, taken only when it certifiably lands below
    // epsilon earlier than another lens round would
    try {
      PreservedSet trial = state;
      RuleOutcome diff = apply_rule(trial, RuleId::Diff, {cur, next});
      if (diff.applied() && scalar_less(trial.elements.back(), eps) == Truth::True) {
        apply_rule(state, RuleId::Diff, {cur, next});
        out.status = DeriveStatus::Achieved;
        out.certificate = make_certificate(state, std::move(seeds), eps, "B");
        out.certificate.achieved = state.elements.back();
        return out;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Refinement) throw;
    }
    cur = next;
  }
  out.status = DeriveStatus::BudgetExhausted;
  out.report = "step budget exhausted before reaching epsilon";
  out.certificate = make_certificate(state, std::move(seeds), eps, "B");
  return out;
}

DeriveOutcome derive_strategy_c(PreservedSet& state, std::vector<Scalar> seeds, const Scalar& eps) {
  if (seeds.size() != 1) fail(ErrorKind::Parameter, "strategy C takes exactly one seed");
  if (!state.context.periodic_period_one)
    fail(ErrorKind::Precondition, "strategy C needs the period-one periodicity flag");
  if (!seeds[0].is_exact()) fail(ErrorKind::Refinement, "strategy C cannot decide irrationality for an enclosure seed");

  DeriveOutcome out;
  if (seeds[0].exact().is_rational()) {
    out.status = DeriveStatus::RationalSeeds;
    out.report = "seed is rational: the fractional-part search applies only to irrational distances";
    out.certificate = make_certificate(state, std::move(seeds), eps, "C");
    return out;
  }
  if (!certainly(less_than_bound(seeds[0], state.context.conv), "seed < conv"))
    fail(ErrorKind::Precondition, "strategy C: seed is not below the convexity bound");

  long long n = find_fractional_multiple(seeds[0].exact(), eps, state.context.inj);
  if (n == 0) {
    out.status = DeriveStatus::BudgetExhausted;
    out.report = "no multiple up to " + std::to_string(kFracSearchCap) + " has a fractional part below the target";
    out.certificate = make_certificate(state, std::move(seeds), eps, "C");
    return out;
  }
  RuleOutcome step = apply_rule(state, RuleId::Frac, {0}, n);
  if (!step.applied()) fail(ErrorKind::Internal, "strategy C: search result rejected by the rule: " + step.reason);
  out.status = DeriveStatus::Achieved;
  out.certificate = make_certificate(state, std::move(seeds), eps, "C");
  out.certificate.achieved = state.elements.back();
  return out;
}

DeriveOutcome derive_exhaustive(PreservedSet& state, std::vector<Scalar> seeds, const Scalar& eps, int step_budget) {
  DeriveOutcome out;
  bool saturated = false;
  while (static_cast<int>(state.steps.size()) < step_budget) {
    std::size_t min_idx = smallest_element(state);
    if (scalar_less(state.elements[min_idx], eps) == Truth::True) {
      out.status = DeriveStatus::Achieved;
      out.certificate = make_certificate(state, std::move(seeds), eps, "exhaustive");
      out.certificate.achieved = state.elements[min_idx];
      return out;
    }
    bool progressed = false;
    // difference steps against the current minimum, in index order
    for (std::size_t k = 0; k < state.elements.size() && !progressed; ++k) {
      if (k == min_idx) continue;
      if (scalar_greater(state.elements[k], state.elements[min_idx]) != Truth::True) continue;
      try {
        progressed = apply_rule(state, RuleId::Diff, {k, min_idx}).applied();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Refinement) throw;
      }
    }
    // a lens round on the minimum shrinks it even when differences stall
    if (!progressed && state.context.two_point_homogeneous && state.context.model) {
      try {
        if (apply_rule(state, RuleId::Bar, {min_idx}).applied())
          progressed = apply_rule(state, RuleId::Oy, {state.elements.size() - 1, min_idx}).applied();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Refinement) throw;
      }
    }
    // fractional-part search on the minimum
    if (!progressed && state.context.periodic_period_one && state.elements[min_idx].is_exact() &&
        !state.elements[min_idx].exact().is_rational()) {
      long long n = find_fractional_multiple(state.elements[min_idx].exact(), eps, state.context.inj);
      if (n > 0) progressed = apply_rule(state, RuleId::Frac, {min_idx}, n).applied();
    }
    if (!progressed) {
      saturated = true;
      break;
    }
  }
  out.status = DeriveStatus::BudgetExhausted;
  out.report = saturated ? "no rule makes further progress below the current minimum"
                         : "step budget exhausted before reaching epsilon";
  out.certificate = make_certificate(state, std::move(seeds), eps, "exhaustive");
  return out;
}

}  // namespace

DeriveOutcome derive_to_epsilon(std::vector<Scalar> seeds, const ClosureContext& ctx, const Scalar& epsilon,
                                const std::string& strategy, int step_budget) {
  if (!certainly(scalar_positive(epsilon), "epsilon > 0")) fail(ErrorKind::Parameter, "epsilon must be positive");
  if (step_budget < 1) fail(ErrorKind::Parameter, "step budget must be at least 1");
  PreservedSet state(ctx, seeds);

  // a seed already below epsilon needs no steps at all
  for (const Scalar& s : seeds)
    if (scalar_less(s, epsilon) == Truth::True) {
      DeriveOutcome out;
      out.status = DeriveStatus::Achieved;
      out.certificate = make_certificate(state, std::move(seeds), epsilon, strategy);
      out.certificate.achieved = s;
      return out;
    }

  if (strategy == "A") return derive_strategy_a(state, std::move(seeds), epsilon, step_budget);
  if (strategy == "B") return derive_strategy_b(state, std::move(seeds), epsilon, step_budget);
  if (strategy == "C") return derive_strategy_c(state, std::move(seeds), epsilon);
  if (strategy == "exhaustive") return derive_exhaustive(state, std::move(seeds), epsilon, step_budget);
  fail(ErrorKind::Parameter, "unknown strategy '" + strategy + "' (want A, B, C or exhaustive)");
}

namespace {

// Replayed outputs must reproduce stored ones: exactly for exact values,
// within the stored bounds for enclosures.
bool outputs_match(const Scalar& stored, const Scalar& recomputed) {
  if (stored.is_exact() && recomputed.is_exact()) {
    if (!compatible_fields(stored.exact(), recomputed.exact())) return false;
    return stored.exact() == recomputed.exact();
  }
  Interval s = stored.enclosure(), r = recomputed.enclosure();
  return s.lo <= r.lo && r.hi <= s.hi;
}

}  // namespace

VerifyReport verify_certificate(const DerivationCertificate& cert) {
  VerifyReport rep;
  auto reject = [&rep](std::string why) {
    rep.ok = false;
    rep.failure = std::move(why);
    return rep;
  };
  try {
    PreservedSet replay(cert.context, cert.seeds);
    for (std::size_t i = 0; i < cert.steps.size(); ++i) {
      const DerivationStep& s = cert.steps[i];
      std::string label = "step " + std::to_string(i) + ": " + rule_name(s.rule) + " (" + rule_lemma(s.rule) + ")";
      if (s.lemma != rule_lemma(s.rule)) return reject(label + " carries the wrong law label '" + s.lemma + "'");
      RuleOutcome o = apply_rule(replay, s.rule, s.inputs, s.param);
      if (!o.applied()) return reject(label + " precondition rejected: " + o.reason);
      if (!outputs_match(s.output, replay.elements.back()))
        return reject(label + " output " + s.output.str() + " does not replay (got " + replay.elements.back().str() + ")");
      rep.lines.push_back(label + " ok: " + s.output.str());
    }
    if (!cert.achieved) return reject("certificate reaches no achieved value");
    if (scalar_less(*cert.achieved, cert.epsilon) != Truth::True)
      return reject("achieved value " + cert.achieved->str() + " is not certainly below epsilon " + cert.epsilon.str());
    bool found = false;
    for (const Scalar& el : replay.elements)
      if (outputs_match(*cert.achieved, el)) {
        found = true;
        break;
      }
    if (!found) return reject("achieved value " + cert.achieved->str() + " is not among the derived elements");
  } catch (const Error& e) {
    return reject(e.what());
  }
  rep.ok = true;
  return rep;
}

namespace {

std::string rational_num(const Rational& r) { return numerator(r).str(); }
std::string rational_den(const Rational& r) { return denominator(r).str(); }

json scalar_to_jsonv(const Scalar& s) {
  if (s.is_exact()) {
    const ExactQuadratic& e = s.exact();
    return json{{"exact",
                 {rational_num(e.rational_part()), rational_den(e.rational_part()),
                  rational_num(e.radical_coefficient()), rational_den(e.radical_coefficient()),
                  std::to_string(e.radicand())}}};
  }
  return json{{"interval", {s.interval().lo, s.interval().hi}}};
}

Scalar scalar_from_jsonv(const json& j) {
  if (j.contains("exact")) {
    const json& a = j.at("exact");
    if (!a.is_array() || a.size() != 5) fail(ErrorKind::Parameter, "exact scalar needs five components");
    Rational rat = parse_rational(a[0].get<std::string>() + "/" + a[1].get<std::string>());
    Rational coef = parse_rational(a[2].get<std::string>() + "/" + a[3].get<std::string>());
    std::uint64_t d = 0;
    try {
      d = std::stoull(a[4].get<std::string>());
    } catch (const std::exception&) {
      fail(ErrorKind::Parameter, "malformed radicand '" + a[4].get<std::string>() + "' in scalar JSON");
    }
    return Scalar(ExactQuadratic(rat, coef, d));
  }
  if (j.contains("interval")) {
    const json& a = j.at("interval");
    if (!a.is_array() || a.size() != 2) fail(ErrorKind::Parameter, "interval scalar needs two bounds");
    return Scalar(Interval(a[0].get<double>(), a[1].get<double>()));
  }
  fail(ErrorKind::Parameter, "scalar JSON needs an 'exact' or 'interval' field");
}

json bound_to_jsonv(const ContextBound& b) {
  if (b.is_infinite()) return json("inf");
  return scalar_to_jsonv(b.value());
}

ContextBound bound_from_jsonv(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return ContextBound::infinite();
  return ContextBound::finite(scalar_from_jsonv(j));
}

json context_to_jsonv(const ClosureContext& c) {
  json j;
  j["conv"] = bound_to_jsonv(c.conv);
  j["inj"] = bound_to_jsonv(c.inj);
  j["two_point_homogeneous"] = c.two_point_homogeneous;
  j["periodic_period_one"] = c.periodic_period_one;
  j["map_regularity"] = c.map_regularity == Regularity::Surjective ? "surjective" : "continuous";
  if (c.model) {
    j["model"] = c.model->id();
    if (c.model->kind == ModelKind::Sphere && c.model->radius != 1.0) j["radius"] = c.model->radius;
    if (c.model->kind == ModelKind::Hyperbolic && c.model->curvature != -1.0) j["curvature"] = c.model->curvature;
  }
  j["rbar_tol"] = c.rbar_tol;
  j["rbar_budget"] = c.rbar_budget;
  j["rbar_seed"] = c.rbar_seed;
  return j;
}

ClosureContext context_from_jsonv(const json& j) {
  ClosureContext c;
  c.conv = bound_from_jsonv(j.at("conv"));
  c.inj = bound_from_jsonv(j.at("inj"));
  c.two_point_homogeneous = j.at("two_point_homogeneous").get<bool>();
  c.periodic_period_one = j.at("periodic_period_one").get<bool>();
  std::string reg = j.at("map_regularity").get<std::string>();
  if (reg == "surjective")
    c.map_regularity = Regularity::Surjective;
  else if (reg == "continuous")
    c.map_regularity = Regularity::Continuous;
  else
    fail(ErrorKind::Parameter, "unknown map regularity '" + reg + "'");
  if (j.contains("model"))
    c.model = ManifoldModel::parse(j.at("model").get<std::string>(), j.value("radius", 1.0), j.value("curvature", -1.0));
  c.rbar_tol = j.value("rbar_tol", 1e-6);
  c.rbar_budget = j.value("rbar_budget", 4000);
  c.rbar_seed = j.value("rbar_seed", std::uint64_t{1});
  return c;
}

json step_to_jsonv(const DerivationStep& s) {
  json j;
  j["rule"] = rule_name(s.rule);
  j["lemma"] = s.lemma;
  j["inputs"] = s.inputs;
  j["output"] = scalar_to_jsonv(s.output);
  if (s.param) j["param"] = *s.param;
  return j;
}

DerivationStep step_from_jsonv(const json& j) {
  DerivationStep s;
  s.rule = rule_from_name(j.at("rule").get<std::string>());
  s.lemma = j.value("lemma", rule_lemma(s.rule));
  s.inputs = j.at("inputs").get<std::vector<std::size_t>>();
  s.output = scalar_from_jsonv(j.at("output"));
  if (j.contains("param")) s.param = j.at("param").get<long long>();
  return s;
}

json certificate_to_jsonv(const DerivationCertificate& cert) {
  json j;
  j["schema"] = "rigidity-lab/v1";
  j["kind"] = "derivation-certificate";
  j["strategy"] = cert.strategy;
  json seeds = json::array();
  for (const Scalar& s : cert.seeds) seeds.push_back(scalar_to_jsonv(s));
  j["seeds"] = seeds;
  j["context"] = context_to_jsonv(cert.context);
  json steps = json::array();
  for (const DerivationStep& s : cert.steps) steps.push_back(step_to_jsonv(s));
  j["steps"] = steps;
  j["epsilon"] = scalar_to_jsonv(cert.epsilon);
  if (cert.achieved) j["achieved"] = scalar_to_jsonv(*cert.achieved);
  return j;
}

}  // namespace

std::string certificate_to_json(const DerivationCertificate& cert) { return certificate_to_jsonv(cert).dump(2); }

std::string derive_outcome_to_json(const DeriveOutcome& out) {
  json j;
  j["schema"] = "rigidity-lab/v1";
  j["kind"] = "closure-derivation";
  j["status"] = derive_status_name(out.status);
  j["report"] = out.report;
  j["certificate"] = certificate_to_jsonv(out.certificate);
  return j.dump(2);
}

std::string verify_report_to_json(const VerifyReport& rep) {
  json j;
  j["schema"] = "rigidity-lab/v1";
  j["kind"] = "closure-verification";
  j["ok"] = rep.ok;
  j["steps"] = rep.lines;
  j["failure"] = rep.failure;
  return j.dump(2);
}

DerivationCertificate certificate_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parameter, std::string("certificate JSON does not parse: ") + e.what());
  }
  try {
    if (j.contains("certificate")) j = j.at("certificate");
    DerivationCertificate cert;
    cert.strategy = j.value("strategy", std::string("unknown"));
    for (const json& s : j.at("seeds")) cert.seeds.push_back(scalar_from_jsonv(s));
    cert.context = context_from_jsonv(j.at("context"));
    for (const json& s : j.at("steps")) cert.steps.push_back(step_from_jsonv(s));
    cert.epsilon = scalar_from_jsonv(j.at("epsilon"));
    if (j.contains("achieved")) cert.achieved = scalar_from_jsonv(j.at("achieved"));
    return cert;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parameter, std::string("certificate JSON is missing required fields: ") + e.what());
  }
}

}  // namespace rigidity
