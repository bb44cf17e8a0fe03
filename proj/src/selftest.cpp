#include "rigidity/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "rigidity/closure.hpp"
#include "rigidity/counterexamples.hpp"
#include "rigidity/exact.hpp"
#include "rigidity/intersections.hpp"

namespace rigidity {

namespace {

struct Check {
  int ran = 0;
  std::string first_fail;

  void expect(bool ok, const std::string& what) {
    ++ran;
    if (!ok && first_fail.empty()) first_fail = what;
  }
};

SuiteResult finish(std::string name, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const Error& e) {
    c.expect(false, std::string("unexpected error: ") + e.what());
  }
  SuiteResult r;
  r.name = std::move(name);
  r.pass = c.first_fail.empty();
  r.detail = r.pass ? std::to_string(c.ran) + " checks" : c.first_fail;
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Longest geodesic parameter kept clear of the cut locus.
double safe_step(const ManifoldModel& m) {
  ExtendedReal inj = m.injectivity_radius();
  return inj < 1e300 ? 0.9 * inj.finite_value() : 2.0;
}

SuiteResult geodesic_round_trip(const ManifoldModel& m, std::uint64_t seed) {
  return finish(m.id() + " geodesic round trip", [&](Check& c) {
    Sampler sampler(seed);
    for (int i = 0; i < 60; ++i) {
      Point x = sampler.random_point(m);
      TangentVector u = sampler.random_unit_tangent(x);
      double t = sampler.uniform(0.05, safe_step(m));
      Point y = exp_map(m, x, u, t);
      double d = distance(m, x, y);
      c.expect(std::fabs(d - t) <= 1e-9, "distance after exp drifted by " + fmt(std::fabs(d - t)));
      TangentVector v = log_map(m, x, y);  // unit initial direction
      double worst = 0.0;
      for (std::size_t k = 0; k < v.components.size(); ++k)
        worst = std::max(worst, std::fabs(v.components[k] - u.components[k]));
      c.expect(worst <= 1e-7, "log does not recover the launch direction, component gap " + fmt(worst));
    }
  });
}

SuiteResult metric_axioms(const ManifoldModel& m, std::uint64_t seed) {
  return finish(m.id() + " metric axioms", [&](Check& c) {
    Sampler sampler(seed + 1);
    for (int i = 0; i < 40; ++i) {
      Point x = sampler.random_point(m);
      Point y = sampler.random_point(m);
      Point z = sampler.random_point(m);
      c.expect(std::fabs(distance(m, x, y) - distance(m, y, x)) <= 1e-12, "distance is not symmetric");
      c.expect(distance(m, x, x) <= 1e-12, "self distance is nonzero");
      c.expect(distance(m, x, z) <= distance(m, x, y) + distance(m, y, z) + 1e-9, "triangle inequality failed");
    }
  });
}

SuiteResult radius_ladder(const ManifoldModel& m) {
  return finish(m.id() + " radius ladder", [&](Check& c) {
    ExtendedReal conv = m.convexity_radius();
    ExtendedReal inj = m.injectivity_radius();
    if (inj < 1e300) {
      c.expect(conv < 1e300, "finite injectivity with infinite convexity");
      c.expect(conv.finite_value() == inj.finite_value() / 2.0, "convexity is not half the injectivity radius");
    } else {
      c.expect(!(conv < 1e300), "infinite injectivity with finite convexity");
    }
  });
}

SuiteResult predicate_witness_agreement(const ManifoldModel& m, std::uint64_t seed) {
  return finish(m.id() + " predicate/witness agreement", [&](Check& c) {
    Sampler sampler(seed + 2);
    ExtendedReal conv = m.convexity_radius();
    double cap = conv < 1e300 ? 0.9 * conv.finite_value() : 1.2;
    for (int i = 0; i < 60; ++i) {
      Point x1 = sampler.random_point(m);
      TangentVector u = sampler.random_unit_tangent(x1);
      double sep = sampler.uniform(0.05, std::min(1.8 * cap, safe_step(m)));
      Point x2 = exp_map(m, x1, u, sep);
      double r1 = sampler.uniform(0.05 * cap, cap);
      double r2 = sampler.uniform(0.05 * cap, cap);
      bool pred = intersect_predicate(m, x1, r1, x2, r2);
      WitnessResult w = intersect_witness(m, x1, r1, x2, r2);
      c.expect(pred == w.point.has_value(), "predicate and witness disagree at separation " + fmt(sep));
      if (w.point) c.expect(w.residual <= 1e-7, "witness residual " + fmt(w.residual));
    }
  });
}

SuiteResult closure_round_trips() {
  return finish("closure derive/verify round trips", [](Check& c) {
    ClosureContext free_ctx;
    DeriveOutcome a = derive_to_epsilon({Scalar::parse("1"), Scalar::parse("sqrt2")}, free_ctx, Scalar::parse("1/10"), "A");
    c.expect(a.status == DeriveStatus::Achieved, "difference cascade missed its target");
    c.expect(verify_certificate(a.certificate).ok, "difference cascade certificate does not verify");

    ClosureContext periodic;
    periodic.conv = ContextBound::finite(Scalar::parse("1/4"));
    periodic.inj = ContextBound::finite(Scalar::parse("1/2"));
    periodic.periodic_period_one = true;
    DeriveOutcome f = derive_to_epsilon({Scalar::parse("sqrt2/8")}, periodic, Scalar::parse("1/100"), "C");
    c.expect(f.status == DeriveStatus::Achieved, "fractional search missed its target");
    c.expect(verify_certificate(f.certificate).ok, "fractional certificate does not verify");

    ClosureContext sphere_ctx;
    sphere_ctx.model = ManifoldModel::sphere(2, 1.0);
    sphere_ctx.conv = context_bound(sphere_ctx.model->convexity_radius());
    sphere_ctx.inj = context_bound(sphere_ctx.model->injectivity_radius());
    sphere_ctx.two_point_homogeneous = true;
    sphere_ctx.rbar_tol = 1e-8;  // interval widths compound through the loop
    sphere_ctx.rbar_budget = 1200;
    DeriveOutcome b = derive_to_epsilon({Scalar::parse("1/2")}, sphere_ctx, Scalar::parse("1/10"), "B");
    c.expect(b.status == DeriveStatus::Achieved, "lens-diameter loop missed its target");
    c.expect(verify_certificate(b.certificate).ok, "lens-diameter certificate does not verify");

    DeriveOutcome r = derive_to_epsilon({Scalar::parse("1"), Scalar::parse("1/2")}, free_ctx, Scalar::parse("1/10"), "A");
    c.expect(r.status == DeriveStatus::RationalSeeds, "commensurable seeds were not reported");
  });
}

SuiteResult audit_spot_checks() {
  return finish("audit spot checks", [](Check& c) {
    CandidateMap line = build_example(ExampleId::Ex1);
    c.expect(audit_distance(line, Scalar::parse("1/2"), 500, 7).forward == Verdict::Consistent,
             "line bijection broke a rational distance");
    c.expect(audit_distance(line, Scalar::parse("sqrt2"), 500, 7).forward == Verdict::Refuted,
             "line bijection survived sqrt2");

    CandidateMap caps = build_example(ExampleId::Ex2);
    c.expect(audit_distance(caps, Scalar::parse("1.5707963267948966"), 300, 7).forward == Verdict::Consistent,
             "cap swap broke the half-turn distance");
    c.expect(audit_distance(caps, Scalar::parse("2/5"), 300, 7).forward == Verdict::Refuted,
             "cap swap survived a generic distance");

    CandidateMap hex = build_example(ExampleId::Ex3);
    AuditReport unit = audit_distance(hex, Scalar::parse("1"), 2000, 7);
    c.expect(unit.forward == Verdict::Consistent, "hex colouring produced a monochromatic unit pair");
    c.expect(!unit.converse.has_value(), "non-bijective map audited in the converse direction");
  });
}

SuiteResult beyond_convexity_demo() {
  return finish("beyond-convexity demo", [](Check& c) {
    Example4Report rep = example4_demo();
    c.expect(rep.all_confirmed, "demo grid deviated from the expected pattern");
    c.expect(!rep.tangency.witness_empty, "tangency case lost its common point");
    c.expect(rep.restored.witness_empty && !rep.restored.inequalities_hold,
             "restored-bound case regained a spurious intersection");
  });
}

}  // namespace

std::vector<SuiteResult> run_invariant_suites(const std::optional<ManifoldModel>& only, std::uint64_t seed) {
  std::vector<ManifoldModel> models;
  if (only)
    models.push_back(*only);
  else
    models = {ManifoldModel::euclidean(2), ManifoldModel::sphere(2, 1.0), ManifoldModel::hyperbolic(2, -1.0),
              ManifoldModel::flat_torus(2)};

  std::vector<SuiteResult> out;
  for (const ManifoldModel& m : models) {
    out.push_back(geodesic_round_trip(m, seed));
    out.push_back(metric_axioms(m, seed));
    out.push_back(radius_ladder(m));
    out.push_back(predicate_witness_agreement(m, seed));
  }
  out.push_back(closure_round_trips());
  out.push_back(audit_spot_checks());
  out.push_back(beyond_convexity_demo());
  return out;
}

}  // namespace rigidity
