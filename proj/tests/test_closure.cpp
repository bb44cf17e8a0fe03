#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <functional>

#include "rigidity/closure.hpp"
#include "rigidity/exact.hpp"
#include "rigidity/manifold.hpp"

using namespace rigidity;
using Dec50 = boost::multiprecision::cpp_dec_float_50;

namespace {

Scalar sc(const std::string& text) { return Scalar::parse(text); }

Dec50 dec_of(const Rational& r) { return Dec50(numerator(r).str()) / Dec50(denominator(r).str()); }

bool exact_equal(const Scalar& x, const Scalar& y) {
  REQUIRE(x.is_exact());
  REQUIRE(y.is_exact());
  return x.exact() == y.exact();
}

ClosureContext unconstrained() { return ClosureContext{}; }

ClosureContext with_conv(const std::string& conv) {
  ClosureContext c;
  c.conv = ContextBound::finite(sc(conv));
  return c;
}

// Context for a unit sphere with the lens oracle wired up.  The smaller lens
// budget keeps oracle calls quick without touching their certified accuracy;
// the tight oracle tolerance matters because interval widths compound by
// roughly 2.7x per lens round (the subtraction cannot see the cancellation),
// so ten rounds amplify the per-call width by ~1.3e4.
ClosureContext sphere_ctx() {
  ClosureContext c;
  c.model = ManifoldModel::sphere(2, 1.0);
  c.conv = context_bound(c.model->convexity_radius());
  c.inj = context_bound(c.model->injectivity_radius());
  c.two_point_homogeneous = true;
  c.rbar_budget = 1200;
  c.rbar_tol = 1e-8;
  return c;
}

ClosureContext periodic_ctx() {
  ClosureContext c;
  c.conv = ContextBound::finite(sc("1/4"));
  c.inj = ContextBound::finite(sc("1/2"));
  c.periodic_period_one = true;
  return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("doubling and multiple rules respect the convexity bound") {
  PreservedSet state(with_conv("1"), {sc("3/10")});

  RuleOutcome d = apply_rule(state, RuleId::Double, {0});
  REQUIRE(d.applied());
  CHECK(exact_equal(state.elements[1], sc("3/5")));
  CHECK(d.step->lemma == "doubling-rule");

  // doubling may leave the convex range; doubling from outside it may not
  RuleOutcome d2 = apply_rule(state, RuleId::Double, {1});
  REQUIRE(d2.applied());
  CHECK(exact_equal(state.elements[2], sc("6/5")));
  RuleOutcome d3 = apply_rule(state, RuleId::Double, {2});
  CHECK(!d3.applied());
  CHECK(d3.reason.find("convexity") != std::string::npos);

  RuleOutcome m3 = apply_rule(state, RuleId::Many, {0}, 3);
  REQUIRE(m3.applied());
  CHECK(exact_equal(state.elements.back(), sc("9/10")));
  CHECK(m3.step->param == 3);
  RuleOutcome m4 = apply_rule(state, RuleId::Many, {0}, 4);
  CHECK(!m4.applied());

  PreservedSet open_state(unconstrained(), {sc("3/10")});
  RuleOutcome m_inf = apply_rule(open_state, RuleId::Many, {0}, 2);
  CHECK(!m_inf.applied());
  CHECK(m_inf.reason.find("no finite convexity bound") != std::string::npos);

  CHECK(kind_of([&] { apply_rule(state, RuleId::Double, {0}, 2); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { apply_rule(state, RuleId::Many, {0}); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { apply_rule(state, RuleId::Many, {0}, 0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { apply_rule(state, RuleId::Double, {99}); }) == ErrorKind::Parameter);
}

TEST_CASE("difference rule floors exactly and detects commensurable inputs") {
  PreservedSet state(unconstrained(), {sc("sqrt2"), sc("1")});
  RuleOutcome d = apply_rule(state, RuleId::Diff, {0, 1});
  REQUIRE(d.applied());
  CHECK(exact_equal(state.elements[2], sc("sqrt2-1")));

  RuleOutcome wrong_order = apply_rule(state, RuleId::Diff, {1, 0});
  CHECK(!wrong_order.applied());

  PreservedSet ints(unconstrained(), {sc("2"), sc("1")});
  RuleOutcome z = apply_rule(ints, RuleId::Diff, {0, 1});
  CHECK(!z.applied());
  CHECK(z.commensurable);

  PreservedSet fracs(unconstrained(), {sc("7/2"), sc("1")});
  RuleOutcome f = apply_rule(fracs, RuleId::Diff, {0, 1});
  REQUIRE(f.applied());
  CHECK(exact_equal(fracs.elements.back(), sc("1/2")));
}

TEST_CASE("small-difference rule checks its inequality chain") {
  PreservedSet state(with_conv("2"), {sc("sqrt3"), sc("1")});
  RuleOutcome oy = apply_rule(state, RuleId::Oy, {0, 1});
  REQUIRE(oy.applied());
  CHECK(exact_equal(state.elements.back(), sc("sqrt3-1")));

  PreservedSet far(unconstrained(), {sc("5"), sc("1")});
  RuleOutcome refused = apply_rule(far, RuleId::Oy, {0, 1});
  CHECK(!refused.applied());
  CHECK(refused.reason.find("three times") != std::string::npos);
}

TEST_CASE("interval inputs get conservative treatment") {
  PreservedSet straddle(unconstrained(), {Scalar(Interval(2.9999, 3.0001)), sc("1")});
  CHECK(kind_of([&] { apply_rule(straddle, RuleId::Diff, {0, 1}); }) == ErrorKind::Refinement);

  PreservedSet clear(unconstrained(), {Scalar(Interval(2.5, 2.5000001)), sc("1")});
  RuleOutcome d = apply_rule(clear, RuleId::Diff, {0, 1});
  REQUIRE(d.applied());
  CHECK(clear.elements.back().enclosure().contains(0.5));

  PreservedSet boundary(with_conv("1"), {Scalar(Interval(0.9999999, 1.0000001))});
  CHECK(kind_of([&] { apply_rule(boundary, RuleId::Double, {0}); }) == ErrorKind::Refinement);
}

TEST_CASE("strategy A emits the quadratic-field difference cascade") {
  DeriveOutcome out = derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1/10"), "A");
  REQUIRE(out.status == DeriveStatus::Achieved);
  REQUIRE(out.certificate.steps.size() == 3);
  CHECK(exact_equal(out.certificate.steps[0].output, sc("sqrt2-1")));
  CHECK(exact_equal(out.certificate.steps[1].output, sc("3-2*sqrt2")));
  CHECK(exact_equal(out.certificate.steps[2].output, sc("5*sqrt2-7")));
  REQUIRE(out.certificate.achieved.has_value());
  CHECK(exact_equal(*out.certificate.achieved, sc("5*sqrt2-7")));

  VerifyReport rep = verify_certificate(out.certificate);
  CHECK(rep.ok);
  CHECK(rep.lines.size() == 3);
}

TEST_CASE("strategy A iterates match the convergent recurrence for many steps") {
  DeriveOutcome out = derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1e-6"), "A");
  REQUIRE(out.status == DeriveStatus::Achieved);
  REQUIRE(out.certificate.steps.size() >= 10);

  // independent recurrence for the best rational approximations p/q of sqrt2:
  // p' = p + 2q, q' = p + q; the cascade outputs are |q sqrt2 - p|
  BigInt p = 1, q = 1;
  for (std::size_t i = 0; i < out.certificate.steps.size(); ++i) {
    ExactQuadratic residual(Rational(-p), Rational(q), 2);
    if (residual.sign() < 0) residual = -residual;
    CHECK(out.certificate.steps[i].output.exact() == residual);
    BigInt np = p + 2 * q, nq = p + q;
    p = np;
    q = nq;
  }

  // strict decrease along the whole cascade, and the target is certified
  for (std::size_t i = 1; i < out.certificate.steps.size(); ++i)
    CHECK(scalar_less(out.certificate.steps[i].output, out.certificate.steps[i - 1].output) == Truth::True);
  CHECK(scalar_less(*out.certificate.achieved, sc("1e-6")) == Truth::True);
  CHECK(verify_certificate(out.certificate).ok);
}

TEST_CASE("cascade values agree with an independent decimal backend") {
  DeriveOutcome out = derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1e-6"), "A");
  Dec50 root2 = sqrt(Dec50(2));
  Dec50 a = root2, b = 1;
  for (const DerivationStep& s : out.certificate.steps) {
    Dec50 r = a - floor(a / b) * b;
    const ExactQuadratic& e = s.output.exact();
    Dec50 engine = dec_of(e.rational_part()) + dec_of(e.radical_coefficient()) * root2;
    CHECK(abs(engine - r) < Dec50("1e-30"));
    a = b;
    b = r;
  }
}

TEST_CASE("rational seeds yield a rationality report, not a certificate") {
  DeriveOutcome ints = derive_to_epsilon({sc("2"), sc("1")}, unconstrained(), sc("1e-3"), "A");
  CHECK(ints.status == DeriveStatus::RationalSeeds);
  CHECK(!ints.report.empty());
  CHECK(!ints.certificate.achieved.has_value());
  CHECK(!verify_certificate(ints.certificate).ok);

  DeriveOutcome fracs = derive_to_epsilon({sc("3/2"), sc("3/4")}, unconstrained(), sc("1e-3"), "A");
  CHECK(fracs.status == DeriveStatus::RationalSeeds);
}

TEST_CASE("a seed below epsilon gives an empty-step certificate that verifies") {
  DeriveOutcome out = derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("2"), "A");
  REQUIRE(out.status == DeriveStatus::Achieved);
  CHECK(out.certificate.steps.empty());
  CHECK(exact_equal(*out.certificate.achieved, sc("1")));
  CHECK(verify_certificate(out.certificate).ok);
}

TEST_CASE("lens-diameter rule brackets the flat closed form") {
  ClosureContext ctx;
  ctx.model = ManifoldModel::euclidean(2);
  ctx.two_point_homogeneous = true;
  ctx.rbar_budget = 1200;
  PreservedSet state(ctx, {sc("1")});
  RuleOutcome bar = apply_rule(state, RuleId::Bar, {0});
  REQUIRE(bar.applied());
  const Interval& out = state.elements.back().interval();
  CHECK(out.contains(std::sqrt(3.0)));
  CHECK(out.width() < 2e-6);

  ClosureContext no_flag = ctx;
  no_flag.two_point_homogeneous = false;
  PreservedSet plain(no_flag, {sc("1")});
  CHECK(!apply_rule(plain, RuleId::Bar, {0}).applied());
}

TEST_CASE("lens and small-difference rounds walk a sphere sequence down") {
  ClosureContext ctx = sphere_ctx();
  PreservedSet state(ctx, {sc("1/2")});
  std::size_t cur = 0;
  for (int i = 0; i < 10; ++i) {
    RuleOutcome bar = apply_rule(state, RuleId::Bar, {cur});
    REQUIRE(bar.applied());
    std::size_t bar_idx = state.elements.size() - 1;
    const Scalar& l = state.elements[cur];
    const Scalar& lbar = state.elements[bar_idx];

    // the balanced radius lands strictly inside (l, 2l)
    CHECK(scalar_less(l, lbar) == Truth::True);
    CHECK(scalar_less(lbar, scalar_scale(l, 2)) == Truth::True);

    // closed-form spherical corner law as an independent oracle
    double lm = l.approx();
    double expect = 2.0 * std::acos(std::cos(lm) / std::cos(lm / 2.0));
    CHECK(std::fabs(lbar.approx() - expect) < 1e-3);

    RuleOutcome oy = apply_rule(state, RuleId::Oy, {bar_idx, cur});
    REQUIRE(oy.applied());
    std::size_t next = state.elements.size() - 1;
    CHECK(scalar_less(state.elements[next], state.elements[cur]) == Truth::True);
    CHECK(scalar_positive(state.elements[next]) == Truth::True);
    cur = next;
  }
  double final_value = state.elements[cur].approx();
  CHECK(final_value < 0.05);
  CHECK(final_value > 0.001);
}

TEST_CASE("strategy B derives below epsilon on the unit sphere and replays") {
  DeriveOutcome out = derive_to_epsilon({sc("1/2")}, sphere_ctx(), sc("1/10"), "B");
  REQUIRE(out.status == DeriveStatus::Achieved);
  REQUIRE(out.certificate.achieved.has_value());
  CHECK(scalar_less(*out.certificate.achieved, sc("1/10")) == Truth::True);
  for (const DerivationStep& s : out.certificate.steps)
    CHECK((s.rule == RuleId::Bar || s.rule == RuleId::Oy || s.rule == RuleId::Diff));
  CHECK(verify_certificate(out.certificate).ok);
}

TEST_CASE("strategy C finds a multiple with a small fractional part") {
  DeriveOutcome out = derive_to_epsilon({sc("sqrt2/8")}, periodic_ctx(), sc("1/100"), "C");
  REQUIRE(out.status == DeriveStatus::Achieved);
  REQUIRE(out.certificate.steps.size() == 1);
  const DerivationStep& s = out.certificate.steps[0];
  CHECK(s.rule == RuleId::Frac);
  REQUIRE(s.param.has_value());

  // independent decimal search for the first admissible multiple
  Dec50 r = sqrt(Dec50(2)) / 8;
  long long expect_n = 0;
  for (long long n = 1; n <= 10000 && expect_n == 0; ++n) {
    Dec50 v = r * n;
    Dec50 f = v - floor(v);
    if (f > 0 && f < Dec50("0.01")) expect_n = n;
  }
  CHECK(*s.param == expect_n);
  CHECK(*s.param == 17);

  // exact output is 17 sqrt2 / 8 - 3, and the decimal backend agrees
  ExactQuadratic expect(Rational(-3), Rational(17, 8), 2);
  CHECK(s.output.exact() == expect);
  Dec50 engine = dec_of(s.output.exact().rational_part()) +
                 dec_of(s.output.exact().radical_coefficient()) * sqrt(Dec50(2));
  CHECK(abs(engine - (r * 17 - floor(r * 17))) < Dec50("1e-30"));

  CHECK(verify_certificate(out.certificate).ok);
}

TEST_CASE("strategy C digs deeper for a smaller target and rejects rational seeds") {
  DeriveOutcome out = derive_to_epsilon({sc("sqrt2/8")}, periodic_ctx(), sc("1/2000"), "C");
  REQUIRE(out.status == DeriveStatus::Achieved);
  REQUIRE(out.certificate.steps.size() == 1);
  REQUIRE(out.certificate.steps[0].param.has_value());
  CHECK(scalar_less(*out.certificate.achieved, sc("1/2000")) == Truth::True);
  CHECK(verify_certificate(out.certificate).ok);

  Dec50 r = sqrt(Dec50(2)) / 8;
  long long expect_n = 0;
  for (long long n = 1; n <= 100000 && expect_n == 0; ++n) {
    Dec50 v = r * n;
    Dec50 f = v - floor(v);
    if (f > 0 && f < Dec50("0.0005")) expect_n = n;
  }
  CHECK(*out.certificate.steps[0].param == expect_n);

  DeriveOutcome rat = derive_to_epsilon({sc("1/8")}, periodic_ctx(), sc("1/100"), "C");
  CHECK(rat.status == DeriveStatus::RationalSeeds);
  CHECK(rat.report.find("rational") != std::string::npos);
}

TEST_CASE("fractional-part rule preconditions") {
  PreservedSet state(periodic_ctx(), {sc("sqrt2/8")});
  RuleOutcome direct = apply_rule(state, RuleId::Frac, {0}, 17);
  REQUIRE(direct.applied());
  CHECK(direct.step->output.exact() == ExactQuadratic(Rational(-3), Rational(17, 8), 2));

  PreservedSet no_flag(with_conv("1/4"), {sc("sqrt2/8")});
  CHECK(!apply_rule(no_flag, RuleId::Frac, {0}, 17).applied());

  PreservedSet rational_in(periodic_ctx(), {sc("1/8")});
  CHECK(!apply_rule(rational_in, RuleId::Frac, {0}, 3).applied());

  PreservedSet interval_in(periodic_ctx(), {Scalar(Interval(0.17, 0.18))});
  CHECK(kind_of([&] { apply_rule(interval_in, RuleId::Frac, {0}, 17); }) == ErrorKind::Refinement);

  // frac(3 * sqrt2/8) ~ 0.53 reaches past the injectivity bound of 1/2
  RuleOutcome big = apply_rule(state, RuleId::Frac, {0}, 3);
  CHECK(!big.applied());
  CHECK(big.reason.find("injectivity") != std::string::npos);
}

TEST_CASE("exhaustive strategy reaches the target or reports saturation") {
  DeriveOutcome out = derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1/10"), "exhaustive");
  REQUIRE(out.status == DeriveStatus::Achieved);
  CHECK(verify_certificate(out.certificate).ok);

  DeriveOutcome stuck = derive_to_epsilon({sc("2"), sc("1")}, unconstrained(), sc("3/10"), "exhaustive");
  CHECK(stuck.status == DeriveStatus::BudgetExhausted);
  CHECK(stuck.report.find("progress") != std::string::npos);
}

TEST_CASE("verification flags tampered certificates") {
  DeriveOutcome base = derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1/10"), "A");
  REQUIRE(verify_certificate(base.certificate).ok);

  DerivationCertificate bad_output = base.certificate;
  bad_output.steps[1].output = sc("1/3");
  VerifyReport r1 = verify_certificate(bad_output);
  CHECK(!r1.ok);
  CHECK(r1.failure.find("does not replay") != std::string::npos);

  DerivationCertificate bad_lemma = base.certificate;
  bad_lemma.steps[0].lemma = "no-such-rule";
  CHECK(!verify_certificate(bad_lemma).ok);

  DerivationCertificate bad_achieved = base.certificate;
  bad_achieved.achieved = sc("1/100");
  VerifyReport r2 = verify_certificate(bad_achieved);
  CHECK(!r2.ok);
  CHECK(r2.failure.find("not among") != std::string::npos);

  // a doubling step applied outside the convex range must be rejected on replay
  ClosureContext small = with_conv("1");
  PreservedSet state(small, {sc("3/4")});
  apply_rule(state, RuleId::Double, {0});
  DerivationCertificate cert;
  cert.strategy = "manual";
  cert.seeds = {sc("3/4")};
  cert.context = small;
  cert.steps = state.steps;
  DerivationStep illegal;
  illegal.rule = RuleId::Double;
  illegal.inputs = {1};
  illegal.output = sc("3");
  illegal.lemma = rule_lemma(RuleId::Double);
  cert.steps.push_back(illegal);
  cert.epsilon = sc("10");
  cert.achieved = sc("3/4");
  VerifyReport r3 = verify_certificate(cert);
  CHECK(!r3.ok);
  CHECK(r3.failure.find("precondition") != std::string::npos);
}

TEST_CASE("context validation") {
  ClosureContext bad;
  bad.conv = ContextBound::finite(sc("1"));
  bad.inj = ContextBound::finite(sc("1"));
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::Precondition);

  // equal enclosures of conv = inj / 2 overlap after scaling and must pass
  ClosureContext sphere = sphere_ctx();
  sphere.validate();

  ClosureContext no_model;
  no_model.two_point_homogeneous = true;
  CHECK(kind_of([&] { no_model.validate(); }) == ErrorKind::Parameter);

  CHECK(kind_of([&] { PreservedSet(unconstrained(), {sc("-1")}); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { PreservedSet(unconstrained(), {sc("0")}); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { PreservedSet(unconstrained(), {}); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { derive_to_epsilon({sc("1")}, unconstrained(), sc("0"), "A"); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1"), "Z"); }) ==
        ErrorKind::Parameter);
  CHECK(kind_of([&] { rule_from_name("NOPE"); }) == ErrorKind::Parameter);
}

TEST_CASE("certificates round-trip through JSON deterministically") {
  DeriveOutcome a = derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1e-6"), "A");
  std::string json_a = derive_outcome_to_json(a);
  std::string json_a2 = derive_outcome_to_json(derive_to_epsilon({sc("1"), sc("sqrt2")}, unconstrained(), sc("1e-6"), "A"));
  CHECK(json_a == json_a2);

  DerivationCertificate back = certificate_from_json(json_a);
  CHECK(verify_certificate(back).ok);
  CHECK(certificate_to_json(back) == certificate_to_json(a.certificate));

  DeriveOutcome c = derive_to_epsilon({sc("sqrt2/8")}, periodic_ctx(), sc("1/100"), "C");
  DerivationCertificate c_back = certificate_from_json(certificate_to_json(c.certificate));
  CHECK(verify_certificate(c_back).ok);
  REQUIRE(c_back.steps.size() == 1);
  CHECK(c_back.steps[0].param == 17);

  CHECK(kind_of([] { certificate_from_json("{"); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { certificate_from_json("{\"seeds\": []}"); }) == ErrorKind::Parameter);
}

TEST_CASE("interval certificates round-trip bit-exactly") {
  DeriveOutcome b = derive_to_epsilon({sc("1/2")}, sphere_ctx(), sc("1/10"), "B");
  REQUIRE(b.status == DeriveStatus::Achieved);
  std::string text = certificate_to_json(b.certificate);
  DerivationCertificate back = certificate_from_json(text);
  CHECK(certificate_to_json(back) == text);
  CHECK(verify_certificate(back).ok);
}
