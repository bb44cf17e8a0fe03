#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rigidity/counterexamples.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/exact.hpp"
#include "rigidity/manifold.hpp"

using namespace rigidity;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

// Centre of the flat-top hexagon with axial coordinates (q, r).
Point hex_center(long long q, long long r, double diameter) {
  double size = diameter / 2.0;
  double x = 1.5 * size * static_cast<double>(q);
  double y = size * (std::sqrt(3.0) / 2.0 * static_cast<double>(q) + std::sqrt(3.0) * static_cast<double>(r));
  return Point(ManifoldModel::euclidean(2), {x, y});
}

}  // namespace

TEST_CASE("example names round-trip") {
  for (ExampleId id : {ExampleId::Ex1, ExampleId::Ex2, ExampleId::Ex3, ExampleId::Ex4})
    CHECK(example_from_name(example_name(id)) == id);
  CHECK(kind_of([] { example_from_name("ex9"); }) == ErrorKind::Parameter);
}

TEST_CASE("line bijection preserves every rational distance") {
  CandidateMap f = build_example(ExampleId::Ex1);
  CHECK(f.bijective());
  CHECK_FALSE(f.domain().has_value());
  CHECK(f.domain_label() == "e1");

  AuditReport rep = audit_distance(f, Scalar::parse("1/2"), 10000, 7);
  CHECK(rep.pairs_tested == 10000);
  CHECK(rep.preserved_forward == 10000);
  CHECK(rep.violations_forward == 0);
  CHECK(rep.forward == Verdict::Consistent);
  REQUIRE(rep.converse.has_value());
  CHECK(*rep.preserved_converse == 10000);
  CHECK(*rep.converse == Verdict::Consistent);
  CHECK(rep.violation_samples.empty());

  // the map itself: +1 on rationals, identity elsewhere, inverse undoes it
  ExactQuadratic q = Scalar::parse("3/7").exact();
  ExactQuadratic s = Scalar::parse("1+sqrt2").exact();
  CHECK(f.evaluate_symbolic(q) == Scalar::parse("10/7").exact());
  CHECK(f.evaluate_symbolic(s) == s);
  CHECK(f.evaluate_symbolic_inverse(f.evaluate_symbolic(q)) == q);
}

TEST_CASE("line bijection is refuted at quadratic irrationals") {
  CandidateMap f = build_example(ExampleId::Ex1);
  for (const char* r_text : {"sqrt2", "sqrt3"}) {
    Scalar r = Scalar::parse(r_text);
    AuditReport rep = audit_distance(f, r, 4000, 11);
    CHECK(rep.forward == Verdict::Refuted);
    CHECK(rep.violations_forward > 0);
    CHECK(rep.preserved_forward + rep.violations_forward == rep.pairs_tested);
    REQUIRE(rep.converse.has_value());
    CHECK(*rep.converse == Verdict::Refuted);
    REQUIRE(!rep.violation_samples.empty());
    CHECK(rep.violation_samples.size() <= 2 * AuditReport::kMaxRecorded);

    // every recorded witness replays exactly from its printed form
    for (const AuditViolation& v : rep.violation_samples) {
      ExactQuadratic x = Scalar::parse(v.x_symbolic).exact();
      ExactQuadratic y = Scalar::parse(v.y_symbolic).exact();
      ExactQuadratic fx = v.direction == "forward" ? f.evaluate_symbolic(x) : f.evaluate_symbolic_inverse(x);
      ExactQuadratic fy = v.direction == "forward" ? f.evaluate_symbolic(y) : f.evaluate_symbolic_inverse(y);
      ExactQuadratic gap = fy - fx;
      if (gap.sign() < 0) gap = -gap;
      ExactQuadratic sep = y - x;
      if (sep.sign() < 0) sep = -sep;
      CHECK(sep == r.exact());
      CHECK(gap != r.exact());
      CHECK(gap.approx() == doctest::Approx(v.image_distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("line bijection has no numeric evaluation path") {
  CandidateMap f = build_example(ExampleId::Ex1);
  Point p(ManifoldModel::euclidean(2), {0.0, 0.0});
  CHECK(kind_of([&] { f.evaluate(p); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { f.region(); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { f.simplex_vertices(); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { audit_distance(f, Scalar(Interval(1.41, 1.42)), 10, 1); }) == ErrorKind::Parameter);
}

TEST_CASE("sphere region construction demands antipodal symmetry") {
  ManifoldModel s2 = ManifoldModel::sphere(2, 1.0);
  Point pole = model_origin(s2);

  CHECK(kind_of([&] { AntipodalRegion(s2, {}); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { AntipodalRegion(s2, {{pole, 0.3}}); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { AntipodalRegion(s2, {{pole, 0.0}}); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { AntipodalRegion(ManifoldModel::euclidean(2), {}); }) == ErrorKind::Parameter);

  // mismatched radii across the pair are as bad as a missing partner
  std::vector<double> flipped = pole.coords;
  for (double& c : flipped) c = -c;
  Point anti(s2, flipped);
  CHECK(kind_of([&] { AntipodalRegion(s2, {{pole, 0.3}, {anti, 0.31}}); }) == ErrorKind::Precondition);

  AntipodalRegion region = AntipodalRegion::default_caps(s2);
  CHECK(region.caps().size() == 2);
  CHECK(region.contains(pole));
  CHECK(region.contains(anti));
  Point equator(s2, {0.0, 1.0, 0.0});
  CHECK(distance(s2, pole, equator) == doctest::Approx(kPi / 2.0));
  CHECK_FALSE(region.contains(equator));

  // the same symmetry requirement surfaces through the builder
  CHECK(kind_of([&] {
          ExampleParams params;
          params.region = AntipodalRegion(s2, {{pole, 0.3}});
          build_example(ExampleId::Ex2, params);
        }) == ErrorKind::Precondition);
}

TEST_CASE("sphere bijection is an involution that moves the caps") {
  CandidateMap f = build_example(ExampleId::Ex2);
  const ManifoldModel& s2 = *f.domain();
  Sampler sampler(3);
  int moved = 0;
  for (int i = 0; i < 200; ++i) {
    Point p = sampler.random_point(s2);
    Point once = f.evaluate(p);
    Point twice = f.evaluate(once);
    CHECK(distance(s2, p, twice) < 1e-12);
    double step = distance(s2, p, once);
    if (step > 1e-12) {
      ++moved;
      CHECK(step == doctest::Approx(kPi));  // region points jump to their antipodes
      CHECK(f.region().contains(p));
    } else {
      CHECK_FALSE(f.region().contains(p));
    }
  }
  CHECK(moved > 0);

  Point wrong(ManifoldModel::sphere(3, 1.0), {0.0, 0.0, 0.0, 1.0});
  CHECK(kind_of([&] { f.evaluate(wrong); }) == ErrorKind::ModelMismatch);
  CHECK(kind_of([&] { f.evaluate_symbolic(ExactQuadratic(1)); }) == ErrorKind::Parameter);
}

TEST_CASE("sphere bijection preserves the half-turn and full-turn distances") {
  CandidateMap f = build_example(ExampleId::Ex2);
  for (const char* r_text : {"1.5707963267948966", "3.141592653589793"}) {
    AuditReport rep = audit_distance(f, Scalar::parse(r_text), 2000, 5);
    CHECK(rep.violations_forward == 0);
    CHECK(rep.forward == Verdict::Consistent);
    REQUIRE(rep.converse.has_value());
    CHECK(*rep.violations_converse == 0);
    CHECK(*rep.converse == Verdict::Consistent);
  }
}

TEST_CASE("sphere bijection is refuted at a generic distance") {
  CandidateMap f = build_example(ExampleId::Ex2);
  AuditReport rep = audit_distance(f, Scalar::parse("2/5"), 2000, 5);
  CHECK(rep.forward == Verdict::Refuted);
  CHECK(rep.violations_forward > 0);
  CHECK(rep.preserved_forward + rep.violations_forward == rep.pairs_tested);
  REQUIRE(!rep.violation_samples.empty());

  const ManifoldModel& s2 = *f.domain();
  for (const AuditViolation& v : rep.violation_samples) {
    Point x(s2, v.x);
    Point y(s2, v.y);
    CHECK(distance(s2, x, y) == doctest::Approx(0.4).epsilon(1e-9));
    double image = distance(s2, f.evaluate(x), f.evaluate(y));
    CHECK(image == doctest::Approx(v.image_distance).epsilon(1e-12));
    CHECK(std::fabs(image - 0.4) > kAuditDistanceTol);
    // flipping exactly one endpoint sends the distance to its complement
    CHECK(image == doctest::Approx(kPi - 0.4).epsilon(1e-7));
  }
}

TEST_CASE("hexagon colouring is constant on cells and proper on neighbours") {
  // the 7 cells around the origin wear all 7 colours
  std::set<int> colors;
  const long long axial[7][2] = {{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, -1}, {-1, 1}};
  for (const auto& qr : axial) {
    int c = hex_color(hex_center(qr[0], qr[1], 0.9));
    CHECK(1 <= c);
    CHECK(c <= 7);
    colors.insert(c);
  }
  CHECK(colors.size() == 7);

  // nearby points inside one cell share its colour
  Point center = hex_center(2, -1, 0.9);
  Point nudged(ManifoldModel::euclidean(2), {center.coords[0] + 0.08, center.coords[1] - 0.05});
  CHECK(hex_color(center) == hex_color(nudged));

  // same-colour translates repeat on a coarse sublattice
  CHECK(hex_color(hex_center(0, 0, 0.9)) == hex_color(hex_center(1, 2, 0.9)));
  CHECK(hex_color(hex_center(0, 0, 0.9)) == hex_color(hex_center(3, -1, 0.9)));

  CHECK(kind_of([] { hex_color(hex_center(0, 0, 0.9), 1.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { hex_color(hex_center(0, 0, 0.9), 0.7559); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { hex_color(Point(ManifoldModel::euclidean(3), {0, 0, 0})); }) == ErrorKind::ModelMismatch);
  CHECK(kind_of([] {
          ExampleParams params;
          params.hex_diameter = 0.5;
          build_example(ExampleId::Ex3, params);
        }) == ErrorKind::Parameter);
}

TEST_CASE("simplex vertices are pairwise at unit distance") {
  std::vector<Point> v = unit_simplex_e6();
  REQUIRE(v.size() == 7);
  ManifoldModel e6 = ManifoldModel::euclidean(6);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      CHECK(distance(e6, v[i], v[j]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plane-to-simplex map finds no monochromatic unit pair") {
  CandidateMap f = build_example(ExampleId::Ex3);
  CHECK_FALSE(f.bijective());
  CHECK(f.domain()->id() == "e2");
  CHECK(f.codomain()->id() == "e6");
  CHECK(f.simplex_vertices().size() == 7);

  AuditReport rep = audit_distance(f, Scalar::parse("1"), 100000, 42);
  CHECK(rep.pairs_tested == 100000);
  CHECK(rep.violations_forward == 0);
  CHECK(rep.forward == Verdict::Consistent);
  CHECK_FALSE(rep.converse.has_value());  // not injective, no converse direction

  // the image really is pinned to the 7 vertices
  Sampler sampler(9);
  std::set<int> seen;
  for (int i = 0; i < 500; ++i) {
    Point p = sampler.random_point(*f.domain());
    Point fp = f.evaluate(p);
    int hit = -1;
    for (int k = 0; k < 7; ++k)
      if (distance(*f.codomain(), fp, f.simplex_vertices()[static_cast<std::size_t>(k)]) < 1e-12) hit = k;
    CHECK(hit >= 0);
    seen.insert(hit);
  }
  CHECK(seen.size() == 7);

  // at a sub-unit distance every pair violates: same cell collapses to one
  // vertex, a crossed boundary jumps a full edge
  AuditReport close_rep = audit_distance(f, Scalar::parse("1/10"), 500, 42);
  CHECK(close_rep.forward == Verdict::Refuted);
  CHECK(close_rep.violations_forward == 500);
  for (const AuditViolation& v : close_rep.violation_samples)
    CHECK((v.image_distance < 1e-9 || v.image_distance > 0.999));
}

TEST_CASE("beyond-convexity configuration refuses to act as a map") {
  CandidateMap f = build_example(ExampleId::Ex4);
  Point p = model_origin(*f.domain());
  CHECK(kind_of([&] { f.evaluate(p); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { audit_distance(f, Scalar::parse("1"), 10, 1); }) == ErrorKind::Parameter);
}

TEST_CASE("beyond-convexity demo separates the inequalities from nonemptiness") {
  Example4Report rep = example4_demo();
  CHECK(rep.separation == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(rep.twice_conv == doctest::Approx(kPi).epsilon(1e-14));
  REQUIRE(rep.grid.size() == 100);
  for (const Example4Cell& c : rep.grid) {
    CHECK(c.r1 > kPi / 2.0);
    CHECK(c.r1 < kPi);
    CHECK(c.r2 > kPi - c.r1);
    CHECK(c.r2 < c.r1);
    CHECK(c.inequalities_hold);
    CHECK(c.witness_empty);
  }
  CHECK(rep.tangency.inequalities_hold);
  CHECK_FALSE(rep.tangency.witness_empty);
  CHECK_FALSE(rep.restored.inequalities_hold);
  CHECK(rep.restored.witness_empty);
  CHECK(rep.all_confirmed);
}

TEST_CASE("audit rejects degenerate requests") {
  CandidateMap f = build_example(ExampleId::Ex2);
  CHECK(kind_of([&] { audit_distance(f, Scalar::parse("1"), 0, 1); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { audit_distance(f, Scalar::parse("-1"), 10, 1); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { audit_distance(f, Scalar::parse("4"), 10, 1); }) == ErrorKind::Precondition);
  CHECK(kind_of([&] { audit_distance(f, Scalar(Interval(-0.1, 0.1)), 10, 1); }) == ErrorKind::Precondition);
}

TEST_CASE("audits are deterministic and serialize faithfully") {
  CandidateMap f = build_example(ExampleId::Ex2);
  AuditReport a = audit_distance(f, Scalar::parse("2/5"), 300, 17);
  AuditReport b = audit_distance(f, Scalar::parse("2/5"), 300, 17);
  std::string ja = audit_report_to_json(a);
  CHECK(ja == audit_report_to_json(b));

  nlohmann::json j = nlohmann::json::parse(ja);
  CHECK(j.at("schema") == "rigidity-lab/v1");
  CHECK(j.at("kind") == "audit-report");
  CHECK(j.at("example") == "ex2");
  CHECK(j.at("r").at("text") == "2/5");
  CHECK(j.at("pairs_tested") == 300);
  CHECK(j.at("forward").at("verdict") == "refuted(witness)");
  CHECK(j.at("forward").at("preserved").get<int>() + j.at("forward").at("violations").get<int>() == 300);
  CHECK(j.at("converse").at("verdict") == "refuted(witness)");
  REQUIRE(j.at("violation_samples").is_array());
  CHECK(!j.at("violation_samples").empty());
  const auto& sample = j.at("violation_samples").at(0);
  CHECK(sample.at("x").is_array());
  CHECK(sample.at("x").size() == 3);

  // symbolic audits print the exact forms instead of coordinates
  AuditReport sym = audit_distance(build_example(ExampleId::Ex1), Scalar::parse("sqrt2"), 200, 17);
  nlohmann::json js = nlohmann::json::parse(audit_report_to_json(sym));
  CHECK(js.at("violation_samples").at(0).at("x").is_string());

  Example4Report demo = example4_demo();
  nlohmann::json jd = nlohmann::json::parse(example4_report_to_json(demo));
  CHECK(jd.at("kind") == "beyond-convexity-demo");
  CHECK(jd.at("grid").size() == 100);
  CHECK(jd.at("all_confirmed") == true);
  CHECK(jd.at("tangency").at("witness_empty") == false);
}
