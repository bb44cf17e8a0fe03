#include "rigidity/counterexamples.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "json.hpp"
#include "rigidity/intersections.hpp"

namespace rigidity {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kCapMatchTol = 1e-9;  // pairing caps with their antipodal partners

Point antipode(const Point& p) {
  std::vector<double> c = p.coords;
  for (double& v : c) v = -v;
  return Point(p.model, std::move(c));
}

void require_hex_diameter(double d) {
  if (!(d > 2.0 / std::sqrt(7.0)) || !(d < 1.0))
    fail(ErrorKind::Parameter,
         "hexagon diameter " + std::to_string(d) + " is outside (2/sqrt(7), 1): larger cells hold a unit pair, "
         "smaller ones put two same-coloured cells a unit apart");
}

void require_plane(const Point& p) {
  if (p.model.kind != ModelKind::Euclidean || p.model.dim != 2)
    fail(ErrorKind::ModelMismatch, "hex_color expects a point of e2");
}

}  // namespace

const char* example_name(ExampleId id) {
  switch (id) {
    case ExampleId::Ex1: return "ex1";
    case ExampleId::Ex2: return "ex2";
    case ExampleId::Ex3: return "ex3";
    case ExampleId::Ex4: return "ex4";
  }
  fail(ErrorKind::Internal, "unknown example id");
}

ExampleId example_from_name(const std::string& name) {
  for (ExampleId id : {ExampleId::Ex1, ExampleId::Ex2, ExampleId::Ex3, ExampleId::Ex4})
    if (name == example_name(id)) return id;
  fail(ErrorKind::Parameter, "unknown example '" + name + "' (want ex1..ex4)");
}

AntipodalRegion::AntipodalRegion(ManifoldModel sphere, std::vector<CapSpec> caps)
    : sphere_(std::move(sphere)), caps_(std::move(caps)) {
  if (sphere_.kind != ModelKind::Sphere) fail(ErrorKind::Parameter, "the region lives on a sphere model");
  if (caps_.empty()) fail(ErrorKind::Parameter, "the region needs at least one cap");
  double half_circ = kPi * sphere_.radius;
  for (const CapSpec& cap : caps_) {
    if (cap.center.model != sphere_) fail(ErrorKind::ModelMismatch, "cap centre belongs to a different model");
    if (!(cap.angular_radius > 0.0) || !(cap.angular_radius < half_circ))
      fail(ErrorKind::Parameter, "cap radius must lie in (0, pi R)");
  }
  for (const CapSpec& cap : caps_) {
    Point anti = antipode(cap.center);
    bool paired = false;
    for (const CapSpec& other : caps_)
      if (distance(sphere_, anti, other.center) < kCapMatchTol &&
          std::fabs(other.angular_radius - cap.angular_radius) < kCapMatchTol) {
        paired = true;
        break;
      }
    if (!paired)
      fail(ErrorKind::Precondition,
           "region is not closed under the antipodal map: a cap is missing its opposite partner");
  }
}

AntipodalRegion AntipodalRegion::default_caps(const ManifoldModel& sphere, double angular_radius) {
  Point pole = model_origin(sphere);
  std::vector<CapSpec> caps{{pole, angular_radius}, {antipode(pole), angular_radius}};
  return AntipodalRegion(sphere, std::move(caps));
}

bool AntipodalRegion::contains(const Point& p) const {
  for (const CapSpec& cap : caps_)
    if (distance(sphere_, p, cap.center) <= cap.angular_radius) return true;
  return false;
}

std::string CandidateMap::domain_label() const { return domain_ ? domain_->id() : "e1"; }
std::string CandidateMap::codomain_label() const { return codomain_ ? codomain_->id() : "e1"; }

Point CandidateMap::evaluate(const Point& p) const {
  switch (id_) {
    case ExampleId::Ex1:
      fail(ErrorKind::Parameter, "the line bijection acts on exactly-representable numbers; use the symbolic form");
    case ExampleId::Ex2:
      if (p.model != *domain_) fail(ErrorKind::ModelMismatch, "point belongs to a different model");
      return region_->contains(p) ? antipode(p) : p;
    case ExampleId::Ex3:
      return simplex_[static_cast<std::size_t>(hex_color(p, hex_diameter_)) - 1];
    case ExampleId::Ex4:
      fail(ErrorKind::Parameter, "the beyond-convexity configuration is not a map; run its demo");
  }
  fail(ErrorKind::Internal, "unknown example id");
}

Point CandidateMap::evaluate_inverse(const Point& p) const {
  if (id_ != ExampleId::Ex2) fail(ErrorKind::Parameter, "only the sphere bijection has a numeric inverse");
  return evaluate(p);  // flipping the region twice is the identity
}

ExactQuadratic CandidateMap::evaluate_symbolic(const ExactQuadratic& x) const {
  if (id_ != ExampleId::Ex1) fail(ErrorKind::Parameter, "only the line bijection acts on symbolic numbers");
  return x.is_rational() ? x + ExactQuadratic(1) : x;
}

ExactQuadratic CandidateMap::evaluate_symbolic_inverse(const ExactQuadratic& x) const {
  if (id_ != ExampleId::Ex1) fail(ErrorKind::Parameter, "only the line bijection acts on symbolic numbers");
  return x.is_rational() ? x - ExactQuadratic(1) : x;
}

const AntipodalRegion& CandidateMap::region() const {
  if (!region_) fail(ErrorKind::Parameter, "this example has no sphere region");
  return *region_;
}

const std::vector<Point>& CandidateMap::simplex_vertices() const {
  if (simplex_.empty()) fail(ErrorKind::Parameter, "this example has no simplex image");
  return simplex_;
}

CandidateMap build_example(ExampleId id, const ExampleParams& params) {
  CandidateMap m;
  m.id_ = id;
  switch (id) {
    case ExampleId::Ex1:
      break;  // symbolic line, no model objects
    case ExampleId::Ex2: {
      AntipodalRegion region =
          params.region ? *params.region : AntipodalRegion::default_caps(ManifoldModel::sphere(params.sphere_dim, 1.0));
      m.domain_ = region.sphere();
      m.codomain_ = region.sphere();
      m.region_ = std::move(region);
      break;
    }
    case ExampleId::Ex3:
      require_hex_diameter(params.hex_diameter);
      m.domain_ = ManifoldModel::euclidean(2);
      m.codomain_ = ManifoldModel::euclidean(6);
      m.hex_diameter_ = params.hex_diameter;
      m.simplex_ = unit_simplex_e6();
      break;
    case ExampleId::Ex4:
      m.domain_ = ManifoldModel::sphere(2, 1.0);
      m.codomain_ = ManifoldModel::sphere(2, 1.0);
      break;
  }
  return m;
}

int hex_color(const Point& p, double hex_diameter) {
  require_plane(p);
  require_hex_diameter(hex_diameter);
  double size = hex_diameter / 2.0;  // circumradius of a flat-top cell
  double x = p.coords[0], y = p.coords[1];
  double aq = (2.0 / 3.0) * x / size;
  double ar = (-1.0 / 3.0 * x + std::sqrt(3.0) / 3.0 * y) / size;

  // cube rounding: snap to the nearest cell centre, repairing the
  // coordinate with the largest rounding error so q + r + s stays zero
  double cx = aq, cz = ar, cy = -cx - cz;
  double rx = std::round(cx), ry = std::round(cy), rz = std::round(cz);
  double dx = std::fabs(rx - cx), dy = std::fabs(ry - cy), dz = std::fabs(rz - cz);
  if (dx > dy && dx > dz)
    rx = -ry - rz;
  else if (dy > dz)
    ry = -rx - rz;
  else
    rz = -rx - ry;

  long long q = static_cast<long long>(rx), r = static_cast<long long>(rz);
  return static_cast<int>(((q + 3 * r) % 7 + 7) % 7) + 1;
}

std::vector<Point> unit_simplex_e6() {
  ManifoldModel e6 = ManifoldModel::euclidean(6);
  std::vector<std::vector<double>> v;
  v.push_back(std::vector<double>(6, 0.0));
  // each new vertex sits over the centroid of the previous ones, lifted along
  // a fresh coordinate axis to put it at distance one from all of them
  for (int k = 1; k <= 6; ++k) {
    std::vector<double> c(6, 0.0);
    for (const std::vector<double>& u : v)
      for (int i = 0; i < 6; ++i) c[i] += u[i];
    for (int i = 0; i < 6; ++i) c[i] /= static_cast<double>(v.size());
    double rho2 = 0.0;
    for (int i = 0; i < 6; ++i) rho2 += (v[0][i] - c[i]) * (v[0][i] - c[i]);
    c[k - 1] = std::sqrt(1.0 - rho2);
    v.push_back(std::move(c));
  }
  std::vector<Point> out;
  out.reserve(v.size());
  for (std::vector<double>& u : v) out.emplace_back(e6, std::move(u));
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent-with-membership";
    case Verdict::Refuted: return "refuted(witness)";
  }
  fail(ErrorKind::Internal, "unknown verdict");
}

namespace {

void record_violation(AuditReport& rep, AuditViolation violation) {
  int recorded = 0;
  for (const AuditViolation& v : rep.violation_samples)
    if (v.direction == violation.direction) ++recorded;
  if (recorded < AuditReport::kMaxRecorded) rep.violation_samples.push_back(std::move(violation));
}

// Pairs on the symbolic line: a quadratic-field base point (rational or not,
// radicand matched to r so the arithmetic stays inside one field) moved by
// exactly r in a random direction.
void audit_symbolic_line(const CandidateMap& map, const ExactQuadratic& r, int n, std::uint64_t seed,
                         AuditReport& rep) {
  std::uint64_t d = r.radicand() != 0 ? r.radicand() : 2;
  auto run = [&](bool converse, std::uint64_t stream_seed, int& preserved, int& violations) {
    std::mt19937_64 rng(stream_seed);
    std::uniform_int_distribution<int> num(-40, 40);
    std::uniform_int_distribution<int> den(1, 12);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < n; ++i) {
      Rational a(num(rng), den(rng));
      Rational b = coin(rng) ? Rational(num(rng), den(rng)) : Rational(0);
      ExactQuadratic x(a, b, b == 0 ? 0 : d);
      ExactQuadratic y = coin(rng) ? x + r : x - r;
      ExactQuadratic fx = converse ? map.evaluate_symbolic_inverse(x) : map.evaluate_symbolic(x);
      ExactQuadratic fy = converse ? map.evaluate_symbolic_inverse(y) : map.evaluate_symbolic(y);
      ExactQuadratic image = fy - fx;
      if (image.sign() < 0) image = -image;
      if (image == r) {
        ++preserved;
      } else {
        ++violations;
        AuditViolation v;
        v.direction = converse ? "converse" : "forward";
        v.x_symbolic = x.str();
        v.y_symbolic = y.str();
        v.domain_distance = r.approx();
        v.image_distance = image.approx();
        record_violation(rep, std::move(v));
      }
    }
  };
  run(false, seed, rep.preserved_forward, rep.violations_forward);
  rep.forward = rep.violations_forward == 0 ? Verdict::Consistent : Verdict::Refuted;
  int pc = 0, vc = 0;
  run(true, seed + 1, pc, vc);
  rep.preserved_converse = pc;
  rep.violations_converse = vc;
  rep.converse = vc == 0 ? Verdict::Consistent : Verdict::Refuted;
}

// Pairs at distance exactly r built by shooting a geodesic from a sampled
// base point in a sampled direction.
void audit_numeric(const CandidateMap& map, double r, int n, std::uint64_t seed, AuditReport& rep) {
  const ManifoldModel& dom = *map.domain();
  const ManifoldModel& cod = *map.codomain();
  if (dom.kind == ModelKind::Sphere && r > kPi * dom.radius + 1e-12)
    fail(ErrorKind::Precondition, "distance " + std::to_string(r) + " is not realized on the sphere");

  auto run = [&](bool converse, std::uint64_t stream_seed, int& preserved, int& violations) {
    Sampler sampler(stream_seed);
    for (int i = 0; i < n; ++i) {
      Point x = sampler.random_point(dom);
      TangentVector u = sampler.random_unit_tangent(x);
      Point y = exp_map(dom, x, u, r);
      Point fx = converse ? map.evaluate_inverse(x) : map.evaluate(x);
      Point fy = converse ? map.evaluate_inverse(y) : map.evaluate(y);
      double image = distance(converse ? dom : cod, fx, fy);
      if (std::fabs(image - r) <= kAuditDistanceTol) {
        ++preserved;
      } else {
        ++violations;
        AuditViolation v;
        v.direction = converse ? "converse" : "forward";
        v.x = x.coords;
        v.y = y.coords;
        v.domain_distance = distance(dom, x, y);
        v.image_distance = image;
        record_violation(rep, std::move(v));
      }
    }
  };
  run(false, seed, rep.preserved_forward, rep.violations_forward);
  rep.forward = rep.violations_forward == 0 ? Verdict::Consistent : Verdict::Refuted;
  if (map.bijective()) {
    int pc = 0, vc = 0;
    run(true, seed + 1, pc, vc);
    rep.preserved_converse = pc;
    rep.violations_converse = vc;
    rep.converse = vc == 0 ? Verdict::Consistent : Verdict::Refuted;
  }
}

}  // namespace

AuditReport audit_distance(const CandidateMap& map, const Scalar& r, int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::Parameter, "audit needs at least one pair");
  if (scalar_positive(r) != Truth::True) fail(ErrorKind::Precondition, "audited distance must be positive");

  AuditReport rep;
  rep.id = map.id();
  rep.r_text = r.str();
  rep.r_value = r.approx();
  rep.pairs_tested = n;
  switch (map.id()) {
    case ExampleId::Ex1:
      if (!r.is_exact()) fail(ErrorKind::Parameter, "the symbolic audit needs an exactly-given distance");
      audit_symbolic_line(map, r.exact(), n, seed, rep);
      break;
    case ExampleId::Ex2:
    case ExampleId::Ex3:
      audit_numeric(map, r.approx(), n, seed, rep);
      break;
    case ExampleId::Ex4:
      fail(ErrorKind::Parameter, "the beyond-convexity configuration is not a map; run its demo");
  }
  return rep;
}

Example4Report example4_demo() {
  ManifoldModel m = ManifoldModel::sphere(2, 1.0);
  Point x1 = model_origin(m);
  Point x2 = antipode(x1);

  Example4Report rep;
  rep.separation = distance(m, x1, x2);
  rep.twice_conv = 2.0 * m.convexity_radius().finite_value();

  auto cell = [&](double r1, double r2) {
    Example4Cell c;
    c.r1 = r1;
    c.r2 = r2;
    c.inequalities_hold = sphere_intersection_inequalities(m, x1, r1, x2, r2);
    c.witness_empty = !intersect_witness(m, x1, r1, x2, r2).point.has_value();
    return c;
  };

  bool ok = std::fabs(rep.separation - rep.twice_conv) < 1e-12;
  for (int i = 0; i < 10; ++i) {
    double r1 = kPi / 2.0 + (i + 1) * (kPi / 2.0) / 11.0;
    for (int j = 0; j < 10; ++j) {
      double r2 = (kPi - r1) + (j + 1) * (2.0 * r1 - kPi) / 11.0;
      Example4Cell c = cell(r1, r2);
      ok = ok && c.inequalities_hold && c.witness_empty;
      rep.grid.push_back(c);
    }
  }
  // on the range boundary the two spheres coincide and a point reappears
  rep.tangency = cell(2.0, kPi - 2.0);
  ok = ok && rep.tangency.inequalities_hold && !rep.tangency.witness_empty;
  // back under the convexity bound the inequalities and emptiness agree again
  rep.restored = cell(1.0, 1.0);
  ok = ok && !rep.restored.inequalities_hold && rep.restored.witness_empty;
  rep.all_confirmed = ok;
  return rep;
}

namespace {

json violation_to_jsonv(const AuditViolation& v) {
  json j;
  j["direction"] = v.direction;
  if (!v.x_symbolic.empty()) {
    j["x"] = v.x_symbolic;
    j["y"] = v.y_symbolic;
  } else {
    j["x"] = v.x;
    j["y"] = v.y;
  }
  j["domain_distance"] = v.domain_distance;
  j["image_distance"] = v.image_distance;
  return j;
}

json cell_to_jsonv(const Example4Cell& c) {
  json j;
  j["r1"] = c.r1;
  j["r2"] = c.r2;
  j["inequalities_hold"] = c.inequalities_hold;
  j["witness_empty"] = c.witness_empty;
  return j;
}

}  // namespace

std::string audit_report_to_json(const AuditReport& rep) {
  json j;
  j["schema"] = "rigidity-lab/v1";
  j["kind"] = "audit-report";
  j["example"] = example_name(rep.id);
  j["r"] = {{"text", rep.r_text}, {"value", rep.r_value}};
  j["pairs_tested"] = rep.pairs_tested;
  j["forward"] = {{"preserved", rep.preserved_forward},
                  {"violations", rep.violations_forward},
                  {"verdict", verdict_name(rep.forward)}};
  if (rep.converse)
    j["converse"] = {{"preserved", *rep.preserved_converse},
                     {"violations", *rep.violations_converse},
                     {"verdict", verdict_name(*rep.converse)}};
  json samples = json::array();
  for (const AuditViolation& v : rep.violation_samples) samples.push_back(violation_to_jsonv(v));
  j["violation_samples"] = samples;
  return j.dump(2);
}

std::string example4_report_to_json(const Example4Report& rep) {
  json j;
  j["schema"] = "rigidity-lab/v1";
  j["kind"] = "beyond-convexity-demo";
  j["separation"] = rep.separation;
  j["twice_convexity_radius"] = rep.twice_conv;
  json grid = json::array();
  for (const Example4Cell& c : rep.grid) grid.push_back(cell_to_jsonv(c));
  j["grid"] = grid;
  j["tangency"] = cell_to_jsonv(rep.tangency);
  j["restored"] = cell_to_jsonv(rep.restored);
  j["all_confirmed"] = rep.all_confirmed;
  return j.dump(2);
}

}  // namespace rigidity
