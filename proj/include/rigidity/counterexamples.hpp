#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/exact.hpp"
#include "rigidity/manifold.hpp"

namespace rigidity {

enum class ExampleId { Ex1, Ex2, Ex3, Ex4 };

const char* example_name(ExampleId id);  // "ex1" .. "ex4"
ExampleId example_from_name(const std::string& name);

// Region of a sphere given as a finite union of closed caps, required to be
// closed under the antipodal map: for every cap the cap with the opposite
// centre and the same angular radius must also be listed.
struct CapSpec {
  Point center;
  double angular_radius = 0.0;
};

class AntipodalRegion {
 public:
  AntipodalRegion(ManifoldModel sphere, std::vector<CapSpec> caps);

  // A symmetric pair of caps of the given angular radius about the sampling
  // origin and its antipode.
  static AntipodalRegion default_caps(const ManifoldModel& sphere, double angular_radius = kDefaultCapRadius);

  bool contains(const Point& p) const;
  const ManifoldModel& sphere() const { return sphere_; }
  const std::vector<CapSpec>& caps() const { return caps_; }

  static constexpr double kDefaultCapRadius = 0.39269908169872414;  // pi / 8

 private:
  ManifoldModel sphere_;
  std::vector<CapSpec> caps_;
};

// One of the four concrete maps used to probe which hypotheses are load
// bearing.  Three are evaluatable:
//
//   Ex1  line bijection, adds one to rationals and fixes irrationals;
//        total on the exactly-representable quadratic-field numbers, so it
//        has no floating-point evaluation path (rationality of a double is
//        meaningless) and its domain carries no model object
//   Ex2  sphere bijection, antipodal map on a symmetric cap region and the
//        identity elsewhere; an involution
//   Ex3  plane to 6-space, each point goes to the simplex vertex indexed by
//        its hexagon colour; image has at most 7 points
//
// Ex4 is not a map at all but a configuration of radii past the convexity
// bound; building it yields a carrier whose evaluation paths error, and the
// actual content lives in example4_demo().
class CandidateMap {
 public:
  ExampleId id() const { return id_; }
  bool bijective() const { return id_ == ExampleId::Ex1 || id_ == ExampleId::Ex2; }

  // Absent for Ex1: the symbolic line sits below the dimension-2 floor of
  // the model layer.
  const std::optional<ManifoldModel>& domain() const { return domain_; }
  const std::optional<ManifoldModel>& codomain() const { return codomain_; }
  std::string domain_label() const;
  std::string codomain_label() const;

  Point evaluate(const Point& p) const;             // Ex2, Ex3
  Point evaluate_inverse(const Point& p) const;     // Ex2 (self-inverse)
  ExactQuadratic evaluate_symbolic(const ExactQuadratic& x) const;          // Ex1
  ExactQuadratic evaluate_symbolic_inverse(const ExactQuadratic& x) const;  // Ex1

  const AntipodalRegion& region() const;            // Ex2
  const std::vector<Point>& simplex_vertices() const;  // Ex3, 7 points in e6
  double hex_diameter() const { return hex_diameter_; }

 private:
  friend CandidateMap build_example(ExampleId, const struct ExampleParams&);

  ExampleId id_ = ExampleId::Ex1;
  std::optional<ManifoldModel> domain_, codomain_;
  std::optional<AntipodalRegion> region_;
  std::vector<Point> simplex_;
  double hex_diameter_ = 0.0;
};

struct ExampleParams {
  std::optional<AntipodalRegion> region;  // Ex2; default pair of antipodal caps
  int sphere_dim = 2;                     // Ex2, when no region is given
  double hex_diameter = 0.9;              // Ex3
};

CandidateMap build_example(ExampleId id, const ExampleParams& params = {});

// Colour in {1..7} of the hexagon containing p, for the 7-periodic tiling of
// the plane by flat-top hexagons of the given diameter.  Points on cell
// boundaries are assigned deterministically by the rounding convention, so
// the colouring is total.  Diameters outside (2/sqrt(7), 1) are rejected:
// above 1 a single hexagon holds two points at distance one, at or below
// 2/sqrt(7) two same-coloured hexagons do.
int hex_color(const Point& p, double hex_diameter = 0.9);

// The vertices of a regular 7-vertex simplex with unit edges in e6.
std::vector<Point> unit_simplex_e6();

enum class Verdict { Consistent, Refuted };
const char* verdict_name(Verdict v);  // "consistent-with-membership" / "refuted(witness)"

// One sampled pair whose distance the map failed to carry over, recorded
// with enough precision to replay the evaluation exactly.
struct AuditViolation {
  std::string direction;               // "forward" or "converse"
  std::vector<double> x, y;            // numeric domain coordinates
  std::string x_symbolic, y_symbolic;  // exact forms (Ex1 audits)
  double domain_distance = 0.0;
  double image_distance = 0.0;
};

// Sampling evidence about one candidate distance.  The forward side checks
// d(x,y) = r implies d(f(x),f(y)) = r on pairs constructed at distance
// exactly r; the converse side (bijective maps only) runs the same check for
// the inverse map.  Verdicts never claim membership: a clean sample is only
// consistent with it, while one recorded violation refutes it.
struct AuditReport {
  ExampleId id = ExampleId::Ex1;
  std::string r_text;
  double r_value = 0.0;
  int pairs_tested = 0;  // per direction
  int preserved_forward = 0;
  int violations_forward = 0;
  Verdict forward = Verdict::Consistent;
  std::optional<int> preserved_converse;
  std::optional<int> violations_converse;
  std::optional<Verdict> converse;
  std::vector<AuditViolation> violation_samples;  // at most kMaxRecorded per direction

  static constexpr int kMaxRecorded = 8;
};

// Tolerance for numeric distance preservation; symbolic audits compare
// exactly and ignore it.
inline constexpr double kAuditDistanceTol = 1e-9;

AuditReport audit_distance(const CandidateMap& map, const Scalar& r, int n, std::uint64_t seed);

std::string audit_report_to_json(const AuditReport& rep);

// Radii past the convexity bound where the two inequalities no longer force
// the spheres to meet: antipodal centres on the unit 2-sphere, r1 in
// (pi/2, pi), r2 in (pi - r1, r1).  Every grid cell has the inequalities
// holding while the witness search certifies emptiness; the boundary case
// r2 = pi - r1 degenerates to coincident spheres and a common point
// reappears, and pulling both radii under the bound restores the usual
// equivalence.
struct Example4Cell {
  double r1 = 0.0, r2 = 0.0;
  bool inequalities_hold = false;
  bool witness_empty = false;
};

struct Example4Report {
  double separation = 0.0;  // distance between the chosen centres
  double twice_conv = 0.0;
  std::vector<Example4Cell> grid;  // 10 x 10 interior cells
  Example4Cell tangency;           // r2 = pi - r1: nonempty
  Example4Cell restored;           // both radii under the bound
  bool all_confirmed = false;
};

Example4Report example4_demo();

std::string example4_report_to_json(const Example4Report& rep);

}  // namespace rigidity
