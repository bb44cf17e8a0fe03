#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rigidity/manifold.hpp"

namespace rigidity {

// The two inequalities |r1 - r2| <= d(x1, x2) <= r1 + r2, evaluated with no
// radius-range guard.  Callers reasoning about spheres beyond the convexity
// radius get only the one-way guarantee (nonempty implies the inequalities).
bool sphere_intersection_inequalities(const ManifoldModel& m, const Point& x1, double r1, const Point& x2, double r2);

// Emptiness predicate for two metric spheres.  With both radii inside
// (0, conv) the inequalities above are equivalent to the spheres meeting, so
// radii outside that range raise ErrorKind::Precondition: past the convexity
// radius the equivalence genuinely fails (run `rigidity counterexample run
// ex4` for a demonstration), so a boolean answer would be misleading.
bool intersect_predicate(const ManifoldModel& m, const Point& x1, double r1, const Point& x2, double r2);

// How many points two metric spheres share.
enum class IntersectionTag { Empty, Singleton, Continuum };

struct IntersectionClass {
  IntersectionTag tag = IntersectionTag::Empty;
  std::optional<Point> witness;  // present for Singleton and Continuum
};

// Constructive companion of the predicate.  Follows the connecting geodesic
// through the centres to the two points it cuts out of the second sphere,
// joins them by a path on that sphere, and bisects d(x1, .) - r1 along it.
// Accepts either both radii in (0, conv) or the one-sided hypothesis
// 0 < r2 <= min(r1, inj); under the latter the inequalities no longer
// guarantee a common point and the result may legitimately be empty.
struct WitnessResult {
  std::optional<Point> point;
  double residual = 0.0;       // max_i |d(x_i, z) - r_i| at the returned point
  int bisection_steps = 0;
  bool bracketed = false;      // the path search saw a sign change
};

WitnessResult intersect_witness(const ManifoldModel& m, const Point& x1, double r1, const Point& x2, double r2,
                                double tol = 1e-7);

// Empty / Singleton / Continuum with an explicit witness where one exists.
// Boundary cases (external tangency d = r1 + r2, internal tangency
// d = |r1 - r2| > 0) are detected first, with distance tolerance 1e-9, and
// their witness is placed directly on the connecting geodesic.
IntersectionClass classify_intersection(const ManifoldModel& m, const Point& x1, double r1, const Point& x2, double r2);

// Lower-bound estimate of the diameter of D^x_r ∩ D^y_r ("the lens"),
// obtained from rejection-sampled interior points plus a projected local
// maximization of the pairwise distance.  budget counts sampling draws.
// Deterministic for a fixed seed.  (Draws could be farmed out by seeding
// worker w with seed + w and reducing the pairwise maximum in index order;
// this implementation keeps the single-stream order.)
struct LensDiameter {
  double value = 0.0;
  double error_bound = 0.0;  // conservative bound on the underestimate
  Point far_a, far_b;        // realising pair
};

LensDiameter lens_diameter(const ManifoldModel& m, const Point& x, const Point& y, double r, int budget = 4000,
                           std::uint64_t seed = 1);

// t |-> lens diameter at centre separation t, uniformly sampled on [0, 2r].
struct LensSample {
  double t = 0.0;
  double g = 0.0;
  double error_bound = 0.0;
};

struct LensProfile {
  double r = 0.0;
  std::vector<LensSample> samples;
  double tolerance = 0.0;  // max of the per-sample error bounds
};

LensProfile lens_profile(const ManifoldModel& m, double r, int sample_count, int budget = 4000, std::uint64_t seed = 1);

// The unique centre separation in (r, 2r) at which the lens diameter equals
// r, bisected to a certified interval of width <= tol.  Demands a model that
// looks the same around every base pair (all four do; the torus stays safely
// below its homogeneity scale because r < conv is required).
struct RBarResult {
  double r = 0.0;
  double lo = 0.0;  // certified enclosure of rbar(r)
  double hi = 0.0;
  int iterations = 0;
};

RBarResult rbar(const ManifoldModel& m, double r, double tol = 1e-6, int budget = 4000, std::uint64_t seed = 1);

}  // namespace rigidity
