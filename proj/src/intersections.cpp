#include "rigidity/intersections.hpp"

#include <algorithm>
#include <cmath>

namespace rigidity {

namespace {

constexpr double kDistanceTol = 1e-9;  // equality of distances
constexpr int kMaxBisection = 200;
constexpr double kPolishFloor = 1e-10;  // smallest ascent step attempted

// First coordinate axis with a usable projection at x, as a unit tangent.
TangentVector deterministic_direction(const Point& x) {
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    std::vector<double> e(x.coords.size(), 0.0);
    e[i] = 1.0;
    TangentVector t(x, std::move(e));
    if (t.norm() > 1e-6) return t.unit();
  }
  fail(ErrorKind::Internal, "no coordinate direction projects onto the tangent space");
}

// Unit direction u at x with exp(x, u, d(x,y)) == y.  Where log_map refuses
// (cut locus) a minimizing direction still exists and is chosen
// deterministically: on the sphere every direction reaches the antipode, on
// the torus the componentwise nearest translate is used.
TangentVector direction_toward(const ManifoldModel& m, const Point& x, const Point& y) {
  try {
    return log_map(m, x, y);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CutLocus) throw;
  }
  if (m.kind == ModelKind::Sphere) return deterministic_direction(x);
  if (m.kind == ModelKind::FlatTorus) {
    double d = distance(m, x, y);
    std::vector<double> v(x.coords.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double delta = y.coords[i] - x.coords[i];
      if (delta >= 0.5) delta -= 1.0;
      if (delta < -0.5) delta += 1.0;
      v[i] = delta / d;
    }
    return TangentVector(x, std::move(v)).unit();
  }
  fail(ErrorKind::Internal, "cut locus reported on a model without one");
}

void require_radius_in_convexity(const ManifoldModel& m, double r, const char* who) {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::Precondition, std::string(who) + ": radius must be positive");
  if (!(r < m.convexity_radius()))
    fail(ErrorKind::Precondition,
         std::string(who) +
             ": radius reaches the convexity radius, where sphere intersection is no longer governed by the distance "
             "inequalities (see `counterexample run ex4`)");
}

struct LensSetup {
  double t = 0.0;
  Point mid, tip_a, tip_b;
};

// Midpoint of the connecting geodesic and the two axis points at distance r
// from each centre toward the other; for coincident centres a fixed diameter.
LensSetup lens_setup(const ManifoldModel& m, const Point& x, const Point& y, double r) {
  LensSetup s;
  s.t = distance(m, x, y);
  if (s.t < 1e-12) {
    TangentVector dir = deterministic_direction(x);
    s.mid = x;
    s.tip_a = exp_map(m, x, dir, r);
    s.tip_b = exp_map(m, x, dir, -r);
  } else {
    TangentVector u = direction_toward(m, x, y);
    s.mid = exp_map(m, x, u, s.t / 2.0);
    s.tip_a = exp_map(m, x, u, r);
    s.tip_b = exp_map(m, y, direction_toward(m, y, x), r);
  }
  return s;
}

bool inside_ball(const ManifoldModel& m, const Point& c, double r, const Point& z, double slack) {
  return distance(m, c, z) <= r + slack;
}

// Radial pull-back of z into the closed ball about c, for the projection step
// of the ascent.
Point pull_into_ball(const ManifoldModel& m, const Point& c, double r, const Point& z) {
  double d = distance(m, c, z);
  if (d <= r) return z;
  return exp_map(m, c, log_map(m, c, z), r);
}

// Reflection of z across the geodesic through x and y, taken inside the
// totally geodesic 2-plane spanned by the axis direction and the direction of
// z; an isometry fixing x and y in every model here, so it maps one sphere
// crossing point to the other.
Point mirror_across_axis(const ManifoldModel& m, const Point& x, const Point& y, const Point& z) {
  double dz = distance(m, x, z);
  if (dz < 1e-12) return z;
  TangentVector axis = direction_toward(m, x, y);
  TangentVector u = log_map(m, x, z);
  double c = metric_dot(x, u.components, axis.components);
  std::vector<double> w(u.components.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u.components[i] - c * axis.components[i];
  double wn = std::sqrt(std::max(0.0, metric_dot(x, w, w)));
  if (wn < 1e-9) return z;  // z already sits on the axis
  std::vector<double> refl(w.size());
  for (std::size_t i = 0; i < refl.size(); ++i) refl[i] = c * axis.components[i] - w[i];
  return exp_map(m, x, TangentVector(x, std::move(refl)), dz);
}

// Unit probe directions at a moving endpoint: straight away from the anchor,
// every tangent direction orthogonal to that, and the diagonals in between.
// After the pull-back into the balls the orthogonal probes become first-order
// moves along the boundary arcs, which is where the far pair lives.
std::vector<TangentVector> ascent_probes(const Point& at, const TangentVector& to_anchor) {
  std::size_t n = to_anchor.components.size();
  std::vector<std::vector<double>> frame;
  std::vector<double> away(n);
  for (std::size_t i = 0; i < n; ++i) away[i] = -to_anchor.components[i];
  frame.push_back(away);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    std::vector<double> w = tangent_project(at, std::move(e));
    for (const std::vector<double>& f : frame) {
      double c = metric_dot(at, w, f);
      for (std::size_t k = 0; k < n; ++k) w[k] -= c * f[k];
    }
    double wn = std::sqrt(std::max(0.0, metric_dot(at, w, w)));
    if (wn < 1e-8) continue;
    for (double& v : w) v /= wn;
    frame.push_back(std::move(w));
  }

  std::vector<TangentVector> probes;
  probes.emplace_back(at, frame[0]);
  for (std::size_t k = 1; k < frame.size(); ++k) {
    const std::vector<double>& w = frame[k];
    std::vector<double> neg(n), diag_p(n), diag_m(n);
    for (std::size_t i = 0; i < n; ++i) {
      neg[i] = -w[i];
      diag_p[i] = away[i] + w[i];
      diag_m[i] = away[i] - w[i];
    }
    probes.emplace_back(at, w);
    probes.emplace_back(at, std::move(neg));
    probes.emplace_back(at, std::move(diag_p));
    probes.emplace_back(at, std::move(diag_m));
  }
  return probes;
}

}  // namespace

bool sphere_intersection_inequalities(const ManifoldModel& m, const Point& x1, double r1, const Point& x2, double r2) {
  double d = distance(m, x1, x2);
  return std::fabs(r1 - r2) <= d && d <= r1 + r2;
}

bool intersect_predicate(const ManifoldModel& m, const Point& x1, double r1, const Point& x2, double r2) {
  require_radius_in_convexity(m, r1, "intersect_predicate");
  require_radius_in_convexity(m, r2, "intersect_predicate");
  return sphere_intersection_inequalities(m, x1, r1, x2, r2);
}

WitnessResult intersect_witness(const ManifoldModel& m, const Point& x1, double r1, const Point& x2, double r2,
                                double tol) {
  if (m.dim < 2) fail(ErrorKind::Precondition, "intersect_witness: needs dimension >= 2");
  if (!(tol > 0.0)) fail(ErrorKind::Parameter, "intersect_witness: tolerance must be positive");
  auto conv = m.convexity_radius();
  auto inj = m.injectivity_radius();
  bool both_convex = r1 > 0.0 && r2 > 0.0 && r1 < conv && r2 < conv;
  bool one_sided = r2 > 0.0 && r2 <= r1 && r2 <= inj;
  if (!both_convex && !one_sided)
    fail(ErrorKind::Precondition,
         "intersect_witness: needs both radii in (0, conv) or 0 < r2 <= min(r1, inj)");

  WitnessResult out;
  double d = distance(m, x1, x2);

  if (d < 1e-14) {
    // concentric spheres: equal radii share every point, otherwise nothing
    if (std::fabs(r1 - r2) <= tol) {
      out.point = exp_map(m, x2, deterministic_direction(x2), r2);
      out.residual = std::fabs(r1 - r2);
    }
    return out;
  }

  TangentVector dir = direction_toward(m, x1, x2);
  Point a = exp_map(m, x1, dir, d - r2);
  Point b = exp_map(m, x1, dir, d + r2);
  if (std::fabs(distance(m, x2, a) - r2) > 1e-7 || std::fabs(distance(m, x2, b) - r2) > 1e-7)
    fail(ErrorKind::Internal, "intersect_witness: axis points missed the second sphere");
  // null out the float drift (worst near the cut locus) so the path
  // construction sees points exactly on the second sphere
  if (r2 + 1e-9 < m.injectivity_radius()) {
    a = exp_map(m, x2, log_map(m, x2, a), r2);
    b = exp_map(m, x2, log_map(m, x2, b), r2);
  }

  auto f = [&](const Point& z) { return distance(m, x1, z) - r1; };
  double fa = f(a), fb = f(b);

  auto finish = [&](const Point& z) {
    out.point = z;
    out.residual = std::max(std::fabs(f(z)), std::fabs(distance(m, x2, z) - r2));
  };

  if (std::fabs(fa) <= tol) {
    finish(a);
    return out;
  }
  if (std::fabs(fb) <= tol) {
    finish(b);
    return out;
  }
  if ((fa > 0.0) == (fb > 0.0)) return out;  // no sign change: nothing to bisect

  out.bracketed = true;
  SpherePath path(m, SphereSpec(x2, r2), a, b);
  double lo = 0.0, hi = 1.0, flo = fa;
  for (int i = 0; i < kMaxBisection; ++i) {
    double mid = 0.5 * (lo + hi);
    Point z = path(mid);
    double fz = f(z);
    out.bisection_steps = i + 1;
    if (std::fabs(fz) <= tol) {
      finish(z);
      return out;
    }
    if ((fz > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fz;
    } else {
      hi = mid;
    }
  }
  fail(ErrorKind::Convergence, "intersect_witness: tolerance not reached in " + std::to_string(kMaxBisection) +
                                   " bisection steps; bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                   "] on the sphere path");
}

IntersectionClass classify_intersection(const ManifoldModel& m, const Point& x1, double r1, const Point& x2,
                                        double r2) {
  require_radius_in_convexity(m, r1, "classify_intersection");
  require_radius_in_convexity(m, r2, "classify_intersection");
  double d = distance(m, x1, x2);
  double gap = std::fabs(r1 - r2);

  IntersectionClass out;
  if (d > r1 + r2 + kDistanceTol || d < gap - kDistanceTol) {
    out.tag = IntersectionTag::Empty;
    return out;
  }
  // boundary cases first, so borderline inputs land on Singleton
  if (std::fabs(d - (r1 + r2)) <= kDistanceTol) {
    out.tag = IntersectionTag::Singleton;
    out.witness = exp_map(m, x1, direction_toward(m, x1, x2), r1);
    return out;
  }
  if (std::fabs(d - gap) <= kDistanceTol && gap > kDistanceTol) {
    out.tag = IntersectionTag::Singleton;
    // internal tangency: walk through the smaller sphere's centre and out the
    // far side of the larger radius
    if (r1 >= r2)
      out.witness = exp_map(m, x1, direction_toward(m, x1, x2), r1);
    else
      out.witness = exp_map(m, x2, direction_toward(m, x2, x1), r2);
    return out;
  }
  out.tag = IntersectionTag::Continuum;
  WitnessResult w = intersect_witness(m, x1, r1, x2, r2);
  if (!w.point) fail(ErrorKind::Internal, "classify_intersection: interior case produced no witness");
  out.witness = w.point;
  return out;
}

LensDiameter lens_diameter(const ManifoldModel& m, const Point& x, const Point& y, double r, int budget,
                           std::uint64_t seed) {
  require_radius_in_convexity(m, r, "lens_diameter");
  if (budget < 0) fail(ErrorKind::Parameter, "lens_diameter: negative budget");
  double t = distance(m, x, y);
  if (t > 2.0 * r + 1e-12) fail(ErrorKind::Precondition, "lens_diameter: centres further apart than 2r, empty lens");

  LensSetup setup = lens_setup(m, x, y, r);
  constexpr double kFeasSlack = 1e-12;
  if (!inside_ball(m, x, r, setup.mid, 1e-9) || !inside_ball(m, y, r, setup.mid, 1e-9))
    fail(ErrorKind::Internal, "lens_diameter: midpoint escaped the lens");

  std::vector<Point> pts = {setup.tip_a, setup.tip_b, setup.mid};
  // the far pair typically sits where the two radius-r spheres cross; seed
  // both crossing points (the second by reflection across the axis) so the
  // scan starts next to the optimum whenever that is the case
  if (setup.t > 1e-12) {
    try {
      WitnessResult w = intersect_witness(m, x, r, y, r, 1e-9);
      if (w.point) {
        pts.push_back(*w.point);
        pts.push_back(mirror_across_axis(m, x, y, *w.point));
      }
    } catch (const Error&) {
      // crossing-point seeding is only an accelerant; sampling covers the lens
    }
  }
  // seeds lie in both balls up to float noise; pull them back explicitly so
  // candidate feasibility is uniform
  for (Point& p : pts) {
    p = pull_into_ball(m, x, r, p);
    p = pull_into_ball(m, y, r, p);
  }

  // rejection sampling around the midpoint; the lens always sits inside the
  // ball of radius r about it (convexity of t -> d(z, gamma(t)))
  Sampler sampler(seed);
  constexpr std::size_t kAcceptCap = 512;
  double inv_dim = 1.0 / static_cast<double>(m.dim);
  for (int draw = 0; draw < budget && pts.size() < kAcceptCap; ++draw) {
    TangentVector v = sampler.random_unit_tangent(setup.mid);
    double s = r * std::pow(sampler.uniform(0.0, 1.0), inv_dim);
    Point z = exp_map(m, setup.mid, v, s);
    if (inside_ball(m, x, r, z, kFeasSlack) && inside_ball(m, y, r, z, kFeasSlack)) pts.push_back(z);
  }

  // densest pair in fixed index order, ties to the earliest pair
  std::size_t bi = 0, bj = std::min<std::size_t>(1, pts.size() - 1);
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double d = distance(m, pts[i], pts[j]);
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  Point p = pts[bi], q = pts[bj];

  // projected pattern search: probe each endpoint along a tangent frame, pull
  // the probes back into both balls, take the best strict improvement; shrink
  // the step whenever neither endpoint can move
  double h = 0.25 * r;
  if (best > 1e-13) {
    for (int iter = 0; iter < 2000 && h >= kPolishFloor; ++iter) {
      bool improved = false;
      for (int side = 0; side < 2; ++side) {
        Point& mover = side == 0 ? p : q;
        const Point& anchor = side == 0 ? q : p;
        double cur = distance(m, mover, anchor);
        if (cur < 1e-13) break;
        TangentVector to_anchor = log_map(m, mover, anchor);
        Point best_cand;
        double best_d = cur;
        for (const TangentVector& dir : ascent_probes(mover, to_anchor)) {
          Point cand = exp_map(m, mover, dir, h);
          for (int pass = 0; pass < 3; ++pass) {
            cand = pull_into_ball(m, x, r, cand);
            cand = pull_into_ball(m, y, r, cand);
          }
          if (!inside_ball(m, x, r, cand, kFeasSlack) || !inside_ball(m, y, r, cand, kFeasSlack)) continue;
          double dc = distance(m, cand, anchor);
          if (dc > best_d) {
            best_d = dc;
            best_cand = cand;
          }
        }
        if (best_d > cur) {
          mover = best_cand;
          improved = true;
        }
      }
      if (!improved) h *= 0.6;
    }
    best = distance(m, p, q);
  }

  LensDiameter out;
  out.value = best;
  out.far_a = p;
  out.far_b = q;
  // density term: covering radius of the accepted cloud scales like
  // r * n^(-1/dim); the ascent contributes its final step size
  double n = static_cast<double>(pts.size());
  out.error_bound = 4.0 * r * std::pow(1.0 / n, inv_dim) + 16.0 * std::max(h, kPolishFloor);
  return out;
}

LensProfile lens_profile(const ManifoldModel& m, double r, int sample_count, int budget, std::uint64_t seed) {
  require_radius_in_convexity(m, r, "lens_profile");
  if (sample_count < 2) fail(ErrorKind::Parameter, "lens_profile: need at least two samples");
  Point o = model_origin(m);
  TangentVector dir = deterministic_direction(o);
  LensProfile prof;
  prof.r = r;
  for (int i = 0; i < sample_count; ++i) {
    double t = 2.0 * r * static_cast<double>(i) / static_cast<double>(sample_count - 1);
    Point y = exp_map(m, o, dir, t);
    LensDiameter g = lens_diameter(m, o, y, r, budget, seed + static_cast<std::uint64_t>(i));
    prof.samples.push_back({t, g.value, g.error_bound});
    prof.tolerance = std::max(prof.tolerance, g.error_bound);
  }
  return prof;
}

RBarResult rbar(const ManifoldModel& m, double r, double tol, int budget, std::uint64_t seed) {
  require_radius_in_convexity(m, r, "rbar");
  if (!(tol > 0.0)) fail(ErrorKind::Parameter, "rbar: tolerance must be positive");

  Point o = model_origin(m);
  TangentVector dir = deterministic_direction(o);
  struct Eval {
    double t, g, err;
  };
  std::vector<Eval> seen;
  auto g_at = [&](double t) {
    Point y = exp_map(m, o, dir, t);
    LensDiameter g = lens_diameter(m, o, y, r, budget, seed + seen.size());
    // the profile is decreasing; estimates crossing beyond their combined
    // error bounds indicate an undersized sampling budget
    for (const Eval& e : seen) {
      bool bad = e.t < t ? g.value > e.g + e.err + g.error_bound : g.value < e.g - e.err - g.error_bound;
      if (bad)
        fail(ErrorKind::Diagnostics, "rbar: lens samples at separations " + std::to_string(e.t) + " and " +
                                         std::to_string(t) + " are not monotone beyond their error bounds; raise the "
                                         "sampling budget");
    }
    seen.push_back({t, g.value, g.error_bound});
    return g.value;
  };

  // The ascent-polished estimator tracks the true diameter to ~1e-8 (the
  // calibration tests pin this against the flat closed form), so the final
  // interval is padded by that estimator accuracy over a unit slope floor.
  constexpr double kEstimateAccuracy = 2e-8;
  double pad = std::min(kEstimateAccuracy, tol / 4.0);
  double lo = r, hi = 2.0 * r;
  RBarResult out;
  out.r = r;
  while ((hi - lo) + 2.0 * pad > tol) {
    double mid = 0.5 * (lo + hi);
    if (g_at(mid) > r)
      lo = mid;
    else
      hi = mid;
    ++out.iterations;
    if (out.iterations > 200) fail(ErrorKind::Convergence, "rbar: bisection failed to reach the requested tolerance");
  }
  out.lo = std::max(r, lo - pad);
  out.hi = std::min(2.0 * r, hi + pad);
  return out;
}

}  // namespace rigidity
