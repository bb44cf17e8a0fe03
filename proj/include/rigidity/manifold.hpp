#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rigidity/errors.hpp"
#include "rigidity/extended.hpp"

namespace rigidity {

enum class ModelKind { Euclidean, Sphere, Hyperbolic, FlatTorus };

// One of the closed-form model geometries.  Every metric operation below is
// evaluated from an explicit formula; nothing is integrated numerically.
//
//   Euclidean(n)      R^n with the usual metric
//   Sphere(n, R)      radius-R sphere embedded in R^{n+1}
//   Hyperbolic(n, k)  curvature k < 0, hyperboloid sheet in Minkowski R^{n+1}
//   FlatTorus(n)      [0,1)^n with opposite faces glued
struct ManifoldModel {
  ModelKind kind = ModelKind::Euclidean;
  int dim = 2;              // intrinsic dimension, always >= 2
  double radius = 1.0;      // Sphere only
  double curvature = -1.0;  // Hyperbolic only

  static ManifoldModel euclidean(int n);
  static ManifoldModel sphere(int n, double R = 1.0);
  static ManifoldModel hyperbolic(int n, double kappa = -1.0);
  static ManifoldModel flat_torus(int n);

  // Short ids used on the command line and in JSON: "e2", "s2", "h3", "t2".
  static ManifoldModel parse(const std::string& id, double R = 1.0, double kappa = -1.0);
  std::string id() const;

  // Number of coordinates a point carries (dim, or dim+1 for embedded models).
  int ambient_dim() const;

  // Largest radius for which all metric balls are convex, and the injectivity
  // radius.  Both are constant over each model and satisfy conv <= inj / 2
  // whenever inj is finite.
  ExtendedReal convexity_radius() const;
  ExtendedReal injectivity_radius() const;

  // Curvature scale 1/sqrt(-kappa) for Hyperbolic.
  double hyperbolic_scale() const;

  bool operator==(const ManifoldModel& o) const;
  bool operator!=(const ManifoldModel& o) const { return !(*this == o); }
};

// A point of a model, stored in the coordinates of that model's chart or
// embedding.  Construction re-projects onto the defining constraint (unit-sum
// for the sphere and hyperboloid, coordinate wrap for the torus), so stored
// coordinates always satisfy it to machine precision.
struct Point {
  ManifoldModel model;
  std::vector<double> coords;

  Point() = default;
  Point(const ManifoldModel& m, std::vector<double> c);
};

// A tangent vector at a base point, in ambient coordinates.  Construction
// projects onto the tangent space of the base point.
struct TangentVector {
  Point base;
  std::vector<double> components;

  TangentVector() = default;
  TangentVector(const Point& at, std::vector<double> comps);

  double norm() const;
  TangentVector unit() const;  // errors on (near-)zero vectors
};

// Geodesic distance.  Exact formula per model; for the torus the minimum is
// taken over the 3^n nearest lattice translates, which covers every pair in
// the fundamental cell.
double distance(const ManifoldModel& m, const Point& x, const Point& y);

// Point reached after time t along the unit-speed geodesic leaving x with
// direction v.  v is normalised internally; a zero vector is an error.
Point exp_map(const ManifoldModel& m, const Point& x, const TangentVector& v, double t);

// Unit initial direction u with exp_map(x, u, distance(x, y)) == y.  Errors
// with ErrorKind::CutLocus when y is at or beyond the injectivity radius
// (antipodes on the sphere, distance >= 1/2 on the torus) and with
// ErrorKind::Precondition when x == y.
TangentVector log_map(const ManifoldModel& m, const Point& x, const Point& y);

// Inner product of the model's metric at a point (Minkowski restriction for
// Hyperbolic, Euclidean dot product otherwise).
double metric_dot(const Point& at, const std::vector<double>& u, const std::vector<double>& v);

// Projection of an arbitrary ambient vector onto the tangent space at x.
std::vector<double> tangent_project(const Point& x, std::vector<double> v);

// The metric sphere of radius r about a centre.
struct SphereSpec {
  Point center;
  double r = 0.0;

  SphereSpec() = default;
  SphereSpec(Point c, double radius);
};

// Point of the metric sphere in a given unit direction from the centre.
Point sphere_point(const ManifoldModel& m, const SphereSpec& s, const TangentVector& dir);

// Continuous path t in [0,1] on a metric sphere from a to b, traced by
// rotating the initial direction inside the tangent space of the centre.
// When a and b are antipodal on the sphere of directions the plane of
// rotation is completed with a deterministic perpendicular (the coordinate
// axis least aligned with the a-direction), so repeated runs follow the same
// semicircle.
class SpherePath {
 public:
  SpherePath(const ManifoldModel& m, const SphereSpec& s, const Point& a, const Point& b);
  Point operator()(double t) const;

  double swept_angle() const { return angle_; }

 private:
  ManifoldModel model_;
  SphereSpec spec_;
  std::vector<double> u_, v_;  // orthonormal frame of the rotation plane
  double angle_ = 0.0;
};

// Deterministic sampling helpers used by property checks and the self-test
// suite.  Euclidean and hyperbolic samples stay inside a ball of radius 3
// about a fixed origin so that distances stay in a numerically friendly range.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Point random_point(const ManifoldModel& m);
  TangentVector random_unit_tangent(const Point& at);
  double uniform(double a, double b);

 private:
  std::mt19937_64 rng_;
};

// Origin used for sampling: zero vector, "north pole", hyperboloid apex, or
// the cell centre.
Point model_origin(const ManifoldModel& m);

}  // namespace rigidity
