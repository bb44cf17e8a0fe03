#include "rigidity/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rigidity {

namespace {

constexpr double kPi = std::numbers::pi;

// Below this angle the a->b frame on a direction sphere is treated as
// degenerate (coincident) or antipodal.
constexpr double kFrameTol = 1e-9;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Minkowski form <x,y> = -x0*y0 + x1*y1 + ... on R^{n+1}.
double minkowski(const std::vector<double>& a, const std::vector<double>& b) {
  double s = -a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

void check_model(const ManifoldModel& m, const Point& p, const char* who) {
  if (p.model != m) fail(ErrorKind::ModelMismatch, std::string(who) + ": point belongs to model " + p.model.id());
  if (static_cast<int>(p.coords.size()) != m.ambient_dim())
    fail(ErrorKind::ModelMismatch, std::string(who) + ": wrong coordinate count");
}

double wrap01(double c) {
  double w = c - std::floor(c);
  if (w >= 1.0) w = 0.0;  // guard against floor(-1e-17) rounding
  return w;
}

}  // namespace

ManifoldModel ManifoldModel::euclidean(int n) {
  if (n < 2) fail(ErrorKind::Parameter, "euclidean: dimension must be >= 2");
  ManifoldModel m;
  m.kind = ModelKind::Euclidean;
  m.dim = n;
  return m;
}

ManifoldModel ManifoldModel::sphere(int n, double R) {
  if (n < 2) fail(ErrorKind::Parameter, "sphere: dimension must be >= 2");
  if (!(R > 0.0) || !std::isfinite(R)) fail(ErrorKind::Parameter, "sphere: radius must be positive");
  ManifoldModel m;
  m.kind = ModelKind::Sphere;
  m.dim = n;
  m.radius = R;
  return m;
}

ManifoldModel ManifoldModel::hyperbolic(int n, double kappa) {
  if (n < 2) fail(ErrorKind::Parameter, "hyperbolic: dimension must be >= 2");
  if (!(kappa < 0.0) || !std::isfinite(kappa)) fail(ErrorKind::Parameter, "hyperbolic: curvature must be negative");
  ManifoldModel m;
  m.kind = ModelKind::Hyperbolic;
  m.dim = n;
  m.curvature = kappa;
  return m;
}

ManifoldModel ManifoldModel::flat_torus(int n) {
  if (n < 2) fail(ErrorKind::Parameter, "flat_torus: dimension must be >= 2");
  ManifoldModel m;
  m.kind = ModelKind::FlatTorus;
  m.dim = n;
  return m;
}

ManifoldModel ManifoldModel::parse(const std::string& id, double R, double kappa) {
  if (id.size() < 2) fail(ErrorKind::Parameter, "model id too short: '" + id + "'");
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(id.substr(1), &used);
    if (used + 1 != id.size()) fail(ErrorKind::Parameter, "trailing characters in model id '" + id + "'");
  } catch (const std::exception&) {
    fail(ErrorKind::Parameter, "cannot read dimension in model id '" + id + "'");
  }
  switch (id[0]) {
    case 'e': return euclidean(n);
    case 's': return sphere(n, R);
    case 'h': return hyperbolic(n, kappa);
    case 't': return flat_torus(n);
    default: fail(ErrorKind::Parameter, "unknown model letter in id '" + id + "' (expected e/s/h/t)");
  }
}

std::string ManifoldModel::id() const {
  const char* letter = "";
  switch (kind) {
    case ModelKind::Euclidean: letter = "e"; break;
    case ModelKind::Sphere: letter = "s"; break;
    case ModelKind::Hyperbolic: letter = "h"; break;
    case ModelKind::FlatTorus: letter = "t"; break;
  }
  return std::string(letter) + std::to_string(dim);
}

int ManifoldModel::ambient_dim() const {
  switch (kind) {
    case ModelKind::Sphere:
    case ModelKind::Hyperbolic: return dim + 1;
    default: return dim;
  }
}

ExtendedReal ManifoldModel::convexity_radius() const {
  switch (kind) {
    case ModelKind::Euclidean:
    case ModelKind::Hyperbolic: return ExtendedReal::infinity();
    case ModelKind::Sphere: return ExtendedReal(kPi * radius / 2.0);
    case ModelKind::FlatTorus: return ExtendedReal(0.25);
  }
  fail(ErrorKind::Internal, "unreachable");
}

ExtendedReal ManifoldModel::injectivity_radius() const {
  switch (kind) {
    case ModelKind::Euclidean:
    case ModelKind::Hyperbolic: return ExtendedReal::infinity();
    case ModelKind::Sphere: return ExtendedReal(kPi * radius);
    case ModelKind::FlatTorus: return ExtendedReal(0.5);
  }
  fail(ErrorKind::Internal, "unreachable");
}

double ManifoldModel::hyperbolic_scale() const {
  if (kind != ModelKind::Hyperbolic) fail(ErrorKind::Internal, "hyperbolic_scale on non-hyperbolic model");
  return 1.0 / std::sqrt(-curvature);
}

bool ManifoldModel::operator==(const ManifoldModel& o) const {
  if (kind != o.kind || dim != o.dim) return false;
  if (kind == ModelKind::Sphere && radius != o.radius) return false;
  if (kind == ModelKind::Hyperbolic && curvature != o.curvature) return false;
  return true;
}

Point::Point(const ManifoldModel& m, std::vector<double> c) : model(m), coords(std::move(c)) {
  if (static_cast<int>(coords.size()) != m.ambient_dim())
    fail(ErrorKind::Parameter, "point for " + m.id() + " needs " + std::to_string(m.ambient_dim()) + " coordinates, got " +
                                   std::to_string(coords.size()));
  for (double v : coords)
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "non-finite point coordinate");
  switch (m.kind) {
    case ModelKind::Euclidean: break;
    case ModelKind::Sphere: {
      double n2 = dot(coords, coords);
      if (!(n2 > 0.0)) fail(ErrorKind::Parameter, "cannot project zero vector onto the sphere");
      double scale = m.radius / std::sqrt(n2);
      for (double& v : coords) v *= scale;
      break;
    }
    case ModelKind::Hyperbolic: {
      // Re-project onto the sheet <x,x> = -s^2, x0 > 0.
      double s = m.hyperbolic_scale();
      double q = -minkowski(coords, coords);
      if (!(q > 0.0) || coords[0] <= 0.0)
        fail(ErrorKind::Parameter, "coordinates do not determine a point of the hyperboloid sheet");
      double scale = s / std::sqrt(q);
      for (double& v : coords) v *= scale;
      break;
    }
    case ModelKind::FlatTorus:
      for (double& v : coords) v = wrap01(v);
      break;
  }
}

TangentVector::TangentVector(const Point& at, std::vector<double> comps) : base(at), components(std::move(comps)) {
  if (components.size() != base.coords.size()) fail(ErrorKind::Parameter, "tangent vector has wrong coordinate count");
  for (double v : components)
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "non-finite tangent component");
  components = tangent_project(base, std::move(components));
}

double TangentVector::norm() const {
  double q = metric_dot(base, components, components);
  // The restriction of the Minkowski form to a tangent space is positive
  // definite, so q < 0 can only come from a projection failure upstream.
  if (q < 0.0) {
    if (q < -1e-12) fail(ErrorKind::Internal, "negative squared norm for tangent vector");
    q = 0.0;
  }
  return std::sqrt(q);
}

TangentVector TangentVector::unit() const {
  double n = norm();
  if (n < 1e-14) fail(ErrorKind::Precondition, "cannot normalise a (near-)zero tangent vector");
  TangentVector u = *this;
  for (double& v : u.components) v /= n;
  return u;
}

double metric_dot(const Point& at, const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != at.coords.size() || v.size() != at.coords.size())
    fail(ErrorKind::Parameter, "metric_dot: dimension mismatch");
  if (at.model.kind == ModelKind::Hyperbolic) return minkowski(u, v);
  return dot(u, v);
}

std::vector<double> tangent_project(const Point& x, std::vector<double> v) {
  switch (x.model.kind) {
    case ModelKind::Euclidean:
    case ModelKind::FlatTorus: return v;
    case ModelKind::Sphere: {
      double c = dot(v, x.coords) / (x.model.radius * x.model.radius);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * x.coords[i];
      return v;
    }
    case ModelKind::Hyperbolic: {
      // <x,x> = -s^2, so the tangent projection is v - (<v,x>/<x,x>) x.
      double s = x.model.hyperbolic_scale();
      double c = minkowski(v, x.coords) / (-s * s);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * x.coords[i];
      return v;
    }
  }
  fail(ErrorKind::Internal, "unreachable");
}

double distance(const ManifoldModel& m, const Point& x, const Point& y) {
  check_model(m, x, "distance");
  check_model(m, y, "distance");
  switch (m.kind) {
    case ModelKind::Euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.coords.size(); ++i) {
        double d = x.coords[i] - y.coords[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case ModelKind::Sphere: {
      // 2*atan2(|x-y|, |x+y|) is accurate for both tiny and near-pi angles,
      // where acos of the normalised dot product loses ~8 digits.
      double diff = 0.0, sum = 0.0;
      for (std::size_t i = 0; i < x.coords.size(); ++i) {
        double d = x.coords[i] - y.coords[i], s = x.coords[i] + y.coords[i];
        diff += d * d;
        sum += s * s;
      }
      return m.radius * 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
    }
    case ModelKind::Hyperbolic: {
      // The Minkowski chord <x-y, x-y> = 2 s^2 (cosh(d/s) - 1) is free of the
      // cancellation that plagues acosh near 1.
      double s = m.hyperbolic_scale();
      std::vector<double> diff(x.coords.size());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = x.coords[i] - y.coords[i];
      double q = std::max(0.0, minkowski(diff, diff));
      return 2.0 * s * std::asinh(std::sqrt(q) / (2.0 * s));
    }
    case ModelKind::FlatTorus: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.coords.size(); ++i) {
        double d = std::fabs(x.coords[i] - y.coords[i]);
        d = std::min(d, 1.0 - d);  // nearest translate per coordinate
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  fail(ErrorKind::Internal, "unreachable");
}

Point exp_map(const ManifoldModel& m, const Point& x, const TangentVector& v, double t) {
  check_model(m, x, "exp_map");
  check_model(m, v.base, "exp_map");
  if (!std::isfinite(t)) fail(ErrorKind::Parameter, "exp_map: non-finite time");
  TangentVector u = v.unit();
  std::vector<double> c(x.coords.size());
  switch (m.kind) {
    case ModelKind::Euclidean:
    case ModelKind::FlatTorus:
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = x.coords[i] + t * u.components[i];
      break;
    case ModelKind::Sphere: {
      double a = t / m.radius;
      double ca = std::cos(a), sa = std::sin(a);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = ca * x.coords[i] + m.radius * sa * u.components[i];
      break;
    }
    case ModelKind::Hyperbolic: {
      double s = m.hyperbolic_scale();
      double a = t / s;
      double ca = std::cosh(a), sa = std::sinh(a);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = ca * x.coords[i] + s * sa * u.components[i];
      break;
    }
  }
  return Point(m, std::move(c));  // constructor re-projects onto the constraint
}

TangentVector log_map(const ManifoldModel& m, const Point& x, const Point& y) {
  check_model(m, x, "log_map");
  check_model(m, y, "log_map");
  double d = distance(m, x, y);
  if (d < 1e-14) fail(ErrorKind::Precondition, "log_map: points coincide, direction undefined");
  switch (m.kind) {
    case ModelKind::Euclidean: {
      std::vector<double> v(x.coords.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = (y.coords[i] - x.coords[i]) / d;
      return TangentVector(x, std::move(v));
    }
    case ModelKind::Sphere: {
      double theta = d / m.radius;
      if (kPi - theta < 1e-9) fail(ErrorKind::CutLocus, "log_map: antipodal points on the sphere");
      // y = cos(theta) x + sin(theta) R v  =>  v ~ y - cos(theta) x.
      double ct = std::cos(theta);
      std::vector<double> v(x.coords.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = y.coords[i] - ct * x.coords[i];
      return TangentVector(x, std::move(v)).unit();
    }
    case ModelKind::Hyperbolic: {
      double s = m.hyperbolic_scale();
      double ct = std::cosh(d / s);
      std::vector<double> v(x.coords.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = y.coords[i] - ct * x.coords[i];
      return TangentVector(x, std::move(v)).unit();
    }
    case ModelKind::FlatTorus: {
      if (d >= 0.5 - 1e-12) fail(ErrorKind::CutLocus, "log_map: torus distance at or beyond 1/2");
      std::vector<double> v(x.coords.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        double delta = y.coords[i] - x.coords[i];
        if (delta > 0.5) delta -= 1.0;
        if (delta < -0.5) delta += 1.0;
        v[i] = delta / d;
      }
      return TangentVector(x, std::move(v));
    }
  }
  fail(ErrorKind::Internal, "unreachable");
}

SphereSpec::SphereSpec(Point c, double radius) : center(std::move(c)), r(radius) {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::Parameter, "metric sphere needs a positive radius");
}

Point sphere_point(const ManifoldModel& m, const SphereSpec& s, const TangentVector& dir) {
  check_model(m, s.center, "sphere_point");
  return exp_map(m, s.center, dir, s.r);
}

SpherePath::SpherePath(const ManifoldModel& m, const SphereSpec& s, const Point& a, const Point& b)
    : model_(m), spec_(s) {
  check_model(m, s.center, "sphere_path");
  check_model(m, a, "sphere_path");
  check_model(m, b, "sphere_path");
  double tol = 1e-9 * std::max(1.0, s.r);
  if (std::fabs(distance(m, s.center, a) - s.r) > tol || std::fabs(distance(m, s.center, b) - s.r) > tol)
    fail(ErrorKind::Precondition, "sphere_path: endpoints must lie on the metric sphere");

  u_ = log_map(m, s.center, a).components;
  std::vector<double> w = log_map(m, s.center, b).components;
  double c = clamp(metric_dot(s.center, u_, w), -1.0, 1.0);
  {
    // angle between unit tangents, chord form for uniform accuracy
    std::vector<double> diff(u_.size()), sum(u_.size());
    for (std::size_t i = 0; i < u_.size(); ++i) {
      diff[i] = u_[i] - w[i];
      sum[i] = u_[i] + w[i];
    }
    double dn = std::sqrt(std::max(0.0, metric_dot(s.center, diff, diff)));
    double sn = std::sqrt(std::max(0.0, metric_dot(s.center, sum, sum)));
    angle_ = 2.0 * std::atan2(dn, sn);
  }

  if (angle_ < kFrameTol) {
    // a == b: constant path; any perpendicular completes the (unused) frame.
    angle_ = 0.0;
    v_ = w;
    return;
  }
  if (kPi - angle_ < kFrameTol) {
    // Antipodal directions: the rotation plane is not determined by a and b.
    // Complete it with the projected coordinate axis least aligned with u so
    // that every run picks the same semicircle.
    angle_ = kPi;
    std::size_t best = 0;
    double best_res = -1.0;
    std::vector<double> best_vec;
    for (std::size_t i = 0; i < u_.size(); ++i) {
      std::vector<double> e(u_.size(), 0.0);
      e[i] = 1.0;
      std::vector<double> p = tangent_project(spec_.center, std::move(e));
      double cu = metric_dot(spec_.center, p, u_);
      for (std::size_t j = 0; j < p.size(); ++j) p[j] -= cu * u_[j];
      double res = metric_dot(spec_.center, p, p);
      if (res > best_res) {
        best_res = res;
        best = i;
        best_vec = std::move(p);
      }
    }
    (void)best;
    if (best_res <= 1e-18) fail(ErrorKind::Internal, "sphere_path: no usable perpendicular direction");
    double n = std::sqrt(best_res);
    for (double& x : best_vec) x /= n;
    v_ = std::move(best_vec);
    return;
  }
  // Generic case: Gram-Schmidt w against u.
  std::vector<double> p = w;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= c * u_[i];
  double n = std::sqrt(std::max(0.0, metric_dot(s.center, p, p)));
  for (double& x : p) x /= n;
  v_ = std::move(p);
}

Point SpherePath::operator()(double t) const {
  if (t < -1e-12 || t > 1.0 + 1e-12) fail(ErrorKind::Parameter, "sphere path parameter outside [0,1]");
  t = clamp(t, 0.0, 1.0);
  double a = angle_ * t;
  double ca = std::cos(a), sa = std::sin(a);
  std::vector<double> dir(u_.size());
  for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = ca * u_[i] + sa * v_[i];
  return exp_map(model_, spec_.center, TangentVector(spec_.center, std::move(dir)), spec_.r);
}

Point model_origin(const ManifoldModel& m) {
  std::vector<double> c(m.ambient_dim(), 0.0);
  switch (m.kind) {
    case ModelKind::Euclidean: break;
    case ModelKind::Sphere: c[0] = m.radius; break;
    case ModelKind::Hyperbolic: c[0] = m.hyperbolic_scale(); break;
    case ModelKind::FlatTorus: c.assign(m.dim, 0.5); break;
  }
  return Point(m, std::move(c));
}

Point Sampler::random_point(const ManifoldModel& m) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (m.kind) {
    case ModelKind::Euclidean: {
      // Uniform direction, radius up to 3.
      std::vector<double> c(m.dim);
      for (double& v : c) v = gauss(rng_);
      double n = std::sqrt(dot(c, c));
      double r = uniform(0.0, 3.0);
      if (n > 1e-12)
        for (double& v : c) v *= r / n;
      return Point(m, std::move(c));
    }
    case ModelKind::Sphere: {
      std::vector<double> c(m.dim + 1);
      for (double& v : c) v = gauss(rng_);
      if (std::sqrt(dot(c, c)) < 1e-9) c[0] = 1.0;
      return Point(m, std::move(c));  // projection makes this uniform on the sphere
    }
    case ModelKind::Hyperbolic: {
      Point o = model_origin(m);
      TangentVector dir = random_unit_tangent(o);
      return exp_map(m, o, dir, uniform(0.0, 3.0));
    }
    case ModelKind::FlatTorus: {
      std::vector<double> c(m.dim);
      for (double& v : c) v = uniform(0.0, 1.0);
      return Point(m, std::move(c));
    }
  }
  fail(ErrorKind::Internal, "unreachable");
}

TangentVector Sampler::random_unit_tangent(const Point& at) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<double> c(at.coords.size());
    for (double& v : c) v = gauss(rng_);
    TangentVector t(at, std::move(c));
    if (t.norm() > 1e-6) return t.unit();
  }
  fail(ErrorKind::Internal, "could not draw a non-degenerate tangent direction");
}

double Sampler::uniform(double a, double b) {
  std::uniform_real_distribution<double> d(a, b);
  return d(rng_);
}

}  // namespace rigidity
