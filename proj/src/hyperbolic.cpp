#include "sfk/hyperbolic.hpp"

#include <cmath>
#include <limits>

#include "sfk/errors.hpp"

namespace sfk {

namespace {

constexpr double kMinStep = 1e-12;

}  // namespace

bool is_valid(const HPoint& p) {
  return std::isfinite(p.z) && std::isfinite(p.x2) && std::isfinite(p.x3) && p.z > 0.0;
}

HPoint make_hpoint(double z, double x2, double x3) {
  HPoint p{z, x2, x3};
  if (!is_valid(p)) throw DomainError("HPoint requires z > 0 and finite coordinates");
  return p;
}

HPoint make_hpoint(const Vec3& c) { return make_hpoint(c[0], c[1], c[2]); }

BallPoint half_to_ball(const HPoint& p) {
  const double r2 = p.x2 * p.x2 + p.x3 * p.x3;
  const double den = (p.z + 1.0) * (p.z + 1.0) + r2;
  return {(r2 - 1.0) / den, 2.0 * p.x2 / den, 2.0 * p.x3 / den};
}

BallPoint half_to_ball_isometric(const HPoint& p) {
  const double r2 = p.x2 * p.x2 + p.x3 * p.x3;
  const double den = (p.z + 1.0) * (p.z + 1.0) + r2;
  return {(p.z * p.z + r2 - 1.0) / den, 2.0 * p.x2 / den, 2.0 * p.x3 / den};
}

HPoint ball_to_half(const BallPoint& y) {
  if (!(y.norm2() < 1.0)) throw DomainError("ball point must satisfy |y| < 1");
  // Undo the reflection, then invert about (-1, 0, 0) with radius sqrt(2).
  const double w1 = -y.y1 + 1.0;
  const double den = w1 * w1 + y.y2 * y.y2 + y.y3 * y.y3;
  return {-1.0 + 2.0 * w1 / den, 2.0 * y.y2 / den, 2.0 * y.y3 / den};
}

Vec3 boundary_to_sphere(const BoundaryPoint& b) {
  if (std::holds_alternative<AtInfinity>(b)) return {1.0, 0.0, 0.0};
  const auto& q = std::get<PlanePoint>(b);
  const double r2 = q.x2 * q.x2 + q.x3 * q.x3;
  const double den = 1.0 + r2;
  return {(r2 - 1.0) / den, 2.0 * q.x2 / den, 2.0 * q.x3 / den};
}

BoundaryPoint sphere_to_boundary(const Vec3& xi) {
  const double d = 1.0 - xi[0];
  if (d <= 4.0 * std::numeric_limits<double>::epsilon()) return AtInfinity{};
  return PlanePoint{xi[1] / d, xi[2] / d};
}

double hyp_distance(const HPoint& p, const HPoint& q) {
  const double dz = p.z - q.z;
  const double d2 = p.x2 - q.x2;
  const double d3 = p.x3 - q.x3;
  const double chord2 = dz * dz + d2 * d2 + d3 * d3;
  // cosh d - 1 = 2 sinh^2(d/2), so d = 2 asinh(sqrt(chord2 / (4 z z'))).
  return 2.0 * std::asinh(std::sqrt(chord2 / (4.0 * p.z * q.z)));
}

double fd_step(const HPoint& p) { return std::max(1e-5, 1e-3 * p.z); }

namespace {

double checked_step(const HPoint& p, std::optional<double> step) {
  const double h = step ? *step : fd_step(p);
  if (!(h > kMinStep) || !std::isfinite(h))
    throw EvaluationError("finite-difference step underflow", p.z, p.x2, p.x3);
  if (p.z - h <= 0.0)
    throw EvaluationError("finite-difference stencil crosses z = 0", p.z, p.x2, p.x3);
  return h;
}

}  // namespace

Vec3 gradient(const ScalarField& f, const HPoint& p, std::optional<double> step) {
  if (f.has_gradient()) return f.gradient(p);
  const double h = checked_step(p, step);
  const auto at = [&](double dz, double d2, double d3) {
    return f.value({p.z + dz, p.x2 + d2, p.x3 + d3});
  };
  return {(at(h, 0, 0) - at(-h, 0, 0)) / (2 * h), (at(0, h, 0) - at(0, -h, 0)) / (2 * h),
          (at(0, 0, h) - at(0, 0, -h)) / (2 * h)};
}

double laplacian_h(const ScalarField& f, const HPoint& p, std::optional<double> step) {
  const double h = checked_step(p, step);
  const auto at = [&](double dz, double d2, double d3) {
    return f.value({p.z + dz, p.x2 + d2, p.x3 + d3});
  };
  const double c = at(0, 0, 0);
  const double zp = at(h, 0, 0), zm = at(-h, 0, 0);
  const double f_zz = (zp - 2 * c + zm) / (h * h);
  const double f_22 = (at(0, h, 0) - 2 * c + at(0, -h, 0)) / (h * h);
  const double f_33 = (at(0, 0, h) - 2 * c + at(0, 0, -h)) / (h * h);
  const double f_z = (zp - zm) / (2 * h);
  return -p.z * p.z * (f_22 + f_33 + f_zz) + p.z * f_z;
}

TwoForm3 hodge_star_h(const OneForm3& w, const HPoint& p) {
  const double s = 1.0 / p.z;
  return {s * w.dz, s * w.dx2, s * w.dx3};
}

OneForm3 hodge_star_h(const TwoForm3& w, const HPoint& p) {
  return {p.z * w.d23, p.z * w.d3z, p.z * w.dz2};
}

double norm_h(const OneForm3& w, const HPoint& p) {
  return p.z * std::sqrt(w.dz * w.dz + w.dx2 * w.dx2 + w.dx3 * w.dx3);
}

double norm_h(const TwoForm3& w, const HPoint& p) {
  return p.z * p.z * std::sqrt(w.d23 * w.d23 + w.d3z * w.d3z + w.dz2 * w.dz2);
}

}  // namespace sfk
