#pragma once

// Hyperbolic 3-space in the upper half-space model
//
//   h = (dz^2 + dx2^2 + dx3^2) / z^2,   z > 0,
//
// its ball model, the sphere at infinity, and the pointwise differential
// operators the rest of the library is built on.
//
// Coordinate order is (z, x2, x3) everywhere. One-forms are stored in the
// basis (dz, dx2, dx3); two-forms in the dual basis
// (dx2^dx3, dx3^dz, dz^dx2), so a two-form and the vector of its
// components transform like a Euclidean axial vector.

#include <array>
#include <functional>
#include <optional>
#include <variant>

namespace sfk {

using Vec3 = std::array<double, 3>;

struct HPoint {
  double z = 1.0;
  double x2 = 0.0;
  double x3 = 0.0;

  Vec3 coords() const { return {z, x2, x3}; }
  bool operator==(const HPoint&) const = default;
};

// Throws DomainError unless z > 0 and every coordinate is finite.
HPoint make_hpoint(double z, double x2, double x3);
HPoint make_hpoint(const Vec3& c);
bool is_valid(const HPoint& p);

struct BallPoint {
  double y1 = 0.0;
  double y2 = 0.0;
  double y3 = 0.0;

  double norm2() const { return y1 * y1 + y2 * y2 + y3 * y3; }
};

struct PlanePoint {
  double x2 = 0.0;
  double x3 = 0.0;
  bool operator==(const PlanePoint&) const = default;
};
struct AtInfinity {
  bool operator==(const AtInfinity&) const = default;
};
using BoundaryPoint = std::variant<PlanePoint, AtInfinity>;

struct OneForm3 {
  double dz = 0.0;
  double dx2 = 0.0;
  double dx3 = 0.0;

  Vec3 components() const { return {dz, dx2, dx3}; }
};

struct TwoForm3 {
  double d23 = 0.0;  // dx2 ^ dx3
  double d3z = 0.0;  // dx3 ^ dz
  double dz2 = 0.0;  // dz ^ dx2

  Vec3 components() const { return {d23, d3z, dz2}; }
};

// A scalar function on H^3. `gradient` is optional; when present it must be
// the exact gradient in (z, x2, x3) coordinates.
struct ScalarField {
  std::function<double(const HPoint&)> value;
  std::function<Vec3(const HPoint&)> gradient;

  double operator()(const HPoint& p) const { return value(p); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// Half-space to ball using the closed-form coordinates
///   y1 = (x2^2 + x3^2 - 1) / ((z+1)^2 + x2^2 + x3^2),
///   y2 = 2 x2 / ((z+1)^2 + x2^2 + x3^2),  y3 = 2 x3 / (...).
/// On z = 0 these agree with the isometry below; in the interior they do not
/// (the z^2 term of y1 is absent), so the Poisson solver uses
/// half_to_ball_isometric instead.
BallPoint half_to_ball(const HPoint& p);

/// Isometry of the half-space onto the Poincare ball: inversion in the sphere
/// of radius sqrt(2) about (-1, 0, 0) followed by y1 -> -y1. Sends
/// (1, 0, 0) to the centre and agrees with half_to_ball on the boundary.
BallPoint half_to_ball_isometric(const HPoint& p);
HPoint ball_to_half(const BallPoint& y);

/// Unit vector of a point of S(infinity) in the ball model. Infinity maps to
/// (1, 0, 0) and the origin of the plane to (-1, 0, 0).
Vec3 boundary_to_sphere(const BoundaryPoint& b);
BoundaryPoint sphere_to_boundary(const Vec3& xi);

/// Hyperbolic distance, cosh d = 1 + (|dx|^2 + dz^2) / (2 z z').
double hyp_distance(const HPoint& p, const HPoint& q);

/// Default finite-difference step: never crosses z = 0.
double fd_step(const HPoint& p);

/// Gradient of f at p: exact when f carries one, central differences otherwise.
Vec3 gradient(const ScalarField& f, const HPoint& p, std::optional<double> step = std::nullopt);

/// Positive hyperbolic Laplacian
///   Delta_h f = -z^2 (f_22 + f_33 + f_zz) + z f_z
/// by second-order central differences. Throws EvaluationError when the
/// stencil would reach z <= 0 or the step underflows.
double laplacian_h(const ScalarField& f, const HPoint& p, std::optional<double> step = std::nullopt);

/// Hodge star of h (orientation dz ^ dx2 ^ dx3). On 1-forms
///   *(a dz + b dx2 + c dx3) = (a dx2^dx3 + b dx3^dz + c dz^dx2) / z,
/// and ** = id in both degrees.
TwoForm3 hodge_star_h(const OneForm3& w, const HPoint& p);
OneForm3 hodge_star_h(const TwoForm3& w, const HPoint& p);

double norm_h(const OneForm3& w, const HPoint& p);
double norm_h(const TwoForm3& w, const HPoint& p);

}  // namespace sfk
