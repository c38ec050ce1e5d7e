#pragma once

// Bounded h-harmonic extension u_beta of the boundary data beta^{-1} on
// S(infinity), with the barrier and maximum-principle checks that pin
// u_beta = beta^{-1} + O(z) near the boundary plane.
//
// u_beta is evaluated in the ball model, y = isometric image of p, as
//
//   u(y) = beta^{-1}(inf) + (1/4 pi) Int g(xi) ((1 - |y|^2) / |y - xi|^2)^2 dsigma(xi),
//
// g = beta^{-1} - beta^{-1}(inf), on a polar rule about the boundary point
// nearest to y, so the cost does not depend on where p is. The same pass
// gives the gradient and the primitive
//
//   A = (1/4 pi) Int g(xi) 4 (xi x y) . dy / |y - xi|^4 dsigma(xi),
//
// which satisfies dA = *_h du and d*A = 0. Both are pulled back to the
// half-space together with the first derivatives of A.

#include <array>
#include <cstdint>
#include <vector>

#include "sfk/cone_angle.hpp"
#include "sfk/hyperbolic.hpp"

namespace sfk {

struct PoissonOptions {
  double angular_scale = 0.25;    // radians on S(infinity) over which beta^{-1} varies
  unsigned gauss_order = 16;      // per polar panel
  double angular_density = 24.0;  // azimuthal points per unit of sin(psi) / angular_scale
  unsigned min_angular = 24;

  // The rule used by checked_value as the reference.
  PoissonOptions refined() const;
};

struct HarmonicJet {
  double u = 0.0;
  Vec3 du{};                      // (d/dz, d/dx2, d/dx3)
  Vec3 a{};                       // Coulomb-gauge primitive (a_z, a_2, a_3)
  std::array<Vec3, 3> da{};       // da[i][j] = d a_i / d x_j
};

// ((1 - |y|^2) / |y - xi|^2)^2, the unnormalised Poisson kernel of the ball.
double poisson_weight(const BallPoint& y, const Vec3& xi);

class HarmonicExtension {
 public:
  explicit HarmonicExtension(ConeAngleSpec beta, PoissonOptions opts = {});

  double value(const HPoint& p) const { return jet(p).u; }
  Vec3 gradient(const HPoint& p) const { return jet(p).du; }
  HarmonicJet jet(const HPoint& p) const { return jet(p, opts_); }
  HarmonicJet jet(const HPoint& p, const PoissonOptions& opts) const;

  // Value with an error estimate from the refined rule; throws
  // QuadratureError when the two disagree by more than `tol`.
  double checked_value(const HPoint& p, double tol = 1e-8) const;
  // Number of boundary nodes the rule uses at p.
  std::size_t node_count(const HPoint& p) const;

  ScalarField field() const;
  const ConeAngleSpec& beta() const { return beta_; }
  const PoissonOptions& options() const { return opts_; }

 private:
  ConeAngleSpec beta_;
  PoissonOptions opts_;
};

// Convenience entry point: u_beta(p).
double solve_u_beta(const ConeAngleSpec& beta, const HPoint& p, const PoissonOptions& opts = {});

// Collar T_eps = {0 < z <= eps} restricted to |x| <= radius. Includes points
// on z = eps itself.
std::vector<HPoint> collar_samples(double eps, double radius, std::size_t n, std::uint64_t seed);

// Smallest C found by doubling from just above (max beta^{-1} - min beta^{-1}) / eps
// such that Delta_h(beta^{-1} + C z) >= 0 >= Delta_h(beta^{-1} - C z) at every
// validation sample. Throws EvaluationError if no C within 60 doublings works.
double barrier_constant(const ConeAngleSpec& beta, double eps, const std::vector<HPoint>& validation);

struct BarrierReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_margin = 0.0;  // min over samples of C z - |u - beta^{-1}|
  double v_sup = 0.0;       // sup |u - beta^{-1}| / z
  std::vector<HPoint> violating;

  bool passed() const { return samples > 0 && violations == 0; }
};

BarrierReport check_barriers(const HarmonicExtension& u, double C, double eps,
                             const std::vector<HPoint>& samples);

struct MaxPrincipleReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_value = 0.0, max_value = 0.0;
  double lower = 0.0, upper = 0.0;  // min and max of beta^{-1} on S(infinity)

  bool passed() const { return violations == 0; }
};

MaxPrincipleReport check_max_principle(const HarmonicExtension& u, const std::vector<HPoint>& samples,
                                       double tol = 1e-8);

// FD Laplacian residuals at steps h and h/2 and the observed order.
struct HarmonicityReport {
  double residual_h = 0.0;
  double residual_h2 = 0.0;
  double order = 0.0;
};

HarmonicityReport harmonicity_order(const ScalarField& f, const HPoint& p, double h);

}  // namespace sfk
