#pragma once

// The curvature F = *_h dV, connection potentials A with dA = F (so that
// eta = dtheta + A), flux and Stokes checks, and the decay of dA_beta.
//
// A is the sum of a smooth part, the primitive of *_h du_beta, and one
// monopole term per charge. The monopole term of a charge at (c, a, b) is
//
//   A = -(kappa / 4 pi) (1 + S) dphi,   S = (c^2 - z^2 - rho^2) / (|p - q| |p - q*|),
//
// with (rho, phi) polar coordinates about the charge's vertical line and q*
// the mirror image (-c, a, b). It is singular on the Dirac string below the
// charge; an upward string adds (kappa / 2 pi) dphi.
//
// Orientation: fluxes through closed surfaces use the inward normal, so a
// sphere around one charge carries +kappa. Loops are oriented right-handedly
// about the given normal; a loop around a string, normal pointing along the
// string away from its charge, also gives +kappa.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sfk/potential.hpp"

namespace sfk {

enum class Gauge { coulomb, homotopy };
enum class StringDirection { down, up };

struct GaugeDescriptor {
  // coulomb: the closed-form primitive of *_h du_beta, d*A = 0.
  // homotopy: the radial primitive of *_h du_beta from `base_point` along
  // straight segments in (z, x2, x3).
  Gauge gauge = Gauge::coulomb;
  std::optional<HPoint> base_point;      // default: z = 1 above the charges' centroid
  std::vector<StringDirection> strings;  // per charge; missing entries point down
  unsigned path_order = 24;
};

// Everything the metric needs at a point.
struct FieldJet {
  double V = 1.0;
  Vec3 dV{};
  Vec3 A{};                   // (A_z, A_2, A_3)
  std::array<Vec3, 3> dA{};   // dA[i][j] = d A_i / d x_j
};

// *_h dV at p; throws PoleError within hyperbolic distance 1e-6 of a charge.
TwoForm3 curvature_form(const Potential& V, const HPoint& p);

struct MonopoleJet {
  Vec3 a{};
  std::array<Vec3, 3> da{};
};

// Throws PoleError on the string or at the charge.
MonopoleJet monopole_potential(const HPoint& p, const HPoint& charge, double kappa,
                               StringDirection dir = StringDirection::down);

class ConnectionData {
 public:
  explicit ConnectionData(std::shared_ptr<const Potential> V, GaugeDescriptor gauge = {});

  OneForm3 A(const HPoint& p) const;
  FieldJet jet(const HPoint& p) const;
  // Same with the string directions overridden per charge (missing entries
  // fall back to the descriptor). Switching one string from down to up
  // shifts A by (kappa / 2 pi) dphi about that charge's vertical line.
  FieldJet jet(const HPoint& p, std::span<const StringDirection> strings) const;
  // The smooth part only (primitive of *_h du_beta).
  Vec3 smooth_part(const HPoint& p) const;

  const Potential& potential() const { return *V_; }
  std::shared_ptr<const Potential> potential_ptr() const { return V_; }
  const GaugeDescriptor& gauge() const { return gauge_; }
  const HPoint& base_point() const { return base_; }
  StringDirection string_direction(std::size_t charge) const;

 private:
  std::shared_ptr<const Potential> V_;
  GaugeDescriptor gauge_;
  HPoint base_;

  Vec3 homotopy_part(const HPoint& p) const;
};

// Flux of F through the Euclidean sphere |x - centre| = radius (inward
// normal); the sphere must lie in z > 0.
double flux_euclidean(const Potential& V, const Vec3& centre, double radius, unsigned n_lat = 32,
                      unsigned n_lon = 64);
// Flux through the geodesic sphere of hyperbolic radius r about `centre`.
double flux(const Potential& V, const HPoint& centre, double r, unsigned n_lat = 32, unsigned n_lon = 64);

// Line integral of A around the circle (centre, unit normal, radius).
double loop_integral(const ConnectionData& A, const Vec3& centre, const Vec3& normal, double radius,
                     unsigned n = 256);
// Integral of F over the flat disk bounded by that circle, oriented by `normal`.
double disk_flux(const Potential& V, const Vec3& centre, const Vec3& normal, double radius,
                 unsigned n_r = 24, unsigned n_phi = 64);

// Central-difference exterior derivative of A compared with F, at steps h
// and h/2.
struct CurlCheck {
  double residual_h = 0.0;
  double residual_h2 = 0.0;
  double order = 0.0;
};
CurlCheck check_dA_equals_F(const ConnectionData& A, const HPoint& p, double h);

// Central-difference exterior derivative of a 1-form field at p.
TwoForm3 fd_exterior_derivative(const std::function<Vec3(const HPoint&)>& a, const HPoint& p, double h);

struct DecayReport {
  double constant = 0.0;          // sup of |du| ((z+1)^2 + |x|^2) with n samples per ray
  double constant_doubled = 0.0;  // same with 2n samples per ray
  double stability = 0.0;         // relative change under doubling
  double vertical_first = 0.0;    // z |du| at the bottom of the vertical test ray
  double vertical_last = 0.0;     // z |du| at its top
  std::size_t samples = 0;

  bool bounded() const { return std::isfinite(constant) && std::isfinite(constant_doubled); }
  bool stable(double tol = 0.2) const { return stability <= tol; }
  bool decays_vertically() const { return vertical_last < 1e-3 * std::max(vertical_first, 1e-300) || vertical_first == 0.0; }
};

// Gauge-invariant decay of |dA_beta|_h = z |du_beta| over vertical rays
// (z from 1 to z_far) and horizontal rays (|x| from 1 to r_far).
DecayReport check_decay_dA(const HarmonicExtension& u, std::size_t n = 24, double z_far = 1e4,
                           double r_far = 1e4);

}  // namespace sfk
