#pragma once

// Green's functions of H^3 and the potential V = u_beta + sum_i G_{p_i}.

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "sfk/dirichlet.hpp"
#include "sfk/hyperbolic.hpp"

namespace sfk {

inline constexpr double kDefaultKappa = 2.0 * std::numbers::pi;

// Charge points p_i with unit multiplicity. kappa is the flux of *_h dG
// through any sphere enclosing one charge.
class ChargeConfig {
 public:
  ChargeConfig() = default;
  // Throws ConfigError for invalid or coincident points, or kappa <= 0.
  ChargeConfig(std::vector<HPoint> points, double kappa = kDefaultKappa);

  const std::vector<HPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double kappa() const { return kappa_; }
  // Set when two charges lie on one vertical line (iterated blow-up).
  bool shares_vertical_line() const { return shared_vertical_; }

 private:
  std::vector<HPoint> points_;
  double kappa_ = kDefaultKappa;
  bool shared_vertical_ = false;
};

// kappa (coth d(p, q) - 1) / (4 pi); throws PoleError when d(p, q) < 1e-6.
double green(const HPoint& p, const HPoint& q, double kappa = kDefaultKappa);

struct ScalarJet {
  double value = 0.0;
  Vec3 grad{};  // (d/dz, d/dx2, d/dx3)
};

// Green's function of the charge at `q` and its exact gradient in p.
ScalarJet green_jet(const HPoint& p, const HPoint& q, double kappa = kDefaultKappa);

class Potential {
 public:
  Potential(std::shared_ptr<const HarmonicExtension> u, ChargeConfig charges);

  struct Jet {
    double v = 0.0;
    Vec3 dv{};
    HarmonicJet u;
  };

  Jet jet(const HPoint& p) const;
  double value(const HPoint& p) const { return jet(p).v; }
  Vec3 gradient(const HPoint& p) const { return jet(p).dv; }
  // Sum of the Green terms only.
  double green_part(const HPoint& p) const;

  ScalarField field() const;
  const HarmonicExtension& harmonic() const { return *u_; }
  const ChargeConfig& charges() const { return charges_; }

 private:
  std::shared_ptr<const HarmonicExtension> u_;
  ChargeConfig charges_;
};

Potential assemble_V(const ConeAngleSpec& beta, const ChargeConfig& charges, const PoissonOptions& opts = {});

struct DecayFit {
  double exponent = 0.0;      // fitted alpha in G ~ c z^alpha
  double prefactor = 0.0;
  double max_residual = 0.0;  // largest |log G - fit| over the samples
  std::size_t samples = 0;
  bool vacuous = false;       // no charges

  bool passed(double tol = 0.1) const { return vacuous || std::fabs(exponent - 2.0) <= tol; }
};

// Least-squares fit of log(sum G) against log z along the vertical descent
// at (x2, x3) over z = z_max .. z_min (log-spaced). Throws DomainError if the
// descent runs along a charge's vertical line.
DecayFit check_decay_z2(const ChargeConfig& charges, double x2, double x3, double z_max = 1e-1,
                        double z_min = 1e-4, std::size_t n = 16);

}  // namespace sfk
