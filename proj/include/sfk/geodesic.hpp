#pragma once

// Geodesics of the chart metric as the Hamiltonian flow of
// H = (1/2) p^T g^{-1} p, integrated in arc length with an adaptive
// Dormand-Prince 5(4) pair. Covectors are normalised so that 2H = 1.
//
// Near a Dirac string the chart itself breaks down (A is singular there
// while g is smooth), so the integrator moves that charge's string to the
// other side, which is the change theta -> theta - (kappa / 2 pi) phi, and
// carries on.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sfk/metric.hpp"

namespace sfk {

struct GeodesicState {
  std::array<double, 4> x{};  // (theta, z, x2, x3)
  std::array<double, 4> p{};  // covelocity
  double length = 0.0;
  double energy = 0.0;        // p^T g^{-1} p
};

enum class GeodesicStatus {
  reached_length,
  hit_divisor,    // z fell below divisor_z while decreasing
  step_underflow, // step size collapsed away from the divisor
};

std::string to_string(GeodesicStatus s);

struct GeodesicOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double initial_step = 1e-2;
  double min_step = 1e-12;
  double divisor_z = 1e-6;
  double string_switch = 0.05;  // switch when rho < string_switch * c on the string side
  std::size_t record_every = 0; // 0: keep only the endpoints
};

struct GeodesicReport {
  GeodesicStatus status = GeodesicStatus::reached_length;
  GeodesicState final_state;
  double energy0 = 0.0;
  double max_drift = 0.0;  // max relative |E - E0| / E0 over accepted steps
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t gauge_switches = 0;
  std::vector<GeodesicState> trajectory;
};

// g and its coordinate derivatives at a point (dg[0] = d/dtheta = 0).
struct MetricJet {
  Mat4 g;
  std::array<Mat4, 4> dg;
};
using MetricJetField = std::function<MetricJet(const HPoint&)>;

MetricJetField metric_jet_field(const MetricField& g);

// Rescales p so that p^T g^{-1} p = 1 at x.
GeodesicState normalised(const MetricJetField& g, GeodesicState s);

GeodesicReport geodesic_integrate(const MetricJetField& g, GeodesicState initial, double L,
                                  const GeodesicOptions& opts = {});
// With string switching for the charges of g's potential.
GeodesicReport geodesic_integrate(const MetricField& g, GeodesicState initial, double L,
                                  const GeodesicOptions& opts = {});

// Random starts in the box, directions drawn uniformly in an orthonormal
// frame and rejected until V_min p_theta^2 >= zmin^2 for the unit covector,
// so the shot stays at z >= zmin.
std::vector<GeodesicState> random_shots(const MetricField& g, const HPoint& lo, const HPoint& hi, double zmin,
                                        std::size_t n, std::uint64_t seed);

// Harder starts: half begin on the bottom face heading down with |p_theta|
// only 5% above the bound that keeps them over zmin; the rest head up or
// outward in x.
std::vector<GeodesicState> adversarial_shots(const MetricField& g, const HPoint& lo, const HPoint& hi, double zmin,
                                             std::size_t n, std::uint64_t seed);

// Developed-cone prediction for constant beta = c (V = 1/c, A = 0): the
// metric is flat in r = z / sqrt(c), phi = c theta, y = x / sqrt(c), so the
// geodesic is a straight line there. Returns the chart point after arc length s.
std::array<double, 4> cone_geodesic(double c, const GeodesicState& start, double s);

}  // namespace sfk
