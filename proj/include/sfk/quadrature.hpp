#pragma once

#include <vector>

#include "sfk/hyperbolic.hpp"

namespace sfk {

// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Cached and thread-safe; n >= 1.
const GaussRule& gauss_legendre(unsigned n);

// Integral of f over [a, b] with an n-point Gauss rule.
template <class F>
double gauss_integrate(F&& f, double a, double b, unsigned n) {
  const GaussRule& r = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return half * s;
}

// Quadrature for the normalised mean over the unit sphere: sum(weights) = 1.
// Product rule, Gauss-Legendre in cos(polar angle) around the axis `pole`
// times the trapezoid rule in longitude; exact for spherical harmonics of
// degree < min(2 n_lat, n_lon).
struct SphereRule {
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

SphereRule product_sphere_rule(unsigned n_lat, unsigned n_lon, int pole_axis = 0);

}  // namespace sfk
