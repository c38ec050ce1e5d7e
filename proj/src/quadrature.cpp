#include "sfk/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace sfk {

namespace {

GaussRule build_rule(unsigned n) {
  // legendre_p_zeros returns the non-negative zeros in ascending order.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  GaussRule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  const auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = half.rbegin(); it != half.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  for (double x : half) {
    rule.nodes.push_back(x);
    rule.weights.push_back(weight(x));
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(unsigned n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mutex;
  static std::map<unsigned, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

SphereRule product_sphere_rule(unsigned n_lat, unsigned n_lon, int pole_axis) {
  if (n_lat == 0 || n_lon == 0 || pole_axis < 0 || pole_axis > 2)
    throw std::invalid_argument("product_sphere_rule: bad arguments");
  const GaussRule& g = gauss_legendre(n_lat);
  SphereRule rule;
  rule.points.reserve(std::size_t(n_lat) * n_lon);
  rule.weights.reserve(std::size_t(n_lat) * n_lon);
  const int a1 = (pole_axis + 1) % 3, a2 = (pole_axis + 2) % 3;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double c = g.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (unsigned k = 0; k < n_lon; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_lon;
      Vec3 p{};
      p[pole_axis] = c;
      p[a1] = s * std::cos(phi);
      p[a2] = s * std::sin(phi);
      rule.points.push_back(p);
      rule.weights.push_back(0.5 * g.weights[i] / n_lon);
    }
  }
  return rule;
}

}  // namespace sfk
