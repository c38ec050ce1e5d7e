#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sfk/quadrature.hpp"

using namespace sfk;

TEST_CASE("Gauss-Legendre is exact to degree 2n - 1") {
  for (unsigned n : {1u, 4u, 16u, 40u}) {
    const GaussRule& r = gauss_legendre(n);
    REQUIRE(r.size() == n);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (unsigned k = 0; k < 2 * n; k += 2) {
      const double got = gauss_integrate([k](double x) { return std::pow(x, k); }, -1.0, 1.0, n);
      CHECK(got == doctest::Approx(2.0 / (k + 1)).epsilon(1e-13));
    }
  }
  CHECK(&gauss_legendre(16) == &gauss_legendre(16));
}

TEST_CASE("Gauss-Legendre on a smooth integrand") {
  const double got = gauss_integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 12);
  CHECK(got == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-15));
}

TEST_CASE("sphere rule integrates low-degree harmonics") {
  for (int axis : {0, 1, 2}) {
    const SphereRule r = product_sphere_rule(8, 16, axis);
    double w = 0.0, x = 0.0, xx = 0.0, xy = 0.0, x4 = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Vec3& p = r.points[i];
      CHECK(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] == doctest::Approx(1.0).epsilon(1e-14));
      w += r.weights[i];
      x += r.weights[i] * p[0];
      xx += r.weights[i] * p[0] * p[0];
      xy += r.weights[i] * p[0] * p[1];
      x4 += r.weights[i] * std::pow(p[2], 4);
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::fabs(x) < 1e-14);
    CHECK(xx == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(std::fabs(xy) < 1e-14);
    CHECK(x4 == doctest::Approx(0.2).epsilon(1e-13));
  }
}
