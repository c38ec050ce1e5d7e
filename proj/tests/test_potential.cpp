#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "sfk/connection.hpp"
#include "sfk/errors.hpp"
#include "sfk/potential.hpp"

using namespace sfk;

namespace {

constexpr double kPi = std::numbers::pi;

ConeAngleSpec varying() { return ConeAngleSpec::from_expression("1 + x2/(1 + x2^2 + x3^2)", 1.0); }

}  // namespace

TEST_CASE("charge configurations") {
  const ChargeConfig none;
  CHECK(none.empty());
  CHECK(none.kappa() == doctest::Approx(2 * kPi));
  CHECK_THROWS_AS(ChargeConfig({HPoint{0.0, 0.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(ChargeConfig({HPoint{-1.0, 0.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(ChargeConfig({make_hpoint(1, 0, 0), make_hpoint(1, 0, 0)}), ConfigError);
  CHECK_THROWS_AS(ChargeConfig({make_hpoint(1, 0, 0)}, 0.0), ConfigError);
  const ChargeConfig stacked({make_hpoint(1, 0, 0), make_hpoint(2, 0, 0)});
  CHECK(stacked.shares_vertical_line());
  const ChargeConfig apart({make_hpoint(1, -0.6, 0), make_hpoint(0.8, 0.6, 0.2)});
  CHECK(!apart.shares_vertical_line());
  CHECK(apart.size() == 2);
}

TEST_CASE("Green's function closed form") {
  const HPoint q = make_hpoint(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(green(q, q), PoleError);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lz(-2.0, 1.5), ux(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const HPoint a = make_hpoint(std::exp(lz(rng)), ux(rng), ux(rng));
    const HPoint b = make_hpoint(std::exp(lz(rng)), ux(rng), ux(rng));
    const double g = green(a, b);
    CHECK(g > 0.0);
    CHECK(std::fabs(g - green(b, a)) <= 1e-12 * g);
    const double d = hyp_distance(a, b);
    CHECK(g == doctest::Approx((1.0 / std::tanh(d) - 1.0) / 2.0).epsilon(1e-10));
  }

  // Monotone decay to zero along a ray.
  double prev = INFINITY;
  for (double t = 1.5; t < 1e6; t *= 3) {
    const double g = green(make_hpoint(t, 0, 0), q);
    CHECK(g < prev);
    prev = g;
  }
  CHECK(prev < 1e-10);

  // Pole strength: G 4 pi d / kappa -> 1.
  double last = 0.0;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const HPoint p = make_hpoint(std::exp(d), 0, 0);
    last = green(p, q, 3.0) * 4 * kPi * d / 3.0;
    CHECK(std::fabs(last - 1.0) < 2 * d);
  }
  CHECK(last == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("Green's function gradient and harmonicity") {
  const HPoint q = make_hpoint(0.8, 0.3, -0.2);
  const ScalarField G{[&](const HPoint& p) { return green(p, q); }, {}};
  for (const HPoint& p : {make_hpoint(0.5, 0.9, 0.1), make_hpoint(1.5, -0.3, 0.4), make_hpoint(0.2, 0.3, -0.2)}) {
    const ScalarJet j = green_jet(p, q);
    CHECK(j.value == doctest::Approx(green(p, q)).epsilon(1e-14));
    const Vec3 fd = gradient(G, p, 1e-5);
    for (int k = 0; k < 3; ++k) CHECK(j.grad[k] == doctest::Approx(fd[k]).epsilon(1e-6).scale(1e-3));
    const double r1 = std::fabs(laplacian_h(G, p, 0.01)), r2 = std::fabs(laplacian_h(G, p, 0.005));
    CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("flux of a single Green's function") {
  const HPoint q = make_hpoint(1.0, 0.0, 0.0);
  const Potential V = assemble_V(ConeAngleSpec::constant(1.0), ChargeConfig({q}));
  CHECK(flux(V, q, 0.1) == doctest::Approx(2 * kPi).epsilon(1e-4 / (2 * kPi)));
  const Potential W = assemble_V(ConeAngleSpec::constant(1.0), ChargeConfig({q}, 1.0));
  CHECK(flux(W, q, 0.1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("assembled potential") {
  const Potential flat = assemble_V(ConeAngleSpec::constant(1.0), ChargeConfig());
  CHECK(flat.value(make_hpoint(0.3, 2.0, -1.0)) == doctest::Approx(1.0).epsilon(1e-12));

  const HPoint q = make_hpoint(1.0, 0.0, 0.0);
  const ConeAngleSpec b = varying();
  const Potential V = assemble_V(b, ChargeConfig({q}));
  CHECK_THROWS_AS(V.value(q), PoleError);
  const HPoint far = make_hpoint(50.0, 40.0, 0.0);
  const Potential::Jet j = V.jet(far);
  CHECK(j.v - j.u.u == doctest::Approx(green(far, q)).epsilon(1e-12));
  CHECK(std::fabs(j.v - j.u.u) < 1e-3);
  CHECK(V.green_part(far) == doctest::Approx(green(far, q)));
  for (int k = 0; k < 3; ++k) CHECK(j.dv[k] == doctest::Approx(j.u.du[k] + green_jet(far, q).grad[k]).epsilon(1e-12));
}

TEST_CASE("positivity at 10^4 samples") {
  const ConeAngleSpec b = varying();
  const Potential V = assemble_V(b, ChargeConfig({make_hpoint(1.0, -0.6, 0.0), make_hpoint(0.8, 0.6, 0.2)}));
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> lz(std::log(1e-3), std::log(100.0)), ux(-10.0, 10.0);
  double vmin = INFINITY;
  for (int i = 0; i < 10000; ++i) {
    const HPoint p = make_hpoint(std::exp(lz(rng)), ux(rng), ux(rng));
    vmin = std::min(vmin, V.value(p));
  }
  CHECK(vmin > 0.0);
  CHECK(vmin >= b.min_inverse() - 1e-8);
}

TEST_CASE("vertical decay of the Green terms") {
  const DecayFit f = check_decay_z2(ChargeConfig({make_hpoint(1.0, 0.0, 0.0)}), 3.0, 0.0);
  CHECK(f.samples > 0);
  CHECK(f.exponent >= 1.9);
  CHECK(f.exponent <= 2.1);
  CHECK(f.passed());

  const DecayFit two = check_decay_z2(ChargeConfig({make_hpoint(1.0, -0.6, 0.0), make_hpoint(0.8, 0.6, 0.2)}), -1.0, 0.7);
  CHECK(two.passed());

  CHECK(check_decay_z2(ChargeConfig(), 3.0, 0.0).vacuous);
  CHECK_THROWS_AS(check_decay_z2(ChargeConfig({make_hpoint(1.0, 0.0, 0.0)}), 0.0, 0.0), DomainError);
}
