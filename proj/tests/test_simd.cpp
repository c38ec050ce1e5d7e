#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sfk/dirichlet.hpp"
#include "sfk/expr.hpp"
#include "sfk/simd/kernels.hpp"

using namespace sfk;
using namespace sfk::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Restores the startup ISA after each test.
struct IsaGuard {
  Isa saved = active_isa();
  ~IsaGuard() { set_isa(saved); }
};

}  // namespace

TEST_CASE("ISA selection") {
  CHECK(isa_available(Isa::scalar));
  CHECK(std::string(isa_name(Isa::scalar)) == "scalar");
  IsaGuard guard;
  set_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  if (!isa_available(Isa::avx2)) CHECK_THROWS_AS(set_isa(Isa::avx2), std::invalid_argument);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!isa_available(Isa::avx2)) {
    MESSAGE("AVX2 not available; nothing to compare");
    return;
  }
  const KernelTable& s = kernels(Isa::scalar);
  const KernelTable& v = kernels(Isa::avx2);
  std::mt19937_64 rng(41);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 1001u}) {
    INFO("n = " << n);
    const auto a = random_vector(n, rng), b = random_vector(n, rng, 0.5, 3.0);
    std::vector<double> o1(n), o2(n);

    using Binary = void (*)(const double*, const double*, double*, std::size_t);
    for (auto [f, g] : {std::pair<Binary, Binary>{s.add, v.add}, {s.sub, v.sub}, {s.mul, v.mul}, {s.div, v.div},
                        {s.min, v.min}, {s.max, v.max}}) {
      f(a.data(), b.data(), o1.data(), n);
      g(a.data(), b.data(), o2.data(), n);
      CHECK(o1 == o2);
    }
    using Unary = void (*)(const double*, double*, std::size_t);
    for (auto [f, g] : {std::pair<Unary, Unary>{s.neg, v.neg}, {s.abs, v.abs}}) {
      f(a.data(), o1.data(), n);
      g(a.data(), o2.data(), n);
      CHECK(o1 == o2);
    }
    s.sqrt(b.data(), o1.data(), n);
    v.sqrt(b.data(), o2.data(), n);
    CHECK(o1 == o2);
    s.fill(2.5, o1.data(), n);
    v.fill(2.5, o2.data(), n);
    CHECK(o1 == o2);

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::fabs(a[i] * b[i]);
    CHECK(std::fabs(s.dot(a.data(), b.data(), n) - v.dot(a.data(), b.data(), n)) <= 1e-14 * norm);

    const auto e1 = random_vector(n, rng), e2 = random_vector(n, rng), e3 = random_vector(n, rng);
    const auto q = random_vector(n, rng, 0.0, 1.0);
    RawSums r1{}, r2{};
    s.poisson_sums(e1.data(), e2.data(), e3.data(), q.data(), n, r1.data());
    v.poisson_sums(e1.data(), e2.data(), e3.data(), q.data(), n, r2.data());
    for (std::size_t k = 0; k < kRawSumCount; ++k) {
      // Bound by the sum of absolute terms, recomputed for each sum.
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double E = e1[i] * e1[i] + e2[i] * e2[i] + e3[i] * e3[i];
        mag += q[i] / (E * E) + q[i] * 3.0 / std::pow(E, 1.5) + q[i] * 3.0 / (E * E * std::sqrt(E));
      }
      CHECK(std::fabs(r1[k] - r2[k]) <= 1e-13 * mag + 1e-300);
    }
  }
}

TEST_CASE("library results do not depend on the ISA") {
  if (!isa_available(Isa::avx2)) return;
  IsaGuard guard;
  const ConeAngleSpec b = ConeAngleSpec::from_expression("1 + x2/(1 + x2^2 + x3^2)", 1.0);
  const HarmonicExtension u(b);
  const Expression f = Expression::compile("1 + 0.5*sin(atan2(x3, x2)) * sqrt(x2^2 + 1) / (1 + abs(x3))");
  const std::vector<HPoint> pts{make_hpoint(0.7, 0.3, 0.2), make_hpoint(0.01, -1.0, 0.4), make_hpoint(5.0, 2.0, 2.0)};
  std::vector<double> x2(100), x3(100), out_s(100), out_v(100);
  for (int i = 0; i < 100; ++i) {
    x2[i] = std::sin(0.3 * i) * 4;
    x3[i] = std::cos(0.7 * i) * 4;
  }
  std::vector<HarmonicJet> js;
  set_isa(Isa::scalar);
  for (const HPoint& p : pts) js.push_back(u.jet(p));
  f.evaluate(x2, x3, out_s);
  set_isa(Isa::avx2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const HarmonicJet j = u.jet(pts[i]);
    CHECK(j.u == doctest::Approx(js[i].u).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
      CHECK(j.du[k] == doctest::Approx(js[i].du[k]).epsilon(1e-10).scale(1e-10));
      CHECK(j.a[k] == doctest::Approx(js[i].a[k]).epsilon(1e-10).scale(1e-10));
    }
  }
  f.evaluate(x2, x3, out_v);
  for (int i = 0; i < 100; ++i) CHECK(out_v[i] == doctest::Approx(out_s[i]).epsilon(1e-14));
}
