#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "sfk/errors.hpp"
#include "sfk/metric.hpp"

using namespace sfk;

namespace {

ConeAngleSpec varying() { return ConeAngleSpec::from_expression("1 + x2/(1 + x2^2 + x3^2)", 1.0); }

std::shared_ptr<const ConnectionData> connection(const ConeAngleSpec& b, std::vector<HPoint> charges) {
  auto V = std::make_shared<const Potential>(assemble_V(b, ChargeConfig(std::move(charges))));
  return std::make_shared<const ConnectionData>(V);
}

const std::vector<HPoint> kSamples{make_hpoint(0.7, 0.3, 0.2), make_hpoint(1.3, -0.4, 0.5), make_hpoint(0.4, -0.2, -0.6)};

// Largest component of d omega for a theta-independent 2-form field, by
// central differences in (z, x2, x3).
double fd_domega(const std::function<Mat4(const HPoint&)>& w, const HPoint& p, double h) {
  std::array<Mat4, 4> dw;
  dw[0] = Mat4::Zero();
  for (int c = 1; c < 4; ++c) {
    Vec3 a = p.coords(), b = p.coords();
    a[c - 1] += h;
    b[c - 1] -= h;
    dw[c] = (w(make_hpoint(a)) - w(make_hpoint(b))) / (2 * h);
  }
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c)
        worst = std::max(worst, std::fabs(dw[a](b, c) + dw[b](c, a) + dw[c](a, b)));
  return worst;
}

}  // namespace

TEST_CASE("flat and constant-cone reductions") {
  for (double z : {0.1, 1.0, 3.0}) {
    const Mat4 g = assemble_g(1.0, {0, 0, 0}, z);
    Mat4 expect = Mat4::Identity();
    expect(0, 0) = z * z;
    CHECK((g - expect).cwiseAbs().maxCoeff() == 0.0);
    const double c = 0.7;
    const Mat4 gc = assemble_g(1.0 / c, {0, 0, 0}, z);
    CHECK(gc(0, 0) == doctest::Approx(c * z * z).epsilon(1e-15));
    CHECK(gc(1, 1) == doctest::Approx(1.0 / c).epsilon(1e-15));
    CHECK(gc(3, 3) == doctest::Approx(1.0 / c).epsilon(1e-15));
    CHECK(gc(0, 2) == 0.0);

    const Mat4 w = assemble_omega(1.0, {0, 0, 0}, z);
    CHECK(w(1, 0) == z);
    CHECK(w(0, 1) == -z);
    CHECK(w(2, 3) == 1.0);
    CHECK(w(1, 2) == 0.0);
  }
  CHECK_THROWS_AS(assemble_g(-1.0, {0, 0, 0}, 1.0), EvaluationError);
}

TEST_CASE("flat scenario is Euclidean at machine precision") {
  const MetricField g(connection(ConeAngleSpec::constant(1.0), {}));
  for (const HPoint& p : kSamples) {
    Mat4 expect = Mat4::Identity();
    expect(0, 0) = p.z * p.z;
    CHECK((g.g(p) - expect).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("pointwise Kahler identities") {
  const MetricField g(connection(varying(), {make_hpoint(1.0, 0.0, 0.0)}));
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lz(std::log(0.05), std::log(5.0)), ux(-2.0, 2.0);
  int checked = 0;
  while (checked < 1000) {
    const HPoint p = make_hpoint(std::exp(lz(rng)), ux(rng), ux(rng));
    if (std::hypot(p.x2, p.x3) < 0.05 && p.z < 1.0) continue;  // near the string
    const MetricSample s = g.sample(p);
    Eigen::SelfAdjointEigenSolver<Mat4> es(s.g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK((s.g - s.g.transpose()).cwiseAbs().maxCoeff() <= 1e-15 * s.g.cwiseAbs().maxCoeff());
    if (checked % 50 == 0) {
      CHECK(complex_structure_defect(s.g, s.omega) < 1e-10);
      CHECK(omega_wedge_ratio(s.g, s.omega) == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(coframe_residual(s.field, p) < 1e-12);
      CHECK(std::fabs(omega_closedness(s.field, p)) < 1e-8);
    }
    ++checked;
  }
}

TEST_CASE("theta invariance and the conformal relation") {
  const MetricField g(connection(varying(), {make_hpoint(1.0, 0.0, 0.0)}));
  for (const HPoint& p : kSamples) {
    CHECK((g.g(0.0, p) - g.g(2.5, p)).cwiseAbs().maxCoeff() == 0.0);
    const MetricSample s = g.sample(p);
    // V^{-1} g = z^2 V^{-2} eta^2 + dz^2 + dx2^2 + dx3^2, eta = dtheta + A.
    Eigen::Vector4d eta(1.0, s.field.A[0], s.field.A[1], s.field.A[2]);
    Mat4 expect = (p.z * p.z / (s.field.V * s.field.V)) * eta * eta.transpose();
    for (int i = 1; i < 4; ++i) expect(i, i) += 1.0;
    CHECK((s.g / s.field.V - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(MetricField::theta_independent);
}

TEST_CASE("ansatz scalar curvature") {
  const AnsatzFunction hyperbolic = [](double x1, double, double) { return std::log(2 * x1); };
  const AnsatzFunction W = [](double x1, double x2, double x3) { return 1.3 + 0.2 * std::sin(x1 + x2) + 0.1 * x3 * x3; };
  for (const HPoint& p : kSamples) {
    const double x1 = p.z * p.z / 2;
    CHECK(std::fabs(scalar_curvature_ansatz(hyperbolic, W, x1, p.x2, p.x3)) < 1e-6);
  }
  const AnsatzFunction zero = [](double, double, double) { return 0.0; };
  const AnsatzFunction one = [](double, double, double) { return 1.0; };
  CHECK(scalar_curvature_ansatz(zero, one, 0.5, 0.1, 0.2) == 0.0);

  const double eps = 0.05;
  const AnsatzFunction bent = [eps](double x1, double x2, double) { return std::log(2 * x1) + eps * x2 * x2; };
  for (const HPoint& p : kSamples) {
    const double x1 = p.z * p.z / 2;
    const double expect = -2 * eps / (W(x1, p.x2, p.x3) * 2 * x1 * std::exp(eps * p.x2 * p.x2));
    CHECK(scalar_curvature_ansatz(bent, W, x1, p.x2, p.x3, 1e-3) == doctest::Approx(expect).epsilon(1e-5));
  }
  CHECK_THROWS_AS(scalar_curvature_ansatz(hyperbolic, [](double, double, double) { return -1.0; }, 0.5, 0, 0),
                  DomainError);

  auto V = std::make_shared<const Potential>(assemble_V(varying(), ChargeConfig({make_hpoint(1.0, 0.0, 0.0)})));
  const LeBrunData data(V);
  for (const HPoint& p : kSamples) {
    CHECK(scalar_curvature_ansatz(data, p) == 0.0);
    CHECK(data.v()(p.z * p.z / 2, p.x2, p.x3) == doctest::Approx(2 * std::log(p.z)).epsilon(1e-14).scale(1.0));
    CHECK(data.W()(p.z * p.z / 2, p.x2, p.x3) * p.z * p.z == doctest::Approx(V->value(p)).epsilon(1e-12));
  }
}

TEST_CASE("compatibility equation is the h-Laplacian") {
  // d^2_{x1}(W e^v) + d^2_{x2} W + d^2_{x3} W with e^v = 2 x1 equals -Delta_h V / z^4.
  auto eq1 = [](const std::function<double(double, double, double)>& V, const HPoint& p, double h) {
    const double x1 = p.z * p.z / 2;
    auto f = [&](double a, double b, double c) { return V(std::sqrt(2 * a), b, c); };  // W e^v = V
    auto W = [&](double a, double b, double c) { return V(std::sqrt(2 * a), b, c) / (2 * a); };
    return (f(x1 + h, p.x2, p.x3) - 2 * f(x1, p.x2, p.x3) + f(x1 - h, p.x2, p.x3)) / (h * h) +
           (W(x1, p.x2 + h, p.x3) - 2 * W(x1, p.x2, p.x3) + W(x1, p.x2 - h, p.x3)) / (h * h) +
           (W(x1, p.x2, p.x3 + h) - 2 * W(x1, p.x2, p.x3) + W(x1, p.x2, p.x3 - h)) / (h * h);
  };
  const auto z2 = [](double z, double, double) { return z * z; };
  const auto poly = [](double z, double x2, double x3) { return z * z * z + std::pow(x2, 4) + std::sin(x3); };
  for (const HPoint& p : kSamples) {
    CHECK(std::fabs(eq1(z2, p, 1e-3)) < 1e-6);
    const ScalarField f{[&](const HPoint& q) { return poly(q.z, q.x2, q.x3); }, {}};
    const double expect = -laplacian_h(f, p, 1e-3) / std::pow(p.z, 4);
    CHECK(eq1(poly, p, 1e-3) == doctest::Approx(expect).epsilon(1e-4));
  }

  const Potential one = assemble_V(ConeAngleSpec::constant(1.0), ChargeConfig());
  CHECK(std::fabs(compatibility_residual(one, make_hpoint(0.5, 0, 0))) < 1e-12);
  const Potential V = assemble_V(varying(), ChargeConfig({make_hpoint(1.0, 0.0, 0.0)}));
  for (const HPoint& p : kSamples) CHECK(std::fabs(compatibility_residual(V, p)) < 1e-6);
}

TEST_CASE("model metric and its forms") {
  const ConeAngleSpec b = varying();
  const HPoint p = make_hpoint(0.3, 1.0, 0.0);
  const Mat4 m = model_metric(b, p);
  CHECK(m(0, 0) == doctest::Approx(1.5 * 1.5 * 0.09));
  CHECK(m(1, 1) == 1.0);
  CHECK(m(0, 1) == 0.0);

  // The conformal and displayed forms are closed; the Kahler form of g_beta is not.
  for (const HPoint& q : kSamples) {
    auto form = [&](ModelForm k) { return [&, k](const HPoint& x) { return model_form(b, x, k); }; };
    CHECK(fd_domega(form(ModelForm::conformal), q, 1e-4) < 1e-8);
    CHECK(fd_domega(form(ModelForm::displayed), q, 1e-4) < 1e-8);
    CHECK(fd_domega(form(ModelForm::plain), q, 1e-4) > 1e-3);

    const Mat4 gb = model_metric(b, q);
    const double beta = b.beta(q.x2, q.x3);
    CHECK(complex_structure_defect(gb / beta, model_form(b, q, ModelForm::conformal)) < 1e-12);
    CHECK(complex_structure_defect(gb, model_form(b, q, ModelForm::plain)) < 1e-12);
    // Only the conformal form is compatible with beta^{-1} g_beta when beta != 1.
    CHECK(complex_structure_defect(gb / beta, model_form(b, q, ModelForm::displayed)) > 1e-2);
  }
}

TEST_CASE("conformal remainder") {
  const ConeAngleSpec c = ConeAngleSpec::constant(0.7);
  const auto flat = connection(c, {});
  for (double z : {1e-1, 1e-2, 1e-3}) {
    const HPoint p = make_hpoint(z, 0.5, 0.3);
    const ConformalRemainder r = conformal_remainder(flat->jet(p), c, p);
    CHECK(r.coordinate < 1e-6);
    CHECK(r.model < 1e-6);
  }

  const ConeAngleSpec b = varying();
  const auto A = connection(b, {});
  std::vector<ConformalRemainder> ladder;
  for (double z : {1e-1, 1e-2, 1e-3}) {
    const HPoint p = make_hpoint(z, 0.5, 0.3);
    ladder.push_back(conformal_remainder(A->jet(p), b, p));
  }
  // Bounded in chart components down the ladder.
  CHECK(ladder[2].coordinate <= 10 * ladder[0].coordinate);
  // Against g_beta the theta-theta direction is weighted by 1 / z^2, so the
  // same remainder grows; recorded, not asserted bounded.
  MESSAGE("model-norm remainder: " << ladder[0].model << ", " << ladder[1].model << ", " << ladder[2].model);
  CHECK(ladder[2].model > ladder[0].model);
}

TEST_CASE("field CSV dump") {
  const MetricField g(connection(ConeAngleSpec::constant(1.0), {}));
  std::ostringstream os;
  write_field_csv(os, g, make_hpoint(0.5, 0, 0), make_hpoint(1.0, 1, 1), {2, 3, 4});
  std::istringstream in(os.str());
  std::string line;
  int header = 0, rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) == 0) {
      ++header;
    } else if (!line.empty() && line.rfind("z,", 0) != 0) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 12);
    }
  }
  CHECK(header >= 3);
  CHECK(rows == 24);
}
