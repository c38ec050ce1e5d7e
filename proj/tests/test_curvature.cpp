#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "sfk/curvature.hpp"
#include "sfk/errors.hpp"

using namespace sfk;

namespace {

ConeAngleSpec varying() { return ConeAngleSpec::from_expression("1 + x2/(1 + x2^2 + x3^2)", 1.0); }

MetricField metric(const ConeAngleSpec& b, std::vector<HPoint> charges) {
  auto V = std::make_shared<const Potential>(assemble_V(b, ChargeConfig(std::move(charges))));
  return MetricField(std::make_shared<const ConnectionData>(V));
}

GridBox box(double z0, double z1, double x0, double x1) {
  return {make_hpoint(z0, x0, x0), make_hpoint(z1, x1, x1)};
}

}  // namespace

TEST_CASE("analytic fixtures") {
  const CurvatureReport flat = scalar_curvature_numeric(flat_fixture(), box(0.5, 0.9, -0.2, 0.2), 0.05);
  CHECK(flat.max_error < 1e-9);
  CHECK(flat.kahler_residual < 1e-10);

  for (double r : {1.0, 2.0}) {
    const auto sphere = [r](const HPoint&) { return 2.0 / (r * r); };
    const CurvatureReport s = scalar_curvature_numeric(sphere_fixture(r), box(0.6 * r, r, -0.2, 0.2), 0.05, sphere);
    CHECK(s.max_error < 1e-2 * 2.0 / (r * r));
    CHECK(s.order_in(1.8, 2.2));
    CHECK(s.kahler_residual < 1e-10);

    const auto hyper = [r](const HPoint&) { return -2.0 / (r * r); };
    const CurvatureReport h = scalar_curvature_numeric(hyperbolic_fixture(r), box(0.6 * r, r, -0.2, 0.2), 0.05, hyper);
    CHECK(h.max_error < 1e-2 * 2.0 / (r * r));
    CHECK(h.order_in(1.8, 2.2));
  }
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(FieldGrid(flat_fixture(), box(0.5, 0.55, -0.2, 0.2), 0.05), DomainError);
  CHECK_THROWS_AS(FieldGrid(flat_fixture(), box(0.05, 0.3, -0.2, 0.2), 0.05), EvaluationError);
  const FieldGrid g(flat_fixture(), box(0.5, 0.7, -0.1, 0.1), 0.05);
  CHECK(g.shape() == std::array<std::size_t, 3>{5, 5, 5});
  CHECK(g.node(4, 0, 2).z == doctest::Approx(0.7));
  CHECK(g.node(4, 0, 2).x3 == doctest::Approx(0.0).scale(1.0));
  std::ostringstream os;
  write_grid_csv(os, g);
  const std::string csv = os.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 125);
}

TEST_CASE("flat and constant-cone scenarios") {
  for (double c : {1.0, 0.7}) {
    const MetricField g = metric(ConeAngleSpec::constant(c), {});
    const GridBox b = box(0.6, 1.0, -0.2, 0.2);
    const CurvatureReport r = scalar_curvature_numeric(chart_field(g), b, 0.05);
    CHECK(r.max_error < 1e-9);
    const KahlerReport k = kahler_check(chart_field(g), b, 0.05);
    CHECK(k.residual < 1e-10);
  }
}

TEST_CASE("scalar-flat at second order with one charge") {
  const MetricField g = metric(varying(), {make_hpoint(1.0, 0.0, 0.0)});
  const GridBox b{make_hpoint(0.6, -0.1, 1.4), make_hpoint(0.8, 0.1, 1.6)};
  const CurvatureReport r = scalar_curvature_numeric(chart_field(g), b, 0.05);
  CHECK(r.max_error < 1e-2);
  CHECK(r.max_error_fine < r.max_error);
  CHECK(r.order_in(1.5, 2.5));
  CHECK(r.kahler_order == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("cone angle probe") {
  const Potential one = assemble_V(ConeAngleSpec::constant(1.0), ChargeConfig());
  CHECK(cone_angle_probe(one, 0.3, -0.2).angle == doctest::Approx(1.0).epsilon(1e-3));
  const Potential c = assemble_V(ConeAngleSpec::constant(0.7), ChargeConfig());
  const ConeProbeResult rc = cone_angle_probe(c, 0.3, -0.2);
  CHECK(rc.angle == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(rc.expected == doctest::Approx(0.7));
  CHECK(rc.heights.size() == 6);

  const Potential V = assemble_V(varying(), ChargeConfig({make_hpoint(1.0, 0.0, 1.0)}));
  const ConeProbeResult hi = cone_angle_probe(V, 1.0, 0.0), lo = cone_angle_probe(V, -1.0, 0.0);
  CHECK(hi.status == ProbeStatus::measured);
  CHECK(std::fabs(hi.angle - 1.5) < 1e-2);
  CHECK(std::fabs(lo.angle - 0.5) < 1e-2);
  CHECK(cone_angle_probe(V, 0.0, 1.0).status == ProbeStatus::skipped_vertical_line);
}

TEST_CASE("quasi-isometry") {
  const auto samples = far_samples(10.0, 10.0, 100, 3);
  REQUIRE(samples.size() == 100);
  for (const HPoint& p : samples) CHECK((p.z >= 10.0 || std::hypot(p.x2, p.x3) >= 10.0));

  const QuasiIsometryReport flat = quasi_isometry_check(metric(ConeAngleSpec::constant(1.0), {}), ConeAngleSpec::constant(1.0), samples);
  CHECK(flat.c == doctest::Approx(1.0).epsilon(1e-9));

  const QuasiIsometryReport cone = quasi_isometry_check(metric(ConeAngleSpec::constant(0.7), {}), ConeAngleSpec::constant(0.7), samples);
  CHECK(cone.c == doctest::Approx(1.0 / 0.7).epsilon(1e-9));
  for (double s : cone.sample_c) CHECK(s == doctest::Approx(cone.c).epsilon(1e-6));

  const ConeAngleSpec b = varying();
  const MetricField g = metric(b, {make_hpoint(1.0, 0.0, 0.0)});
  const QuasiIsometryReport near = quasi_isometry_check(g, b, far_samples(10.0, 10.0, 50, 4));
  const QuasiIsometryReport far = quasi_isometry_check(g, b, far_samples(100.0, 100.0, 50, 4));
  CHECK(std::isfinite(near.c));
  CHECK(far.c <= near.c * 1.01);
}
