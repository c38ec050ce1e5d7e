#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sfk/cone_angle.hpp"
#include "sfk/errors.hpp"

using namespace sfk;

TEST_CASE("constant cone angle") {
  const ConeAngleSpec b = ConeAngleSpec::constant(0.7);
  CHECK(b.is_constant());
  CHECK(b.beta(3.0, -1.0) == 0.7);
  CHECK(b.beta(AtInfinity{}) == 0.7);
  CHECK(b.inverse_at_infinity() == doctest::Approx(1 / 0.7));
  CHECK(b.min_inverse() == b.max_inverse());
  CHECK(b.max_difference_quotient() == 0.0);
  CHECK_THROWS_AS(ConeAngleSpec::constant(0.0), ConfigError);
  CHECK_THROWS_AS(ConeAngleSpec::constant(-1.0), ConfigError);
}

TEST_CASE("expression cone angle") {
  const ConeAngleSpec b = ConeAngleSpec::from_expression("1 + x2/(1 + x2^2 + x3^2)", 1.0);
  CHECK(b.beta(1.0, 0.0) == doctest::Approx(1.5));
  CHECK(b.beta(-1.0, 0.0) == doctest::Approx(0.5));
  CHECK(b.beta(AtInfinity{}) == 1.0);
  CHECK(b.min_beta() == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(b.max_beta() == doctest::Approx(1.5).epsilon(1e-4));
  CHECK_NOTHROW(b.validate(100.0));

  std::vector<double> x2{1.0, -1.0, 0.3}, x3{0.0, 0.0, 2.0}, out(3);
  b.inverse_batch(x2, x3, out);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(b.inverse(x2[i], x3[i])));
}

TEST_CASE("constant outside a disk") {
  const ConeAngleSpec b = ConeAngleSpec::from_expression("2 + x2", 1.0, 3.0);
  CHECK(b.beta(0.5, 0.0) == doctest::Approx(2.5));
  CHECK(b.beta(5.0, 0.0) == 1.0);
}

TEST_CASE("validation rejects non-positive or rough beta") {
  const ConeAngleSpec neg = ConeAngleSpec::from_expression("x2", 1.0);
  CHECK_THROWS_AS(neg.validate(100.0), ConfigError);
  const ConeAngleSpec steep = ConeAngleSpec::from_expression("1 + 0.5*tanh(1000*x2)", 1.0);
  CHECK_THROWS_AS(steep.validate(100.0), ConfigError);
  CHECK_THROWS_AS(ConeAngleSpec::from_expression("1", 0.0), ConfigError);
}

TEST_CASE("lon-lat grid") {
  std::ostringstream s;
  s << "sfk-lonlat-grid 1  # header\n4 3\n";
  s << "2 2 2 2\n";    // lat -90: the origin of the plane
  s << "1 1.5 1 0.5\n";
  s << "1 1 1 1\n";    // lat +90: infinity
  const LonLatGrid g = LonLatGrid::parse(s.str());
  CHECK(g.n_lon == 4);
  CHECK(g.n_lat == 3);
  CHECK(g.at(1, 1) == 1.5);
  const ConeAngleSpec b = ConeAngleSpec::from_grid(g);
  CHECK(b.beta_at_infinity() == doctest::Approx(1.0));
  CHECK(b.beta(0.0, 0.0) == doctest::Approx(2.0));
  // |x| = 1 is the equator; columns are at longitudes -180, -90, 0, 90.
  CHECK(b.beta(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(b.beta(0.0, -1.0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(b.beta(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-9));

  CHECK_THROWS_AS(LonLatGrid::parse("sfk-lonlat-grid 2\n4 3\n"), ConfigError);
  CHECK_THROWS_AS(LonLatGrid::parse("sfk-lonlat-grid 1\n4 3\n1 1 1"), ConfigError);
  CHECK_THROWS_AS(LonLatGrid::parse("sfk-lonlat-grid 1\n4 3\n1 2 1 1 1 1 1 1 1 1 1 1"), ConfigError);
  CHECK_THROWS_AS(LonLatGrid::load("/nonexistent/grid.txt"), ConfigError);
}
