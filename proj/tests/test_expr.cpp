#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sfk/errors.hpp"
#include "sfk/expr.hpp"

using namespace sfk;

TEST_CASE("precedence and associativity") {
  CHECK(Expression::compile("1 + 2 * 3")(0, 0) == 7.0);
  CHECK(Expression::compile("2 ^ 3 ^ 2")(0, 0) == 512.0);
  CHECK(Expression::compile("-2 ^ 2")(0, 0) == -4.0);
  CHECK(Expression::compile("(1 + 2) * 3")(0, 0) == 9.0);
  CHECK(Expression::compile("8 / 4 / 2")(0, 0) == 1.0);
  CHECK(Expression::compile("1 - 2 - 3")(0, 0) == -4.0);
  CHECK(Expression::compile("2e-1 * 10")(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("variables, constants and functions") {
  const Expression f = Expression::compile("1 + x2/(1 + x2^2 + x3^2)");
  CHECK(f(1.0, 0.0) == doctest::Approx(1.5));
  CHECK(f(-1.0, 0.0) == doctest::Approx(0.5));
  CHECK(!f.is_constant());
  CHECK(Expression::compile("2 * pi + e")(0, 0) == doctest::Approx(2 * std::numbers::pi + std::numbers::e));
  CHECK(Expression::compile("cos(pi)").is_constant());
  CHECK(Expression::compile("atan2(x3, x2)")(0.0, 1.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(Expression::compile("min(x2, x3) + max(x2, x3)")(2.0, 5.0) == 7.0);
  CHECK(Expression::compile("pow(x2, 0.5)")(9.0, 0.0) == doctest::Approx(3.0));
  CHECK(Expression::compile("x2 ^ -2")(2.0, 0.0) == doctest::Approx(0.25));
  CHECK(Expression::compile("sqrt(abs(x2)) + exp(0) + log(e) + tanh(0) + sinh(0) + cosh(0) + tan(0) + atan(0) + sin(0)")(
            -4.0, 0.0) == doctest::Approx(5.0));
}

TEST_CASE("batched evaluation matches pointwise evaluation") {
  const Expression f = Expression::compile("1 + 0.5*sin(atan2(x3, x2)) * x2^2 / (1 + x2^2 + x3^2)");
  std::vector<double> x2(1000), x3(1000), out(1000);
  for (std::size_t i = 0; i < x2.size(); ++i) {
    x2[i] = std::cos(0.37 * i) * (1 + 0.01 * i);
    x3[i] = std::sin(0.11 * i) * 3;
  }
  f.evaluate(x2, x3, out);
  for (std::size_t i = 0; i < x2.size(); ++i) CHECK(out[i] == f(x2[i], x3[i]));
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(Expression::compile("1 +"), ConfigError);
  CHECK_THROWS_AS(Expression::compile("foo(1)"), ConfigError);
  CHECK_THROWS_AS(Expression::compile("y"), ConfigError);
  CHECK_THROWS_AS(Expression::compile("(1"), ConfigError);
  CHECK_THROWS_AS(Expression::compile("atan2(1)"), ConfigError);
  CHECK_THROWS_AS(Expression::compile("1 2"), ConfigError);
  CHECK_THROWS_WITH_AS(Expression::compile("1 + $"), doctest::Contains("column 5"), ConfigError);
}
