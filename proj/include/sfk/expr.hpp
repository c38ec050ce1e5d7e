#pragma once

// A small arithmetic expression language over the boundary-plane
// coordinates (x2, x3), compiled to a stack program and evaluated in
// batches. The grammar is documented in docs/config_schema.md.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfk {

class Expression {
 public:
  // Throws ConfigError with the offending column on malformed input.
  static Expression compile(std::string_view source);

  double operator()(double x2, double x3) const;

  // out[i] = f(x2[i], x3[i]); all spans must have equal length.
  void evaluate(std::span<const double> x2, std::span<const double> x3, std::span<double> out) const;

  const std::string& source() const { return source_; }
  // True when the program never reads x2 or x3.
  bool is_constant() const;

  enum class Op : std::uint8_t {
    push_const, push_x2, push_x3,
    add, sub, mul, div, neg, ipow, pow,
    sqrt, abs, exp, log, sin, cos, tan, tanh, sinh, cosh, atan, atan2, min, max
  };
  struct Instr {
    Op op;
    double value = 0.0;  // push_const: the constant; ipow: the exponent
  };

 private:
  std::string source_;
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;

  void run(const double* x2, const double* x3, double* out, std::size_t n) const;
};

}  // namespace sfk
