#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfk/expr.hpp"
#include "sfk/hyperbolic.hpp"

namespace sfk {

// Samples of beta on a longitude-latitude grid of S(infinity). Latitude is
// measured in the ball model with y1 = sin(lat): lat = -90 is the origin of
// the boundary plane, lat = +90 the point at infinity. Longitude is
// atan2(y3, y2). Row i has lat = -90 + 180 i / (n_lat - 1); column j has
// lon = -180 + 360 j / n_lon (periodic). Values are row-major.
struct LonLatGrid {
  unsigned n_lon = 0;
  unsigned n_lat = 0;
  std::vector<double> values;

  // Text format described in docs/config_schema.md. Throws ConfigError.
  static LonLatGrid parse(std::string_view text);
  static LonLatGrid load(const std::string& path);

  double at(unsigned lat_index, unsigned lon_index) const { return values[lat_index * n_lon + lon_index]; }
  // Bilinear in (lon, lat), periodic in lon.
  double sample(const Vec3& xi) const;
};

/// Prescribed cone angle beta on C u {infinity}, together with the
/// reciprocal boundary data beta^{-1} on S(infinity) that drives the
/// Dirichlet problem.
class ConeAngleSpec {
 public:
  static ConeAngleSpec constant(double beta);
  // `constant_outside`: beta equals beta_at_infinity for |x| > R.
  static ConeAngleSpec from_expression(const std::string& expr, double beta_at_infinity,
                                       std::optional<double> constant_outside = std::nullopt);
  static ConeAngleSpec from_grid(LonLatGrid grid);

  double beta(double x2, double x3) const;
  double beta(const BoundaryPoint& b) const;
  double beta_at_infinity() const { return beta_inf_; }
  double inverse(double x2, double x3) const { return 1.0 / beta(x2, x3); }
  double inverse_at_infinity() const { return 1.0 / beta_inf_; }

  // out[i] = 1 / beta(x2[i], x3[i]).
  void inverse_batch(std::span<const double> x2, std::span<const double> x3,
                     std::span<double> out) const;

  bool is_constant() const { return kind_ == Kind::constant; }
  std::string description() const;

  // Sampled on a half-degree lon-lat grid of S(infinity), infinity included.
  double min_inverse() const { return min_inv_; }
  double max_inverse() const { return max_inv_; }
  double min_beta() const { return 1.0 / max_inv_; }
  double max_beta() const { return 1.0 / min_inv_; }
  // Largest chordal difference quotient of beta^{-1} between neighbouring
  // samples: the operational stand-in for the C^{1,delta} hypothesis.
  double max_difference_quotient() const { return max_quotient_; }

  // Hoelder exponent of the declared smoothness class; metadata only.
  double declared_holder_exponent() const { return holder_delta_; }
  void set_declared_holder_exponent(double d) { holder_delta_ = d; }

  // Throws ConfigError if beta is not positive at every sample or the
  // difference quotient exceeds `quotient_bound`.
  void validate(double quotient_bound) const;

 private:
  enum class Kind { constant, expression, grid };

  Kind kind_ = Kind::constant;
  double beta_inf_ = 1.0;
  std::shared_ptr<const Expression> expr_;
  std::optional<double> constant_outside_;
  std::shared_ptr<const LonLatGrid> grid_;
  double min_inv_ = 1.0, max_inv_ = 1.0, max_quotient_ = 0.0;
  double min_sampled_beta_ = 1.0;
  double holder_delta_ = 1.0;

  void compute_statistics();
};

}  // namespace sfk
