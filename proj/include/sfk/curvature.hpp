#pragma once

// Finite-difference curvature on theta-reduced grids, the Kahler residual
// d omega, analytic fixtures, the cone-angle probe and the quasi-isometry
// comparison with g_beta.
//
// Grids are uniform in (z, x2, x3) with spacing h; derivatives are central
// (mixed second derivatives from the four diagonal neighbours) and only
// interior nodes are reported. Convergence orders compare the same nodes on
// the grid with spacing h/2.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "sfk/metric.hpp"

namespace sfk {

struct ChartSample {
  Mat4 g;
  Mat4 omega;
};
using ChartField = std::function<ChartSample(const HPoint&)>;

ChartField chart_field(const MetricField& g);

// Scalar curvature from g and its first and second coordinate derivatives
// (index 0 = theta derivatives, normally zero).
double scalar_curvature(const Mat4& g, const std::array<Mat4, 4>& dg,
                        const std::array<std::array<Mat4, 4>, 4>& ddg);

struct GridBox {
  HPoint lo;
  HPoint hi;
};

class FieldGrid {
 public:
  // Samples `f` at every node. Throws DomainError for fewer than three nodes
  // per axis and EvaluationError when the stencil reaches within 2h of z = 0.
  FieldGrid(const ChartField& f, const GridBox& box, double h);
  // From previously stored samples, x3 fastest.
  FieldGrid(const GridBox& box, double h, std::vector<ChartSample> samples);

  std::array<std::size_t, 3> shape() const { return n_; }
  double spacing() const { return h_; }
  const GridBox& box() const { return box_; }
  HPoint node(std::size_t i, std::size_t j, std::size_t k) const;
  const ChartSample& at(std::size_t i, std::size_t j, std::size_t k) const;
  const std::vector<ChartSample>& samples() const { return data_; }

  // Interior nodes only.
  double scalar_curvature(std::size_t i, std::size_t j, std::size_t k) const;
  double domega(std::size_t i, std::size_t j, std::size_t k) const;

  static std::array<std::size_t, 3> shape_for(const GridBox& box, double h);

 private:
  GridBox box_;
  double h_;
  std::array<std::size_t, 3> n_{};
  std::vector<ChartSample> data_;

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n_[1] + j) * n_[2] + k; }
};

// Same layout as write_field_csv, from the stored samples.
void write_grid_csv(std::ostream& os, const FieldGrid& grid);

struct CurvatureReport {
  double h = 0.0;
  std::vector<HPoint> points;  // interior nodes of the coarse grid
  std::vector<double> s;       // scalar curvature there
  double max_error = 0.0;      // max |s - expected| on the coarse grid
  double max_error_fine = 0.0; // same nodes, spacing h/2
  double order = 0.0;          // NaN when both errors are at rounding level
  double kahler_residual = 0.0;
  double kahler_residual_fine = 0.0;
  double kahler_order = 0.0;

  bool order_in(double lo, double hi) const { return order >= lo && order <= hi; }
};

using ExpectedCurvature = std::function<double(const HPoint&)>;

// `expected` defaults to 0 (scalar-flat).
CurvatureReport analyse_grids(const FieldGrid& coarse, const FieldGrid& fine, const ExpectedCurvature& expected = {});
CurvatureReport scalar_curvature_numeric(const ChartField& f, const GridBox& box, double h,
                                         const ExpectedCurvature& expected = {});

struct KahlerReport {
  double residual = 0.0;
  double residual_fine = 0.0;
  double order = 0.0;
};
KahlerReport kahler_check(const ChartField& f, const GridBox& box, double h);

// Analytic test metrics in the same chart. The sphere and hyperbolic
// fixtures are S^2(r) x R^2 and H^2(r) x R^2 with z as the polar distance
// (s = 2/r^2 and -2/r^2); both carry their product Kahler forms.
ChartField flat_fixture();
ChartField sphere_fixture(double r);
ChartField hyperbolic_fixture(double r);

enum class ProbeStatus { measured, skipped_vertical_line };

struct ConeProbeOptions {
  double z_top = 0.1;      // largest height on the ladder
  unsigned levels = 6;     // heights z_top / 2^k
  unsigned gauss_order = 16;
};

struct ConeProbeResult {
  double x2 = 0.0, x3 = 0.0;
  ProbeStatus status = ProbeStatus::measured;
  std::vector<double> heights;  // z on the ladder
  std::vector<double> radii;    // g-distance to the divisor, Int_0^z sqrt(V)
  std::vector<double> ratios;   // circumference / (2 pi radius)
  double angle = 0.0;           // two-point Richardson value from the two smallest radii
  double expected = 0.0;        // beta(x2, x3)
};

// Ratio at height z is (z / sqrt V(z)) / Int_0^z sqrt V; it does not
// involve A. Points within 1e-6 of a charge's vertical line are skipped.
ConeProbeResult cone_angle_probe(const Potential& V, double x2, double x3, const ConeProbeOptions& opts = {});

struct QuasiIsometryReport {
  std::size_t samples = 0;
  double lambda_min = 0.0;  // generalized eigenvalues of g against g_beta
  double lambda_max = 0.0;
  double c = 0.0;           // max(lambda_max, 1 / lambda_min)
  std::vector<double> sample_c;
};

QuasiIsometryReport quasi_isometry_check(const MetricField& g, const ConeAngleSpec& beta,
                                         std::span<const HPoint> samples);

// Half of the samples with z in [Z0, 10 Z0] over |x| <= R0, half with
// |x| in [R0, 10 R0] and z in [0.05, Z0]; log-uniform radially.
std::vector<HPoint> far_samples(double Z0, double R0, std::size_t n, std::uint64_t seed);

}  // namespace sfk
