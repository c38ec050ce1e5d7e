#pragma once

// The four-dimensional metric and Kahler form in the chart (theta, z, x2, x3),
//
//   g     = z^2 (V^{-1} eta^2 + V h) = (z^2 / V) eta^2 + V (dz^2 + dx2^2 + dx3^2),
//   omega = z dz ^ eta + V dx2 ^ dx3,        eta = dtheta + A,
//
// the complex structure and coframe checks, the model metric g_beta and the
// ansatz-level curvature formulas in the (x1, x2, x3) coordinates, x1 = z^2 / 2.
//
// Index order everywhere: 0 = theta, 1 = z, 2 = x2, 3 = x3. Two-forms are
// stored as antisymmetric 4x4 matrices, omega = (1/2) omega_ab dx^a ^ dx^b.

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>

#include <Eigen/Dense>

#include "sfk/connection.hpp"

namespace sfk {

using Mat4 = Eigen::Matrix4d;

// Throws EvaluationError when the result is not positive definite.
Mat4 assemble_g(double V, const Vec3& A, double z);
Mat4 assemble_g(const FieldJet& f, const HPoint& p);
Mat4 assemble_omega(double V, const Vec3& A, double z);
Mat4 assemble_omega(const FieldJet& f, const HPoint& p);

// dg[c] = d g / d x^c; dg[0] (theta) is zero.
std::array<Mat4, 4> metric_derivatives(const FieldJet& f, const HPoint& p);

// J^a_b with omega(X, Y) = g(JX, Y), i.e. J = -g^{-1} omega.
Mat4 complex_structure(const Mat4& g, const Mat4& omega);
// max |J^2 + I|.
double complex_structure_defect(const Mat4& g, const Mat4& omega);

// omega ^ omega / vol_g for the orientation dz ^ dtheta ^ dx2 ^ dx3 (which
// makes it +2 for a compatible pair).
double omega_wedge_ratio(const Mat4& g, const Mat4& omega);

// max over components of |V^{-1} omega - (i/2)(a1 ^ conj a1 + a2 ^ conj a2)| with
// a1 = dx2 + i dx3, a2 = dz + i z V^{-1} eta.
double coframe_residual(const FieldJet& f, const HPoint& p);

// Analytic closedness defect of omega: dV/dz - z F_23 (zero when F = *_h dV).
double omega_closedness(const FieldJet& f, const HPoint& p);

struct MetricSample {
  FieldJet field;
  Mat4 g;
  Mat4 omega;
};

class MetricField {
 public:
  explicit MetricField(std::shared_ptr<const ConnectionData> A);

  MetricSample sample(const HPoint& p) const;
  Mat4 g(const HPoint& p) const { return sample(p).g; }
  // theta is accepted and ignored: nothing in the chart depends on it.
  Mat4 g(double theta, const HPoint& p) const;
  Mat4 omega(const HPoint& p) const { return sample(p).omega; }

  static constexpr bool theta_independent = true;

  const ConnectionData& connection() const { return *A_; }
  const Potential& potential() const { return A_->potential(); }
  std::shared_ptr<const ConnectionData> connection_ptr() const { return A_; }

 private:
  std::shared_ptr<const ConnectionData> A_;
};

// Field dump: header lines starting with '#' give the chart bounds, grid
// shape and component order, then one row per node
//   z, x2, x3, g_tt, g_tz, g_t2, g_t3, g_zz, g_z2, g_z3, g_22, g_23, g_33
// with x3 varying fastest.
void write_field_csv(std::ostream& os, const MetricField& g, const HPoint& lo, const HPoint& hi,
                     std::array<std::size_t, 3> shape);
void write_field_csv_header(std::ostream& os, const HPoint& lo, const HPoint& hi, std::array<std::size_t, 3> shape);
void write_field_csv_row(std::ostream& os, const HPoint& p, const Mat4& g);

// g_beta = dz^2 + beta^2 z^2 dtheta^2 + dx2^2 + dx3^2, beta at the foot point.
Mat4 model_metric(const ConeAngleSpec& beta, const HPoint& p);

enum class ModelForm {
  conformal,  // Kahler form of beta^{-1} g_beta: z dz ^ dtheta + beta^{-1} dx2 ^ dx3
  displayed,  // z dz ^ dtheta + beta dx2 ^ dx3, as printed for the conformal metric
  plain,      // form of g_beta itself: beta z dz ^ dtheta + dx2 ^ dx3 (not closed)
};
Mat4 model_form(const ConeAngleSpec& beta, const HPoint& p, ModelForm kind);

// (V^{-1} g - (beta^2 z^2 eta^2 + dz^2 + g_R2)) / z^3 measured two ways.
struct ConformalRemainder {
  double coordinate = 0.0;  // max |component| in the chart
  double model = 0.0;       // operator norm against g_beta
};
ConformalRemainder conformal_remainder(const FieldJet& f, const ConeAngleSpec& beta, const HPoint& p);

// Functions of (x1, x2, x3).
using AnsatzFunction = std::function<double(double, double, double)>;

// v = log(2 x1) and W = V / (2 x1) for a given potential.
struct LeBrunData {
  explicit LeBrunData(std::shared_ptr<const Potential> V);

  AnsatzFunction v() const;
  AnsatzFunction W() const;
  const Potential& potential() const { return *V_; }

 private:
  std::shared_ptr<const Potential> V_;
};

// s = -(d^2_{x1} e^v + d^2_{x2} v + d^2_{x3} v) / (W e^v) by central
// differences with step h. Throws DomainError when W e^v <= 0.
double scalar_curvature_ansatz(const AnsatzFunction& v, const AnsatzFunction& W, double x1, double x2,
                               double x3, double h = 1e-4);

// The hyperbolic choice v = log(2 x1): the numerator vanishes identically,
// so this is exactly 0 once W e^v > 0 has been checked at p.
double scalar_curvature_ansatz(const LeBrunData& data, const HPoint& p);

// Delta_h V at p: laplacian_h at the default step and half of it,
// Richardson-combined.
double compatibility_residual(const Potential& V, const HPoint& p);

}  // namespace sfk
