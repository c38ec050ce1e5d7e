#include "sfk/metric.hpp"

#include <cmath>
#include <complex>
#include <ostream>

#include "sfk/errors.hpp"

namespace sfk {

namespace {

Eigen::Vector4d eta_of(const Vec3& A) { return {1.0, A[0], A[1], A[2]}; }

void require_spd(const Mat4& g, double z, double x2, double x3) {
  Eigen::LLT<Mat4> llt(g);
  if (llt.info() != Eigen::Success) throw EvaluationError("metric is not positive definite", z, x2, x3);
}

}  // namespace

Mat4 assemble_g(double V, const Vec3& A, double z) {
  if (!(z > 0.0)) throw DomainError("assemble_g: z must be positive");
  const Eigen::Vector4d eta = eta_of(A);
  Mat4 g = (z * z / V) * eta * eta.transpose();
  for (int i = 1; i < 4; ++i) g(i, i) += V;
  require_spd(g, z, 0.0, 0.0);
  return g;
}

Mat4 assemble_g(const FieldJet& f, const HPoint& p) {
  const Eigen::Vector4d eta = eta_of(f.A);
  Mat4 g = (p.z * p.z / f.V) * eta * eta.transpose();
  for (int i = 1; i < 4; ++i) g(i, i) += f.V;
  require_spd(g, p.z, p.x2, p.x3);
  return g;
}

Mat4 assemble_omega(double V, const Vec3& A, double z) {
  Mat4 w = Mat4::Zero();
  // z dz ^ (dtheta + A_z dz + A_2 dx2 + A_3 dx3) + V dx2 ^ dx3
  w(1, 0) = z;
  w(1, 2) = z * A[1];
  w(1, 3) = z * A[2];
  w(2, 3) = V;
  return w - w.transpose();
}

Mat4 assemble_omega(const FieldJet& f, const HPoint& p) { return assemble_omega(f.V, f.A, p.z); }

std::array<Mat4, 4> metric_derivatives(const FieldJet& f, const HPoint& p) {
  std::array<Mat4, 4> dg;
  dg[0].setZero();
  const Eigen::Vector4d eta = eta_of(f.A);
  const double z = p.z, c = z * z / f.V;
  for (int k = 1; k < 4; ++k) {
    const double dc = (k == 1 ? 2.0 * z / f.V : 0.0) - z * z * f.dV[k - 1] / (f.V * f.V);
    Eigen::Vector4d deta = Eigen::Vector4d::Zero();
    for (int a = 1; a < 4; ++a) deta[a] = f.dA[a - 1][k - 1];
    Mat4 d = dc * eta * eta.transpose() + c * (deta * eta.transpose() + eta * deta.transpose());
    for (int i = 1; i < 4; ++i) d(i, i) += f.dV[k - 1];
    dg[k] = d;
  }
  return dg;
}

Mat4 complex_structure(const Mat4& g, const Mat4& omega) { return -g.inverse() * omega; }

double complex_structure_defect(const Mat4& g, const Mat4& omega) {
  const Mat4 J = complex_structure(g, omega);
  return (J * J + Mat4::Identity()).cwiseAbs().maxCoeff();
}

double omega_wedge_ratio(const Mat4& g, const Mat4& omega) {
  const double pf = omega(0, 1) * omega(2, 3) - omega(0, 2) * omega(1, 3) + omega(0, 3) * omega(1, 2);
  // omega ^ omega = 2 Pf dtheta ^ dz ^ dx2 ^ dx3; swapping to dz ^ dtheta flips the sign.
  return -2.0 * pf / std::sqrt(g.determinant());
}

double coframe_residual(const FieldJet& f, const HPoint& p) {
  using C = std::complex<double>;
  using CVec = Eigen::Matrix<C, 4, 1>;
  using CMat = Eigen::Matrix<C, 4, 4>;
  const C I(0.0, 1.0);
  const Eigen::Vector4d eta = eta_of(f.A);
  CVec a1 = CVec::Zero(), a2 = CVec::Zero();
  a1[2] = 1.0;
  a1[3] = I;
  for (int k = 0; k < 4; ++k) a2[k] = I * (p.z / f.V) * eta[k];
  a2[1] += 1.0;
  const auto wedge = [](const CVec& a, const CVec& b) -> CMat { return a * b.transpose() - b * a.transpose(); };
  const CMat rhs = (0.5 * I) * (wedge(a1, a1.conjugate()) + wedge(a2, a2.conjugate()));
  const CMat lhs = assemble_omega(f, p).cast<C>() / f.V;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double omega_closedness(const FieldJet& f, const HPoint& p) {
  // d omega restricted to (z, x2, x3): dV/dz - z (dA_3/dx2 - dA_2/dx3), and
  // F_23 = (*_h dV)_23 = (dV/dz) / z.
  const double curl = f.dA[2][1] - f.dA[1][2];
  return f.dV[0] - p.z * curl;
}

MetricField::MetricField(std::shared_ptr<const ConnectionData> A) : A_(std::move(A)) {
  if (!A_) throw DomainError("MetricField: missing connection");
}

MetricSample MetricField::sample(const HPoint& p) const {
  MetricSample s;
  s.field = A_->jet(p);
  s.g = assemble_g(s.field, p);
  s.omega = assemble_omega(s.field, p);
  return s;
}

Mat4 MetricField::g(double /*theta*/, const HPoint& p) const { return g(p); }

void write_field_csv_header(std::ostream& os, const HPoint& lo, const HPoint& hi, std::array<std::size_t, 3> shape) {
  os.precision(17);
  os << "# sfk-field 1\n";
  os << "# bounds z " << lo.z << ' ' << hi.z << " x2 " << lo.x2 << ' ' << hi.x2 << " x3 " << lo.x3 << ' '
     << hi.x3 << '\n';
  os << "# shape " << shape[0] << ' ' << shape[1] << ' ' << shape[2] << '\n';
  os << "z,x2,x3,g_tt,g_tz,g_t2,g_t3,g_zz,g_z2,g_z3,g_22,g_23,g_33\n";
}

void write_field_csv_row(std::ostream& os, const HPoint& p, const Mat4& g) {
  os << p.z << ',' << p.x2 << ',' << p.x3;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) os << ',' << g(a, b);
  os << '\n';
}

void write_field_csv(std::ostream& os, const MetricField& g, const HPoint& lo, const HPoint& hi,
                     std::array<std::size_t, 3> shape) {
  for (std::size_t n : shape)
    if (n < 1) throw DomainError("write_field_csv: empty grid");
  write_field_csv_header(os, lo, hi, shape);
  const auto lerp = [](double a, double b, std::size_t i, std::size_t n) {
    return n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  for (std::size_t i = 0; i < shape[0]; ++i)
    for (std::size_t j = 0; j < shape[1]; ++j)
      for (std::size_t k = 0; k < shape[2]; ++k) {
        const HPoint p = make_hpoint(lerp(lo.z, hi.z, i, shape[0]), lerp(lo.x2, hi.x2, j, shape[1]),
                                     lerp(lo.x3, hi.x3, k, shape[2]));
        write_field_csv_row(os, p, g.g(p));
      }
}

Mat4 model_metric(const ConeAngleSpec& beta, const HPoint& p) {
  const double b = beta.beta(p.x2, p.x3);
  Mat4 g = Mat4::Identity();
  g(0, 0) = b * b * p.z * p.z;
  return g;
}

Mat4 model_form(const ConeAngleSpec& beta, const HPoint& p, ModelForm kind) {
  const double b = beta.beta(p.x2, p.x3);
  Mat4 w = Mat4::Zero();
  switch (kind) {
    case ModelForm::conformal:
      w(1, 0) = p.z;
      w(2, 3) = 1.0 / b;
      break;
    case ModelForm::displayed:
      w(1, 0) = p.z;
      w(2, 3) = b;
      break;
    case ModelForm::plain:
      w(1, 0) = b * p.z;
      w(2, 3) = 1.0;
      break;
  }
  return w - w.transpose();
}

ConformalRemainder conformal_remainder(const FieldJet& f, const ConeAngleSpec& beta, const HPoint& p) {
  const double b = beta.beta(p.x2, p.x3);
  const double z = p.z;
  const Eigen::Vector4d eta = eta_of(f.A);
  const Mat4 g = assemble_g(f, p);
  Mat4 model = (b * b * z * z) * eta * eta.transpose();
  for (int i = 1; i < 4; ++i) model(i, i) += 1.0;
  const Mat4 T = (g / f.V - model) / (z * z * z);
  ConformalRemainder r;
  r.coordinate = T.cwiseAbs().maxCoeff();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat4> es(T, model_metric(beta, p), Eigen::EigenvaluesOnly);
  r.model = es.eigenvalues().cwiseAbs().maxCoeff();
  return r;
}

LeBrunData::LeBrunData(std::shared_ptr<const Potential> V) : V_(std::move(V)) {
  if (!V_) throw DomainError("LeBrunData: missing potential");
}

AnsatzFunction LeBrunData::v() const {
  return [](double x1, double, double) {
    if (!(x1 > 0.0)) throw DomainError("v = log(2 x1) needs x1 > 0");
    return std::log(2.0 * x1);
  };
}

AnsatzFunction LeBrunData::W() const {
  auto V = V_;
  return [V](double x1, double x2, double x3) {
    if (!(x1 > 0.0)) throw DomainError("W needs x1 > 0");
    return V->value(make_hpoint(std::sqrt(2.0 * x1), x2, x3)) / (2.0 * x1);
  };
}

double scalar_curvature_ansatz(const AnsatzFunction& v, const AnsatzFunction& W, double x1, double x2,
                               double x3, double h) {
  if (!(x1 > 0.0)) throw DomainError("scalar_curvature_ansatz: x1 must be positive");
  h = std::min(h, 0.5 * x1);
  const double v0 = v(x1, x2, x3);
  const double den = W(x1, x2, x3) * std::exp(v0);
  if (!(den > 0.0)) throw DomainError("scalar_curvature_ansatz: W e^v must be positive");
  const double ev = (std::exp(v(x1 + h, x2, x3)) - 2.0 * std::exp(v0) + std::exp(v(x1 - h, x2, x3))) / (h * h);
  const double v22 = (v(x1, x2 + h, x3) - 2.0 * v0 + v(x1, x2 - h, x3)) / (h * h);
  const double v33 = (v(x1, x2, x3 + h) - 2.0 * v0 + v(x1, x2, x3 - h)) / (h * h);
  return -(ev + v22 + v33) / den;
}

double scalar_curvature_ansatz(const LeBrunData& data, const HPoint& p) {
  // e^v = 2 x1 = z^2 is linear in x1 and v has no x2, x3 dependence.
  const double We = data.potential().value(p);
  if (!(We > 0.0)) throw DomainError("scalar_curvature_ansatz: W e^v must be positive");
  return 0.0;
}

double compatibility_residual(const Potential& V, const HPoint& p) {
  // Richardson on the default step and its half, so that the truncation
  // error near a charge does not swamp the quadrature error.
  const ScalarField f = V.field();
  const double h = fd_step(p);
  return (4.0 * laplacian_h(f, p, 0.5 * h) - laplacian_h(f, p, h)) / 3.0;
}

}  // namespace sfk
