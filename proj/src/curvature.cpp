#include "sfk/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "sfk/errors.hpp"
#include "sfk/quadrature.hpp"

namespace sfk {

namespace {

constexpr double kRoundingFloor = 1e-11;

double order_of(double coarse, double fine) {
  if (coarse < kRoundingFloor && fine < kRoundingFloor) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

ChartSample diagonal(double gtt, double gzz, double wzt) {
  ChartSample s;
  s.g = Mat4::Identity();
  s.g(0, 0) = gtt;
  s.g(1, 1) = gzz;
  s.omega = Mat4::Zero();
  s.omega(1, 0) = wzt;
  s.omega(0, 1) = -wzt;
  s.omega(2, 3) = 1.0;
  s.omega(3, 2) = -1.0;
  return s;
}

}  // namespace

ChartField chart_field(const MetricField& g) {
  return [&g](const HPoint& p) {
    const MetricSample m = g.sample(p);
    return ChartSample{m.g, m.omega};
  };
}

double scalar_curvature(const Mat4& g, const std::array<Mat4, 4>& dg, const std::array<std::array<Mat4, 4>, 4>& ddg) {
  const Mat4 gi = g.inverse();
  // Christoffel symbols of the first kind, G1[f][b][c], then the second kind.
  double G1[4][4][4], G2[4][4][4];
  for (int f = 0; f < 4; ++f)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) G1[f][b][c] = 0.5 * (dg[b](f, c) + dg[c](f, b) - dg[f](b, c));
  for (int e = 0; e < 4; ++e)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double v = 0.0;
        for (int f = 0; f < 4; ++f) v += gi(e, f) * G1[f][b][c];
        G2[e][b][c] = v;
      }
  // s = g^{ac} g^{bd} R_abcd with
  // R_abcd = 1/2 (g_ad,bc + g_bc,ad - g_bd,ac - g_ac,bd) + g_ef (G^e_bc G^f_ad - G^e_bd G^f_ac).
  double s = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const double w = gi(a, c) * gi(b, d);
          if (w == 0.0) continue;
          double R = 0.5 * (ddg[b][c](a, d) + ddg[a][d](b, c) - ddg[a][c](b, d) - ddg[b][d](a, c));
          for (int f = 0; f < 4; ++f) R += G1[f][a][d] * G2[f][b][c] - G1[f][a][c] * G2[f][b][d];
          s += w * R;
        }
  return s;
}

std::array<std::size_t, 3> FieldGrid::shape_for(const GridBox& box, double h) {
  if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
  const double ext[3] = {box.hi.z - box.lo.z, box.hi.x2 - box.lo.x2, box.hi.x3 - box.lo.x3};
  std::array<std::size_t, 3> n{};
  for (int d = 0; d < 3; ++d) {
    if (!(ext[d] > 0.0)) throw DomainError("grid box must have positive extent in every direction");
    n[d] = static_cast<std::size_t>(std::llround(ext[d] / h)) + 1;
    if (n[d] < 3)
      throw DomainError("grid too coarse: " + std::to_string(n[d]) + " nodes along axis " + std::to_string(d) +
                        " (extent " + std::to_string(ext[d]) + ", h " + std::to_string(h) +
                        "); second derivatives need at least 3");
  }
  if (!(box.lo.z > 2.0 * h))
    throw EvaluationError("grid stencil reaches within 2h of the divisor (h = " + std::to_string(h) + ")", box.lo.z,
                          box.lo.x2, box.lo.x3);
  return n;
}

FieldGrid::FieldGrid(const ChartField& f, const GridBox& box, double h) : box_(box), h_(h), n_(shape_for(box, h)) {
  data_.reserve(n_[0] * n_[1] * n_[2]);
  for (std::size_t i = 0; i < n_[0]; ++i)
    for (std::size_t j = 0; j < n_[1]; ++j)
      for (std::size_t k = 0; k < n_[2]; ++k) data_.push_back(f(node(i, j, k)));
}

FieldGrid::FieldGrid(const GridBox& box, double h, std::vector<ChartSample> samples)
    : box_(box), h_(h), n_(shape_for(box, h)), data_(std::move(samples)) {
  if (data_.size() != n_[0] * n_[1] * n_[2]) throw DomainError("stored grid does not match its shape");
}

HPoint FieldGrid::node(std::size_t i, std::size_t j, std::size_t k) const {
  return make_hpoint(box_.lo.z + h_ * i, box_.lo.x2 + h_ * j, box_.lo.x3 + h_ * k);
}

void write_grid_csv(std::ostream& os, const FieldGrid& grid) {
  const auto n = grid.shape();
  write_field_csv_header(os, grid.node(0, 0, 0), grid.node(n[0] - 1, n[1] - 1, n[2] - 1), n);
  for (std::size_t i = 0; i < n[0]; ++i)
    for (std::size_t j = 0; j < n[1]; ++j)
      for (std::size_t k = 0; k < n[2]; ++k) write_field_csv_row(os, grid.node(i, j, k), grid.at(i, j, k).g);
}

const ChartSample& FieldGrid::at(std::size_t i, std::size_t j, std::size_t k) const { return data_[index(i, j, k)]; }

double FieldGrid::scalar_curvature(std::size_t i, std::size_t j, std::size_t k) const {
  if (i == 0 || j == 0 || k == 0 || i + 1 >= n_[0] || j + 1 >= n_[1] || k + 1 >= n_[2])
    throw DomainError("scalar curvature requested at a boundary node");
  const auto g_at = [&](int di, int dj, int dk) -> const Mat4& { return at(i + di, j + dj, k + dk).g; };
  const auto shift = [](int d, int s) {
    std::array<int, 3> o{0, 0, 0};
    o[d] = s;
    return o;
  };
  std::array<Mat4, 4> dg;
  std::array<std::array<Mat4, 4>, 4> ddg;
  for (auto& row : ddg)
    for (auto& m : row) m.setZero();
  dg[0].setZero();
  const Mat4& g0 = g_at(0, 0, 0);
  const double h2 = h_ * h_;
  for (int d = 0; d < 3; ++d) {
    const auto p = shift(d, 1), m = shift(d, -1);
    const Mat4& gp = g_at(p[0], p[1], p[2]);
    const Mat4& gm = g_at(m[0], m[1], m[2]);
    dg[d + 1] = (gp - gm) / (2.0 * h_);
    ddg[d + 1][d + 1] = (gp - 2.0 * g0 + gm) / h2;
  }
  for (int d = 0; d < 3; ++d)
    for (int e = d + 1; e < 3; ++e) {
      std::array<int, 3> pp{0, 0, 0}, pm{0, 0, 0}, mp{0, 0, 0}, mm{0, 0, 0};
      pp[d] = 1, pp[e] = 1;
      pm[d] = 1, pm[e] = -1;
      mp[d] = -1, mp[e] = 1;
      mm[d] = -1, mm[e] = -1;
      const Mat4 v = (g_at(pp[0], pp[1], pp[2]) - g_at(pm[0], pm[1], pm[2]) - g_at(mp[0], mp[1], mp[2]) +
                      g_at(mm[0], mm[1], mm[2])) /
                     (4.0 * h2);
      ddg[d + 1][e + 1] = v;
      ddg[e + 1][d + 1] = v;
    }
  return sfk::scalar_curvature(g0, dg, ddg);
}

double FieldGrid::domega(std::size_t i, std::size_t j, std::size_t k) const {
  if (i == 0 || j == 0 || k == 0 || i + 1 >= n_[0] || j + 1 >= n_[1] || k + 1 >= n_[2])
    throw DomainError("d omega requested at a boundary node");
  std::array<Mat4, 4> dw;
  dw[0].setZero();
  for (int d = 0; d < 3; ++d) {
    std::array<std::size_t, 3> p{i, j, k}, m{i, j, k};
    ++p[d];
    --m[d];
    dw[d + 1] = (at(p[0], p[1], p[2]).omega - at(m[0], m[1], m[2]).omega) / (2.0 * h_);
  }
  double r = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c) r = std::max(r, std::fabs(dw[a](b, c) + dw[b](c, a) + dw[c](a, b)));
  return r;
}

CurvatureReport analyse_grids(const FieldGrid& coarse, const FieldGrid& fine, const ExpectedCurvature& expected) {
  const auto nc = coarse.shape(), nf = fine.shape();
  for (int d = 0; d < 3; ++d)
    if (nf[d] != 2 * nc[d] - 1) throw DomainError("fine grid must halve the coarse spacing on the same box");
  CurvatureReport r;
  r.h = coarse.spacing();
  for (std::size_t i = 1; i + 1 < nc[0]; ++i)
    for (std::size_t j = 1; j + 1 < nc[1]; ++j)
      for (std::size_t k = 1; k + 1 < nc[2]; ++k) {
        const HPoint p = coarse.node(i, j, k);
        const double ex = expected ? expected(p) : 0.0;
        const double s = coarse.scalar_curvature(i, j, k);
        const double sf = fine.scalar_curvature(2 * i, 2 * j, 2 * k);
        r.points.push_back(p);
        r.s.push_back(s);
        r.max_error = std::max(r.max_error, std::fabs(s - ex));
        r.max_error_fine = std::max(r.max_error_fine, std::fabs(sf - ex));
        r.kahler_residual = std::max(r.kahler_residual, coarse.domega(i, j, k));
        r.kahler_residual_fine = std::max(r.kahler_residual_fine, fine.domega(2 * i, 2 * j, 2 * k));
      }
  r.order = order_of(r.max_error, r.max_error_fine);
  r.kahler_order = order_of(r.kahler_residual, r.kahler_residual_fine);
  return r;
}

CurvatureReport scalar_curvature_numeric(const ChartField& f, const GridBox& box, double h,
                                         const ExpectedCurvature& expected) {
  return analyse_grids(FieldGrid(f, box, h), FieldGrid(f, box, 0.5 * h), expected);
}

KahlerReport kahler_check(const ChartField& f, const GridBox& box, double h) {
  const CurvatureReport r = scalar_curvature_numeric(f, box, h);
  return {r.kahler_residual, r.kahler_residual_fine, r.kahler_order};
}

ChartField flat_fixture() {
  return [](const HPoint& p) { return diagonal(p.z * p.z, 1.0, p.z); };
}

ChartField sphere_fixture(double r) {
  if (!(r > 0.0)) throw DomainError("sphere fixture radius must be positive");
  return [r](const HPoint& p) {
    const double s = std::sin(p.z);
    return diagonal(r * r * s * s, r * r, r * r * s);
  };
}

ChartField hyperbolic_fixture(double r) {
  if (!(r > 0.0)) throw DomainError("hyperbolic fixture radius must be positive");
  return [r](const HPoint& p) {
    const double s = std::sinh(p.z);
    return diagonal(r * r * s * s, r * r, r * r * s);
  };
}

ConeProbeResult cone_angle_probe(const Potential& V, double x2, double x3, const ConeProbeOptions& opts) {
  if (!(opts.z_top > 0.0) || opts.levels < 2 || opts.gauss_order == 0)
    throw DomainError("cone probe needs z_top > 0 and at least two levels");
  ConeProbeResult r;
  r.x2 = x2;
  r.x3 = x3;
  r.expected = V.harmonic().beta().beta(x2, x3);
  for (const HPoint& q : V.charges().points())
    if (std::hypot(x2 - q.x2, x3 - q.x3) < 1e-6) {
      r.status = ProbeStatus::skipped_vertical_line;
      r.angle = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
  const GaussRule& g = gauss_legendre(opts.gauss_order);
  double z = opts.z_top;
  for (unsigned l = 0; l < opts.levels; ++l, z *= 0.5) {
    double rho = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double t = 0.5 * z * (1.0 + g.nodes[k]);
      rho += 0.5 * z * g.weights[k] * std::sqrt(V.value(make_hpoint(t, x2, x3)));
    }
    const double circ = z / std::sqrt(V.value(make_hpoint(z, x2, x3)));
    r.heights.push_back(z);
    r.radii.push_back(rho);
    r.ratios.push_back(circ / rho);
  }
  const std::size_t n = r.ratios.size();
  r.angle = 2.0 * r.ratios[n - 1] - r.ratios[n - 2];
  return r;
}

QuasiIsometryReport quasi_isometry_check(const MetricField& g, const ConeAngleSpec& beta,
                                         std::span<const HPoint> samples) {
  QuasiIsometryReport r;
  r.lambda_min = std::numeric_limits<double>::infinity();
  r.lambda_max = 0.0;
  for (const HPoint& p : samples) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat4> es(g.g(p), model_metric(beta, p), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    r.lambda_min = std::min(r.lambda_min, lo);
    r.lambda_max = std::max(r.lambda_max, hi);
    r.sample_c.push_back(std::max(hi, 1.0 / lo));
    ++r.samples;
  }
  r.c = r.samples ? std::max(r.lambda_max, 1.0 / r.lambda_min) : 0.0;
  return r;
}

std::vector<HPoint> far_samples(double Z0, double R0, std::size_t n, std::uint64_t seed) {
  if (!(Z0 > 0.05) || !(R0 > 0.0)) throw DomainError("far_samples needs Z0 > 0.05 and R0 > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<HPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    double z, r;
    if (i % 2 == 0) {
      z = Z0 * std::pow(10.0, unit(rng));
      r = R0 * std::sqrt(unit(rng));
    } else {
      z = 0.05 * std::pow(Z0 / 0.05, unit(rng));
      r = R0 * std::pow(10.0, unit(rng));
    }
    pts.push_back(make_hpoint(z, r * std::cos(phi), r * std::sin(phi)));
  }
  return pts;
}

}  // namespace sfk
