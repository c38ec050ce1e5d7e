#include "sfk/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "sfk/errors.hpp"
#include "sfk/quadrature.hpp"
#include "sfk/simd/kernels.hpp"

namespace sfk {

namespace {

struct Panel {
  double a, b;
};

// Polar panels in psi, the angle from the nearest boundary point: geometric
// near psi = 0 to resolve the kernel scale eps, uniform beyond the data scale.
std::vector<Panel> polar_panels(double eps, const PoissonOptions& o) {
  const double L = o.angular_scale;
  const double pi = std::numbers::pi;
  std::vector<Panel> panels;
  double a = 0.5 * std::min(eps, L);
  panels.push_back({0.0, a});
  while (a < L) {
    const double b = std::min(2.0 * a, L);
    panels.push_back({a, b});
    a = b;
  }
  const auto n = static_cast<unsigned>(std::ceil((pi - a) / L));
  const double step = (pi - a) / n;
  for (unsigned k = 0; k < n; ++k) panels.push_back({a + k * step, k + 1 == n ? pi : a + (k + 1) * step});
  return panels;
}

unsigned angular_count(double psi, const PoissonOptions& o) {
  const double n = o.min_angular + o.angular_density * std::sin(psi) / o.angular_scale;
  return 8u * static_cast<unsigned>(std::ceil(n / 8.0));
}

struct Trig {
  std::vector<double> c, s;
};

const Trig& trig_table(unsigned n) {
  thread_local std::map<unsigned, Trig> cache;
  auto [it, fresh] = cache.try_emplace(n);
  if (fresh) {
    it->second.c.resize(n);
    it->second.s.resize(n);
    for (unsigned j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + 0.5) / n;
      it->second.c[j] = std::cos(th);
      it->second.s[j] = std::sin(th);
    }
  }
  return it->second;
}

void validate_options(const PoissonOptions& o) {
  if (!(o.angular_scale > 0.0) || !(o.angular_scale <= 1.0) || o.gauss_order == 0 ||
      !(o.angular_density >= 0.0) || o.min_angular < 8)
    throw DomainError("invalid Poisson quadrature options");
}

// Ball image of p with the quantities that lose precision near the sphere
// computed from the half-space side.
struct BallFrame {
  Vec3 y{};
  double m = 0.0;        // 1 - |y|^2
  double eps = 0.0;      // 1 - |y|
  Vec3 xi0{};            // nearest boundary point y / |y|
  double one_minus_xi01 = 0.0;
  Vec3 a{}, b{};         // orthonormal complement of xi0
  std::array<std::array<double, 3>, 3> J{};  // J[j][i] = d y_j / d p_i
  double q[3]{}, q2 = 0.0;
};

Vec3 cross(const Vec3& u, const Vec3& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

BallFrame make_frame(const HPoint& p) {
  BallFrame f;
  f.q[0] = p.z + 1.0;
  f.q[1] = p.x2;
  f.q[2] = p.x3;
  f.q2 = f.q[0] * f.q[0] + p.x2 * p.x2 + p.x3 * p.x3;
  const double r2 = p.x2 * p.x2 + p.x3 * p.x3;
  f.y = {(p.z * p.z + r2 - 1.0) / f.q2, 2.0 * p.x2 / f.q2, 2.0 * p.x3 / f.q2};
  f.m = 4.0 * p.z / f.q2;
  const double ny = std::sqrt(f.y[0] * f.y[0] + f.y[1] * f.y[1] + f.y[2] * f.y[2]);
  f.eps = f.m / (1.0 + ny);
  if (ny < 1e-12) {
    f.xi0 = {1.0, 0.0, 0.0};
    f.one_minus_xi01 = 0.0;
  } else {
    f.xi0 = {f.y[0] / ny, f.y[1] / ny, f.y[2] / ny};
    f.one_minus_xi01 = f.y[0] > 0.0 ? (f.y[1] * f.y[1] + f.y[2] * f.y[2]) / (ny * (ny + f.y[0])) : 1.0 - f.xi0[0];
  }
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::fabs(f.xi0[i]) < std::fabs(f.xi0[k])) k = i;
  Vec3 axis{};
  axis[k] = 1.0;
  f.a = cross(f.xi0, axis);
  const double na = std::sqrt(f.a[0] * f.a[0] + f.a[1] * f.a[1] + f.a[2] * f.a[2]);
  for (double& x : f.a) x /= na;
  f.b = cross(f.xi0, f.a);

  constexpr double R[3] = {1.0, -1.0, -1.0};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i)
      f.J[j][i] = -2.0 * R[j] * ((i == j ? 1.0 : 0.0) - 2.0 * f.q[i] * f.q[j] / f.q2) / f.q2;
  return f;
}

// d^2 y_j / d p_i d p_k.
double hessian(const BallFrame& f, std::size_t j, std::size_t i, std::size_t k) {
  constexpr double R[3] = {1.0, -1.0, -1.0};
  auto d = [](std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; };
  const double q4 = f.q2 * f.q2;
  const double t = -2.0 * (d(j, i) * f.q[k] + d(j, k) * f.q[i] + d(i, k) * f.q[j]) / q4 +
                   8.0 * f.q[i] * f.q[j] * f.q[k] / (q4 * f.q2);
  return -2.0 * R[j] * t;
}

}  // namespace

PoissonOptions PoissonOptions::refined() const {
  PoissonOptions r = *this;
  r.angular_scale = 0.75 * angular_scale;
  r.gauss_order = gauss_order + gauss_order / 2;
  r.angular_density = 1.5 * angular_density;
  r.min_angular = min_angular + min_angular / 2;
  return r;
}

double poisson_weight(const BallPoint& y, const Vec3& xi) {
  const double d0 = y.y1 - xi[0], d1 = y.y2 - xi[1], d2 = y.y3 - xi[2];
  const double k = (1.0 - y.norm2()) / (d0 * d0 + d1 * d1 + d2 * d2);
  return k * k;
}

HarmonicExtension::HarmonicExtension(ConeAngleSpec beta, PoissonOptions opts)
    : beta_(std::move(beta)), opts_(opts) {
  validate_options(opts_);
}

HarmonicJet HarmonicExtension::jet(const HPoint& p, const PoissonOptions& o) const {
  if (!is_valid(p)) throw DomainError("HarmonicExtension: invalid point");
  HarmonicJet j;
  const double finf = beta_.inverse_at_infinity();
  j.u = finf;
  if (beta_.is_constant()) return j;
  validate_options(o);

  const BallFrame f = make_frame(p);
  // Subtracting the data at xi0 removes the bulk of the kernel mass near the
  // sphere; constants contribute nothing to du or A.
  const double g0 = f.one_minus_xi01 > 0.0
                        ? beta_.inverse(f.xi0[1] / f.one_minus_xi01, f.xi0[2] / f.one_minus_xi01) - finf
                        : 0.0;
  const GaussRule& g = gauss_legendre(o.gauss_order);

  thread_local std::vector<double> e1, e2, e3, t2, t3, q, gv;
  simd::RawSums total{};
  for (const Panel& pan : polar_panels(f.eps, o)) {
    const double half = 0.5 * (pan.b - pan.a), mid = 0.5 * (pan.b + pan.a);
    e1.clear();
    e2.clear();
    e3.clear();
    t2.clear();
    t3.clear();
    q.clear();
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double psi = mid + half * g.nodes[k];
      const double sp = std::sin(psi), sh = std::sin(0.5 * psi);
      const double vers = 2.0 * sh * sh;  // 1 - cos psi
      const double cp = 1.0 - vers;
      const unsigned n = angular_count(psi, o);
      const Trig& tr = trig_table(n);
      // Gauss weight * sin psi * trapezoid weight 2 pi / n * normalisation 1 / 4 pi.
      const double wk = g.weights[k] * half * sp / (2.0 * n);
      const double radial = vers - f.eps;
      const double base1 = f.one_minus_xi01 + vers * f.xi0[0];
      for (unsigned m = 0; m < n; ++m) {
        Vec3 up;
        for (std::size_t c = 0; c < 3; ++c) up[c] = tr.c[m] * f.a[c] + tr.s[m] * f.b[c];
        e1.push_back(radial * f.xi0[0] - sp * up[0]);
        e2.push_back(radial * f.xi0[1] - sp * up[1]);
        e3.push_back(radial * f.xi0[2] - sp * up[2]);
        const double den = base1 - sp * up[0];  // 1 - xi_1
        if (den > 0.0) {
          t2.push_back((cp * f.xi0[1] + sp * up[1]) / den);
          t3.push_back((cp * f.xi0[2] + sp * up[2]) / den);
          q.push_back(wk);
        } else {
          t2.push_back(0.0);
          t3.push_back(0.0);
          q.push_back(-wk);  // marks the point at infinity, where g = 0
        }
      }
    }
    gv.resize(q.size());
    beta_.inverse_batch(t2, t3, gv);
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = q[i] > 0.0 ? q[i] * (gv[i] - finf - g0) : -q[i] * (-g0);
    const simd::RawSums part = simd::poisson_sums(e1, e2, e3, q);
    for (std::size_t i = 0; i < part.size(); ++i) total[i] += part[i];
  }

  using namespace simd;
  const Vec3& y = f.y;
  const double m = f.m;
  const double s0 = total[kSumInvE2];
  const Vec3 se2{total[kSumE1InvE2], total[kSumE2InvE2], total[kSumE3InvE2]};
  const Vec3 se3{total[kSumE1InvE3], total[kSumE2InvE3], total[kSumE3InvE3]};
  const double U[3][3] = {{total[kSumE11InvE3], total[kSumE12InvE3], total[kSumE13InvE3]},
                          {total[kSumE12InvE3], total[kSumE22InvE3], total[kSumE23InvE3]},
                          {total[kSumE13InvE3], total[kSumE23InvE3], total[kSumE33InvE3]}};

  j.u = finf + g0 + m * m * s0;
  Vec3 grad_y, sxi;
  for (std::size_t c = 0; c < 3; ++c) {
    grad_y[c] = -4.0 * m * y[c] * s0 - 4.0 * m * m * se3[c];
    sxi[c] = y[c] * s0 - se2[c];
  }
  const Vec3 sx = cross(sxi, y);
  const Vec3 ay{4.0 * sx[0], 4.0 * sx[1], 4.0 * sx[2]};
  double T[3][3];
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t l = 0; l < 3; ++l) T[a][l] = y[a] * se3[l] - U[a][l];
  auto levi = [](std::size_t i, std::size_t k, std::size_t l) {
    return static_cast<double>((static_cast<int>(k) - static_cast<int>(i)) * (static_cast<int>(l) - static_cast<int>(i)) *
                               (static_cast<int>(l) - static_cast<int>(k))) / 2.0;
  };
  double day[3][3] = {};  // day[i][l] = d A_i / d y_l
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t l = 0; l < 3; ++l) {
      double v = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        v += 4.0 * levi(i, a, l) * sxi[a];
        for (std::size_t k = 0; k < 3; ++k) v -= 16.0 * levi(i, a, k) * y[k] * T[a][l];
      }
      day[i][l] = v;
    }

  for (std::size_t i = 0; i < 3; ++i) {
    double du = 0.0, a = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      du += grad_y[c] * f.J[c][i];
      a += ay[c] * f.J[c][i];
    }
    j.du[i] = du;
    j.a[i] = a;
    for (std::size_t k = 0; k < 3; ++k) {
      double v = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        v += ay[c] * hessian(f, c, i, k);
        for (std::size_t l = 0; l < 3; ++l) v += day[c][l] * f.J[l][k] * f.J[c][i];
      }
      j.da[i][k] = v;
    }
  }
  return j;
}

double HarmonicExtension::checked_value(const HPoint& p, double tol) const {
  const double a = jet(p, opts_).u;
  if (beta_.is_constant()) return a;
  const double b = jet(p, opts_.refined()).u;
  const double err = std::fabs(a - b);
  if (!(err <= tol)) throw QuadratureError("u_beta quadrature did not converge", err);
  return a;
}

std::size_t HarmonicExtension::node_count(const HPoint& p) const {
  if (beta_.is_constant()) return 0;
  const BallFrame f = make_frame(p);
  const GaussRule& g = gauss_legendre(opts_.gauss_order);
  std::size_t n = 0;
  for (const Panel& pan : polar_panels(f.eps, opts_)) {
    const double half = 0.5 * (pan.b - pan.a), mid = 0.5 * (pan.b + pan.a);
    for (double x : g.nodes) n += angular_count(mid + half * x, opts_);
  }
  return n;
}

ScalarField HarmonicExtension::field() const {
  auto self = std::make_shared<const HarmonicExtension>(*this);
  return {[self](const HPoint& p) { return self->value(p); },
          [self](const HPoint& p) { return self->gradient(p); }};
}

double solve_u_beta(const ConeAngleSpec& beta, const HPoint& p, const PoissonOptions& opts) {
  return HarmonicExtension(beta, opts).value(p);
}

std::vector<HPoint> collar_samples(double eps, double radius, std::size_t n, std::uint64_t seed) {
  if (!(eps > 0.0) || !(radius > 0.0)) throw DomainError("collar_samples: eps and radius must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<HPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    // Every tenth sample sits on the closing face z = eps; the rest are
    // spread log-uniformly down to eps / 1000.
    const double z = (i % 10 == 0) ? eps : eps * std::pow(1e-3, unit(rng));
    pts.push_back(make_hpoint(z, r * std::cos(phi), r * std::sin(phi)));
  }
  return pts;
}

double barrier_constant(const ConeAngleSpec& beta, double eps, const std::vector<HPoint>& validation) {
  if (!(eps > 0.0)) throw DomainError("barrier_constant: eps must be positive");
  const double osc = beta.max_inverse() - beta.min_inverse();
  double C = osc > 0.0 ? 1.001 * osc / eps : 1.0;
  const ScalarField binv{[&beta](const HPoint& p) { return beta.inverse(p.x2, p.x3); }, {}};
  std::vector<double> lap(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i) lap[i] = laplacian_h(binv, validation[i]);
  for (int round = 0; round <= 60; ++round, C *= 2.0) {
    bool ok = true;
    for (std::size_t i = 0; i < validation.size() && ok; ++i) {
      const double cz = C * validation[i].z;
      ok = lap[i] + cz >= 0.0 && lap[i] - cz <= 0.0;
    }
    if (ok) return C;
  }
  const HPoint& p = validation.front();
  throw EvaluationError("barrier constant could not be certified", p.z, p.x2, p.x3);
}

BarrierReport check_barriers(const HarmonicExtension& u, double C, double eps,
                             const std::vector<HPoint>& samples) {
  BarrierReport r;
  r.min_margin = std::numeric_limits<double>::infinity();
  for (const HPoint& p : samples) {
    if (p.z > eps) continue;
    ++r.samples;
    const double b = u.beta().inverse(p.x2, p.x3);
    const double dev = u.value(p) - b;
    const double margin = C * p.z - std::fabs(dev);
    r.min_margin = std::min(r.min_margin, margin);
    r.v_sup = std::max(r.v_sup, std::fabs(dev) / p.z);
    if (margin < 0.0) {
      ++r.violations;
      r.violating.push_back(p);
    }
  }
  if (r.samples == 0) r.min_margin = 0.0;
  return r;
}

MaxPrincipleReport check_max_principle(const HarmonicExtension& u, const std::vector<HPoint>& samples,
                                       double tol) {
  MaxPrincipleReport r;
  r.lower = u.beta().min_inverse();
  r.upper = u.beta().max_inverse();
  r.min_value = std::numeric_limits<double>::infinity();
  r.max_value = -std::numeric_limits<double>::infinity();
  for (const HPoint& p : samples) {
    const double v = u.value(p);
    ++r.samples;
    r.min_value = std::min(r.min_value, v);
    r.max_value = std::max(r.max_value, v);
    if (!(v >= r.lower - tol && v <= r.upper + tol)) ++r.violations;
  }
  return r;
}

HarmonicityReport harmonicity_order(const ScalarField& f, const HPoint& p, double h) {
  HarmonicityReport r;
  r.residual_h = std::fabs(laplacian_h(f, p, h));
  r.residual_h2 = std::fabs(laplacian_h(f, p, 0.5 * h));
  r.order = std::log2(r.residual_h / r.residual_h2);
  return r;
}

}  // namespace sfk
