#include "sfk/connection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfk/dual.hpp"
#include "sfk/errors.hpp"
#include "sfk/quadrature.hpp"

namespace sfk {

namespace {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Two unit vectors completing n to a right-handed orthonormal frame.
std::pair<Vec3, Vec3> frame(const Vec3& n) {
  const Vec3 seed = std::fabs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = cross(n, seed);
  const double l = std::sqrt(dot3(e1, e1));
  for (double& x : e1) x /= l;
  return {e1, cross(n, e1)};
}

Vec3 unit(const Vec3& v) {
  const double l = std::sqrt(dot3(v, v));
  if (!(l > 0.0)) throw DomainError("zero normal vector");
  return {v[0] / l, v[1] / l, v[2] / l};
}

// F as an axial vector in (z, x2, x3): (F_23, F_3z, F_z2) = grad V / z.
Vec3 flux_density(const Potential& V, const HPoint& p) {
  const Vec3 g = V.gradient(p);
  return {g[0] / p.z, g[1] / p.z, g[2] / p.z};
}

}  // namespace

TwoForm3 curvature_form(const Potential& V, const HPoint& p) {
  for (const HPoint& q : V.charges().points())
    if (hyp_distance(p, q) < 1e-6) throw PoleError("curvature form evaluated at a charge");
  const Vec3 g = V.gradient(p);
  return hodge_star_h(OneForm3{g[0], g[1], g[2]}, p);
}

MonopoleJet monopole_potential(const HPoint& p, const HPoint& charge, double kappa, StringDirection dir) {
  const double c = charge.z;
  const double K = kappa / (4.0 * std::numbers::pi);
  const Dual3 z = Dual3::variable(p.z, 0);
  const Dual3 u = Dual3::variable(p.x2 - charge.x2, 1);
  const Dual3 v = Dual3::variable(p.x3 - charge.x3, 2);
  const Dual3 rho2 = u * u + v * v;
  const bool on_axis = rho2.v <= 1e-20 * c * c;
  const bool below = p.z < c;
  if (on_axis && (below == (dir == StringDirection::down) || p.z == c))
    throw PoleError("evaluation on the Dirac string of the charge at (" + std::to_string(charge.z) + ", " +
                    std::to_string(charge.x2) + ", " + std::to_string(charge.x3) + ")");
  MonopoleJet r;
  if (on_axis) return r;  // regular side of the axis: A vanishes to first order there
  const Dual3 zm = z - c, zp = z + c;
  const Dual3 P = sqrt((zm * zm + rho2) * (zp * zp + rho2));
  const Dual3 Q = z * z + rho2 - c * c;
  Dual3 f;
  double sign = 1.0;
  if (dir == StringDirection::down) {
    // (1 + S) / rho^2
    f = Q.v >= 0.0 ? 4.0 * c * c / (P * (P + Q)) : (P - Q) / (P * rho2);
  } else {
    // (1 - S) / rho^2; the up-string potential is A_down + 2K dphi = -K (S - 1) dphi
    f = Q.v <= 0.0 ? 4.0 * c * c / (P * (P - Q)) : (P + Q) / (P * rho2);
    sign = -1.0;
  }
  const Dual3 a2 = sign * K * f * v;
  const Dual3 a3 = -sign * K * f * u;
  r.a = {0.0, a2.v, a3.v};
  r.da[1] = a2.d;
  r.da[2] = a3.d;
  return r;
}

ConnectionData::ConnectionData(std::shared_ptr<const Potential> V, GaugeDescriptor gauge)
    : V_(std::move(V)), gauge_(std::move(gauge)) {
  if (!V_) throw DomainError("ConnectionData: missing potential");
  if (gauge_.strings.size() > V_->charges().size())
    throw ConfigError("more string directions than charges");
  if (gauge_.path_order == 0) throw ConfigError("path_order must be positive");
  if (gauge_.base_point) {
    if (!is_valid(*gauge_.base_point)) throw ConfigError("gauge base point must have z > 0");
    base_ = *gauge_.base_point;
  } else {
    double a = 0.0, b = 0.0;
    const auto& pts = V_->charges().points();
    for (const HPoint& q : pts) {
      a += q.x2;
      b += q.x3;
    }
    if (!pts.empty()) {
      a /= pts.size();
      b /= pts.size();
    }
    base_ = make_hpoint(1.0, a, b);
  }
}

StringDirection ConnectionData::string_direction(std::size_t charge) const {
  return charge < gauge_.strings.size() ? gauge_.strings[charge] : StringDirection::down;
}

Vec3 ConnectionData::homotopy_part(const HPoint& p) const {
  const HarmonicExtension& u = V_->harmonic();
  if (u.beta().is_constant()) return {0.0, 0.0, 0.0};
  const Vec3 X{p.z - base_.z, p.x2 - base_.x2, p.x3 - base_.x3};
  const GaussRule& g = gauss_legendre(gauge_.path_order);
  Vec3 acc{};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double t = 0.5 * (1.0 + g.nodes[k]);
    const HPoint q{base_.z + t * X[0], base_.x2 + t * X[1], base_.x3 + t * X[2]};
    const Vec3 du = u.gradient(q);
    const Vec3 f{du[0] / q.z, du[1] / q.z, du[2] / q.z};
    const Vec3 fx = cross(f, X);
    for (int i = 0; i < 3; ++i) acc[i] += 0.5 * g.weights[k] * t * fx[i];
  }
  return acc;
}

Vec3 ConnectionData::smooth_part(const HPoint& p) const {
  if (gauge_.gauge == Gauge::homotopy) return homotopy_part(p);
  return V_->harmonic().jet(p).a;
}

OneForm3 ConnectionData::A(const HPoint& p) const {
  Vec3 a = smooth_part(p);
  const auto& pts = V_->charges().points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const MonopoleJet m = monopole_potential(p, pts[i], V_->charges().kappa(), string_direction(i));
    for (int k = 0; k < 3; ++k) a[k] += m.a[k];
  }
  return {a[0], a[1], a[2]};
}

FieldJet ConnectionData::jet(const HPoint& p) const { return jet(p, {}); }

FieldJet ConnectionData::jet(const HPoint& p, std::span<const StringDirection> strings) const {
  const Potential::Jet pj = V_->jet(p);
  FieldJet j;
  j.V = pj.v;
  j.dV = pj.dv;
  if (gauge_.gauge == Gauge::coulomb) {
    j.A = pj.u.a;
    j.dA = pj.u.da;
  } else {
    j.A = homotopy_part(p);
    const double h = fd_step(p);
    for (int d = 0; d < 3; ++d) {
      Vec3 cp = p.coords(), cm = p.coords();
      cp[d] += h;
      cm[d] -= h;
      const Vec3 ap = homotopy_part(make_hpoint(cp)), am = homotopy_part(make_hpoint(cm));
      for (int i = 0; i < 3; ++i) j.dA[i][d] = (ap[i] - am[i]) / (2.0 * h);
    }
  }
  const auto& pts = V_->charges().points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const StringDirection dir = i < strings.size() ? strings[i] : string_direction(i);
    const MonopoleJet m = monopole_potential(p, pts[i], V_->charges().kappa(), dir);
    for (int k = 0; k < 3; ++k) {
      j.A[k] += m.a[k];
      for (int l = 0; l < 3; ++l) j.dA[k][l] += m.da[k][l];
    }
  }
  return j;
}

double flux_euclidean(const Potential& V, const Vec3& centre, double radius, unsigned n_lat, unsigned n_lon) {
  if (!(radius > 0.0) || !(centre[0] - radius > 0.0))
    throw DomainError("flux sphere must lie in z > 0");
  // Pole along x2 keeps the nodes off the vertical through the centre.
  const SphereRule rule = product_sphere_rule(n_lat, n_lon, 1);
  const double area = 4.0 * std::numbers::pi * radius * radius;
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Vec3& n = rule.points[i];
    const HPoint p = make_hpoint(centre[0] + radius * n[0], centre[1] + radius * n[1], centre[2] + radius * n[2]);
    const Vec3 f = flux_density(V, p);
    total -= rule.weights[i] * dot3(f, n);
  }
  return total * area;
}

double flux(const Potential& V, const HPoint& centre, double r, unsigned n_lat, unsigned n_lon) {
  if (!(r > 0.0)) throw DomainError("flux: radius must be positive");
  return flux_euclidean(V, {centre.z * std::cosh(r), centre.x2, centre.x3}, centre.z * std::sinh(r), n_lat, n_lon);
}

double loop_integral(const ConnectionData& A, const Vec3& centre, const Vec3& normal, double radius, unsigned n) {
  const Vec3 nn = unit(normal);
  const auto [e1, e2] = frame(nn);
  double total = 0.0;
  for (unsigned k = 0; k < n; ++k) {
    const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n;
    const double c = std::cos(phi), s = std::sin(phi);
    Vec3 x, t;
    for (int i = 0; i < 3; ++i) {
      x[i] = centre[i] + radius * (c * e1[i] + s * e2[i]);
      t[i] = radius * (-s * e1[i] + c * e2[i]);
    }
    total += dot3(A.A(make_hpoint(x)).components(), t);
  }
  return total * 2.0 * std::numbers::pi / n;
}

double disk_flux(const Potential& V, const Vec3& centre, const Vec3& normal, double radius, unsigned n_r,
                 unsigned n_phi) {
  const Vec3 nn = unit(normal);
  const auto [e1, e2] = frame(nn);
  const GaussRule& g = gauss_legendre(n_r);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = 0.5 * radius * (1.0 + g.nodes[i]);
    const double wr = 0.5 * radius * g.weights[i] * r;
    for (unsigned k = 0; k < n_phi; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_phi;
      Vec3 x;
      for (int d = 0; d < 3; ++d) x[d] = centre[d] + r * (std::cos(phi) * e1[d] + std::sin(phi) * e2[d]);
      total += wr * dot3(flux_density(V, make_hpoint(x)), nn);
    }
  }
  return total * 2.0 * std::numbers::pi / n_phi;
}

TwoForm3 fd_exterior_derivative(const std::function<Vec3(const HPoint&)>& a, const HPoint& p, double h) {
  if (!(p.z - h > 0.0)) throw EvaluationError("FD stencil crosses z = 0", p.z, p.x2, p.x3);
  std::array<Vec3, 3> d{};  // d[j][i] = d a_i / d x_j
  for (int j = 0; j < 3; ++j) {
    Vec3 cp = p.coords(), cm = p.coords();
    cp[j] += h;
    cm[j] -= h;
    const Vec3 ap = a(make_hpoint(cp)), am = a(make_hpoint(cm));
    for (int i = 0; i < 3; ++i) d[j][i] = (ap[i] - am[i]) / (2.0 * h);
  }
  // (da)_23 = d2 a3 - d3 a2, (da)_3z = d3 az - dz a3, (da)_z2 = dz a2 - d2 az
  return {d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]};
}

CurlCheck check_dA_equals_F(const ConnectionData& A, const HPoint& p, double h) {
  const Vec3 F = curvature_form(A.potential(), p).components();
  const auto a = [&A](const HPoint& q) { return A.A(q).components(); };
  const auto residual = [&](double step) {
    const Vec3 d = fd_exterior_derivative(a, p, step).components();
    double r = 0.0;
    for (int i = 0; i < 3; ++i) r = std::max(r, std::fabs(d[i] - F[i]));
    return r;
  };
  CurlCheck c;
  c.residual_h = residual(h);
  c.residual_h2 = residual(0.5 * h);
  c.order = std::log2(c.residual_h / c.residual_h2);
  return c;
}

DecayReport check_decay_dA(const HarmonicExtension& u, std::size_t n, double z_far, double r_far) {
  DecayReport rep;
  const auto q = [&u](const HPoint& p) {
    const Vec3 du = u.gradient(p);
    const double r2 = p.x2 * p.x2 + p.x3 * p.x3;
    return std::sqrt(dot3(du, du)) * ((p.z + 1.0) * (p.z + 1.0) + r2);
  };
  const auto sweep = [&](std::size_t m) {
    double sup = 0.0;
    const auto lad = [m](double lo, double hi, std::size_t i) { return lo * std::pow(hi / lo, double(i) / double(m - 1)); };
    const std::array<std::array<double, 2>, 4> feet{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}, {-3.0, 1.0}}};
    for (const auto& f : feet)
      for (std::size_t i = 0; i < m; ++i) sup = std::max(sup, q(make_hpoint(lad(1.0, z_far, i), f[0], f[1])));
    for (double z : {0.1, 1.0})
      for (int k = 0; k < 8; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / 8.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double r = lad(1.0, r_far, i);
          sup = std::max(sup, q(make_hpoint(z, r * std::cos(phi), r * std::sin(phi))));
        }
      }
    rep.samples += m * (4 + 16);
    return sup;
  };
  rep.constant = sweep(n);
  rep.constant_doubled = sweep(2 * n);
  rep.stability = rep.constant > 0.0 ? std::fabs(rep.constant_doubled - rep.constant) / rep.constant : 0.0;
  const HPoint bottom = make_hpoint(1.0, 1.0, 0.0), top = make_hpoint(z_far, 1.0, 0.0);
  const auto zdu = [&u](const HPoint& p) {
    const Vec3 du = u.gradient(p);
    return p.z * std::sqrt(dot3(du, du));
  };
  rep.vertical_first = zdu(bottom);
  rep.vertical_last = zdu(top);
  return rep;
}

}  // namespace sfk
