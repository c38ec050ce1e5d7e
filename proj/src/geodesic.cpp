#include "sfk/geodesic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "sfk/errors.hpp"

namespace sfk {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 8>;

double energy_at(const Mat4& g, const std::array<double, 4>& p) {
  const Eigen::Vector4d q(p[0], p[1], p[2], p[3]);
  return q.dot(g.ldlt().solve(q));
}

HPoint position(const std::array<double, 4>& x) { return make_hpoint(x[1], x[2], x[3]); }

struct Hamiltonian {
  const MetricJetField* field;

  void operator()(const State& s, State& ds, double /*t*/) const {
    if (!(s[1] > 0.0)) throw DomainError("geodesic left z > 0");
    const MetricJet j = (*field)(make_hpoint(s[1], s[2], s[3]));
    const Eigen::Vector4d p(s[4], s[5], s[6], s[7]);
    const Eigen::Vector4d v = j.g.ldlt().solve(p);
    for (int a = 0; a < 4; ++a) {
      ds[a] = v[a];
      ds[4 + a] = 0.5 * v.dot(j.dg[a] * v);
    }
  }
};

// Moves charge strings away from the trajectory; returns the number of switches.
using Switcher = std::function<std::size_t(State&)>;

GeodesicReport integrate(const MetricJetField& g, GeodesicState initial, double L, const GeodesicOptions& o,
                         const Switcher& switcher) {
  if (!(L > 0.0)) throw DomainError("geodesic length must be positive");
  GeodesicReport rep;
  State s;
  for (int a = 0; a < 4; ++a) {
    s[a] = initial.x[a];
    s[4 + a] = initial.p[a];
  }
  std::size_t switches = switcher ? switcher(s) : 0;
  const auto energy_of = [&g](const State& st) {
    return energy_at(g(make_hpoint(st[1], st[2], st[3])).g, {st[4], st[5], st[6], st[7]});
  };
  rep.energy0 = energy_of(s);
  const auto snapshot = [&](const State& st, double t, double e) {
    GeodesicState out;
    for (int a = 0; a < 4; ++a) {
      out.x[a] = st[a];
      out.p[a] = st[4 + a];
    }
    out.length = initial.length + t;
    out.energy = e;
    return out;
  };
  if (o.record_every) rep.trajectory.push_back(snapshot(s, 0.0, rep.energy0));

  auto stepper = odeint::make_controlled(o.abs_tol, o.rel_tol, odeint::runge_kutta_dopri5<State>());
  Hamiltonian sys{&g};
  double t = 0.0, dt = std::min(o.initial_step, L);
  double e = rep.energy0;
  while (t < L) {
    if (dt < o.min_step) {
      rep.status = GeodesicStatus::step_underflow;
      break;
    }
    dt = std::min(dt, L - t);
    State trial = s;
    double tt = t;
    odeint::controlled_step_result res;
    try {
      res = stepper.try_step(sys, trial, tt, dt);
    } catch (const std::exception&) {
      // The trial stage left the chart (z <= 0 or a pole); shrink the step.
      stepper.reset();
      dt *= 0.25;
      ++rep.rejected;
      continue;
    }
    if (res == odeint::fail) {
      ++rep.rejected;
      continue;
    }
    s = trial;
    t = tt;
    ++rep.steps;
    if (switcher) {
      const std::size_t k = switcher(s);
      if (k) {
        switches += k;
        stepper.reset();
      }
    }
    e = energy_of(s);
    rep.max_drift = std::max(rep.max_drift, std::fabs(e - rep.energy0) / rep.energy0);
    if (o.record_every && rep.steps % o.record_every == 0) rep.trajectory.push_back(snapshot(s, t, e));
    if (s[1] < o.divisor_z) {
      rep.status = GeodesicStatus::hit_divisor;
      break;
    }
  }
  rep.gauge_switches = switches;
  rep.final_state = snapshot(s, t, e);
  if (o.record_every && (rep.trajectory.empty() || rep.trajectory.back().length != rep.final_state.length))
    rep.trajectory.push_back(rep.final_state);
  return rep;
}

}  // namespace

std::string to_string(GeodesicStatus s) {
  switch (s) {
    case GeodesicStatus::reached_length: return "reached_length";
    case GeodesicStatus::hit_divisor: return "hit_divisor";
    case GeodesicStatus::step_underflow: return "step_underflow";
  }
  return "unknown";
}

MetricJetField metric_jet_field(const MetricField& g) {
  return [&g](const HPoint& p) {
    const FieldJet f = g.connection().jet(p);
    return MetricJet{assemble_g(f, p), metric_derivatives(f, p)};
  };
}

GeodesicState normalised(const MetricJetField& g, GeodesicState s) {
  const double e = energy_at(g(position(s.x)).g, s.p);
  if (!(e > 0.0)) throw DomainError("geodesic covector must be nonzero");
  const double k = 1.0 / std::sqrt(e);
  for (double& v : s.p) v *= k;
  s.energy = 1.0;
  return s;
}

GeodesicReport geodesic_integrate(const MetricJetField& g, GeodesicState initial, double L,
                                  const GeodesicOptions& opts) {
  return integrate(g, initial, L, opts, {});
}

GeodesicReport geodesic_integrate(const MetricField& g, GeodesicState initial, double L,
                                  const GeodesicOptions& opts) {
  const ConnectionData& conn = g.connection();
  const auto& charges = conn.potential().charges();
  if (charges.empty()) return integrate(metric_jet_field(g), initial, L, opts, {});

  auto dirs = std::make_shared<std::vector<StringDirection>>();
  for (std::size_t i = 0; i < charges.size(); ++i) dirs->push_back(conn.string_direction(i));
  const MetricJetField field = [&conn, dirs](const HPoint& p) {
    const FieldJet f = conn.jet(p, *dirs);
    return MetricJet{assemble_g(f, p), metric_derivatives(f, p)};
  };
  const double twoK = charges.kappa() / (2.0 * std::numbers::pi);
  const Switcher switcher = [&charges, dirs, twoK, &opts](State& s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < charges.size(); ++i) {
      const HPoint& q = charges.points()[i];
      const double u = s[2] - q.x2, v = s[3] - q.x3;
      const double rho2 = u * u + v * v;
      if (rho2 >= opts.string_switch * opts.string_switch * q.z * q.z) continue;
      StringDirection& d = (*dirs)[i];
      const bool near_down = d == StringDirection::down && s[1] < q.z;
      const bool near_up = d == StringDirection::up && s[1] > q.z;
      if (!near_down && !near_up) continue;
      if (rho2 == 0.0) throw PoleError("geodesic runs along a Dirac string");
      // A_up = A_down + 2K dphi, theta_up = theta_down - 2K phi.
      const double sign = near_down ? 1.0 : -1.0;
      const double phi = std::atan2(v, u);
      s[0] -= sign * twoK * phi;
      s[6] += sign * twoK * s[4] * (-v / rho2);
      s[7] += sign * twoK * s[4] * (u / rho2);
      d = near_down ? StringDirection::up : StringDirection::down;
      ++n;
    }
    return n;
  };
  return integrate(field, initial, L, opts, switcher);
}

namespace {

// Covector of the unit vector n0 E0 + n_i E_i in the orthonormal frame
// E0 = (sqrt V / z) d_theta, E_i = (d_i - A_i d_theta) / sqrt V.
std::array<double, 4> frame_covector(const FieldJet& f, const HPoint& p, const Eigen::Vector4d& n) {
  const double sv = std::sqrt(f.V);
  Eigen::Vector4d w;
  w[0] = n[0] * sv / p.z;
  for (int i = 1; i < 4; ++i) {
    w[i] = n[i] / sv;
    w[0] -= f.A[i - 1] * n[i] / sv;
  }
  const Eigen::Vector4d q = assemble_g(f, p) * w;
  return {q[0], q[1], q[2], q[3]};
}

// |n0| below which a unit covector at p could reach z < zmin: the
// trajectory keeps z^2 >= V p_theta^2 >= V_min p_theta^2.
double theta_bound(const FieldJet& f, const HPoint& p, double zmin, double vmin) {
  return zmin * std::sqrt(f.V) / (p.z * std::sqrt(vmin));
}

struct ShotSampler {
  const MetricField& g;
  HPoint lo, hi;
  double zmin, vmin;
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  ShotSampler(const MetricField& g_, const HPoint& lo_, const HPoint& hi_, double zmin_, std::uint64_t seed)
      : g(g_), lo(lo_), hi(hi_), zmin(zmin_), vmin(g_.potential().harmonic().beta().min_inverse()), rng(seed) {
    if (!(zmin > 0.0) || !(lo.z > zmin)) throw DomainError("shots need 0 < zmin < lo.z");
  }

  double uniform(double a, double b) { return a + (b - a) * unit(rng); }

  // A start in the box with its field jet, away from poles.
  std::pair<GeodesicState, FieldJet> start(bool bottom) {
    for (;;) {
      GeodesicState s;
      s.x = {2.0 * std::numbers::pi * unit(rng), bottom ? lo.z : uniform(lo.z, hi.z), uniform(lo.x2, hi.x2),
             uniform(lo.x3, hi.x3)};
      try {
        return {s, g.connection().jet(position(s.x))};
      } catch (const PoleError&) {
      }
    }
  }
};

}  // namespace

std::vector<GeodesicState> random_shots(const MetricField& g, const HPoint& lo, const HPoint& hi, double zmin,
                                        std::size_t n, std::uint64_t seed) {
  ShotSampler S(g, lo, hi, zmin, seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<GeodesicState> shots;
  shots.reserve(n);
  while (shots.size() < n) {
    auto [s, f] = S.start(false);
    const HPoint p = position(s.x);
    const double need = theta_bound(f, p, zmin, S.vmin);
    if (need >= 1.0) continue;
    Eigen::Vector4d nrm;
    do {
      for (int a = 0; a < 4; ++a) nrm[a] = normal(S.rng);
      nrm.normalize();
    } while (std::fabs(nrm[0]) < need);
    s.p = frame_covector(f, p, nrm);
    s.energy = 1.0;
    shots.push_back(s);
  }
  return shots;
}

std::vector<GeodesicState> adversarial_shots(const MetricField& g, const HPoint& lo, const HPoint& hi, double zmin,
                                             std::size_t n, std::uint64_t seed) {
  ShotSampler S(g, lo, hi, zmin, seed);
  std::vector<GeodesicState> shots;
  shots.reserve(n);
  while (shots.size() < n) {
    const bool grazing = shots.size() % 2 == 0;
    auto [s, f] = S.start(grazing);
    const HPoint p = position(s.x);
    const double need = theta_bound(f, p, zmin, S.vmin);
    if (1.05 * need >= 0.99) continue;
    const double sign = S.unit(S.rng) < 0.5 ? -1.0 : 1.0;
    const double a = 2.0 * std::numbers::pi * S.unit(S.rng);
    Eigen::Vector4d nrm;
    if (grazing) {
      nrm[0] = sign * 1.05 * need;
      const double r = std::sqrt(1.0 - nrm[0] * nrm[0]);
      nrm[1] = -0.95 * r;
      nrm[2] = std::sqrt(1.0 - 0.95 * 0.95) * r * std::cos(a);
      nrm[3] = std::sqrt(1.0 - 0.95 * 0.95) * r * std::sin(a);
    } else {
      nrm[0] = sign * std::max(1.05 * need, 0.2);
      const double r = std::sqrt(1.0 - nrm[0] * nrm[0]);
      const double up = shots.size() % 4 == 1 ? 0.9 : 0.1;
      nrm[1] = up * r;
      nrm[2] = std::sqrt(1.0 - up * up) * r * std::cos(a);
      nrm[3] = std::sqrt(1.0 - up * up) * r * std::sin(a);
    }
    s.p = frame_covector(f, p, nrm);
    s.energy = 1.0;
    shots.push_back(s);
  }
  return shots;
}

std::array<double, 4> cone_geodesic(double c, const GeodesicState& start, double s) {
  if (!(c > 0.0)) throw DomainError("cone angle must be positive");
  const double sc = std::sqrt(c);
  const double z = start.x[1];
  // Velocity from p with g = diag(c z^2, 1/c, 1/c, 1/c).
  const double dtheta = start.p[0] / (c * z * z);
  const double dz = c * start.p[1], dx2 = c * start.p[2], dx3 = c * start.p[3];
  const double r = z / sc, phi = c * start.x[0];
  const double dr = dz / sc, dphi = c * dtheta;
  const double X = r * std::cos(phi), Y = r * std::sin(phi);
  const double vX = dr * std::cos(phi) - r * std::sin(phi) * dphi;
  const double vY = dr * std::sin(phi) + r * std::cos(phi) * dphi;
  const double X1 = X + s * vX, Y1 = Y + s * vY;
  const double swept = std::atan2(X * Y1 - Y * X1, X * X1 + Y * Y1);
  return {(phi + swept) / c, sc * std::hypot(X1, Y1), start.x[2] + s * dx2, start.x[3] + s * dx3};
}

}  // namespace sfk
