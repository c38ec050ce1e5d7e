#include "sfk/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfk/dual.hpp"
#include "sfk/errors.hpp"

namespace sfk {

namespace {

constexpr double kPoleDistance = 1e-6;

template <class T>
T green_closed_form(const T& z, const T& x2, const T& x3, const HPoint& q, double k) {
  using std::sqrt;
  const double c = q.z;
  const T dz = z - c, d2 = x2 - q.x2, d3 = x3 - q.x3;
  const T delta = dz * dz + d2 * d2 + d3 * d3;
  const T m = sqrt(delta * (delta + 4.0 * c * z));
  return k * 4.0 * c * c * z * z / (m * (2.0 * c * z + delta + m));
}

void check_pole(const HPoint& p, const HPoint& q) {
  if (hyp_distance(p, q) < kPoleDistance)
    throw PoleError("evaluation at charge point (" + std::to_string(q.z) + ", " + std::to_string(q.x2) +
                    ", " + std::to_string(q.x3) + ")");
}

}  // namespace

ChargeConfig::ChargeConfig(std::vector<HPoint> points, double kappa) : points_(std::move(points)), kappa_(kappa) {
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw ConfigError("kappa must be positive and finite");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!is_valid(points_[i])) throw ConfigError("charge " + std::to_string(i) + " must have z > 0 and finite coordinates");
    for (std::size_t j = 0; j < i; ++j) {
      if (points_[i] == points_[j] || hyp_distance(points_[i], points_[j]) < kPoleDistance)
        throw ConfigError("charges " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      if (points_[i].x2 == points_[j].x2 && points_[i].x3 == points_[j].x3) shared_vertical_ = true;
    }
  }
}

double green(const HPoint& p, const HPoint& q, double kappa) {
  check_pole(p, q);
  return green_closed_form(p.z, p.x2, p.x3, q, kappa / (4.0 * std::numbers::pi));
}

ScalarJet green_jet(const HPoint& p, const HPoint& q, double kappa) {
  check_pole(p, q);
  const Dual3 z = Dual3::variable(p.z, 0), x2 = Dual3::variable(p.x2, 1), x3 = Dual3::variable(p.x3, 2);
  const Dual3 g = green_closed_form(z, x2, x3, q, kappa / (4.0 * std::numbers::pi));
  return {g.v, g.d};
}

Potential::Potential(std::shared_ptr<const HarmonicExtension> u, ChargeConfig charges)
    : u_(std::move(u)), charges_(std::move(charges)) {
  if (!u_) throw DomainError("Potential: missing harmonic extension");
}

Potential::Jet Potential::jet(const HPoint& p) const {
  Jet j;
  for (const HPoint& q : charges_.points()) {
    const ScalarJet g = green_jet(p, q, charges_.kappa());
    j.v += g.value;
    for (int i = 0; i < 3; ++i) j.dv[i] += g.grad[i];
  }
  j.u = u_->jet(p);
  j.v += j.u.u;
  for (int i = 0; i < 3; ++i) j.dv[i] += j.u.du[i];
  return j;
}

double Potential::green_part(const HPoint& p) const {
  double s = 0.0;
  for (const HPoint& q : charges_.points()) s += green(p, q, charges_.kappa());
  return s;
}

ScalarField Potential::field() const {
  auto self = std::make_shared<const Potential>(*this);
  return {[self](const HPoint& p) { return self->value(p); },
          [self](const HPoint& p) { return self->gradient(p); }};
}

Potential assemble_V(const ConeAngleSpec& beta, const ChargeConfig& charges, const PoissonOptions& opts) {
  return Potential(std::make_shared<const HarmonicExtension>(beta, opts), charges);
}

DecayFit check_decay_z2(const ChargeConfig& charges, double x2, double x3, double z_max, double z_min,
                        std::size_t n) {
  DecayFit fit;
  if (charges.empty()) {
    fit.vacuous = true;
    fit.exponent = 2.0;
    return fit;
  }
  if (!(z_max > z_min) || !(z_min > 0.0) || n < 3) throw DomainError("check_decay_z2: bad sample ladder");
  for (const HPoint& q : charges.points())
    if (std::hypot(x2 - q.x2, x3 - q.x3) < 1e-9 * std::max(1.0, q.z))
      throw DomainError("check_decay_z2: descent runs along the vertical line of a charge");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = z_max * std::pow(z_min / z_max, double(i) / double(n - 1));
    double g = 0.0;
    for (const HPoint& q : charges.points()) g += green(make_hpoint(z, x2, x3), q, charges.kappa());
    lx[i] = std::log(z);
    ly[i] = std::log(g);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  for (std::size_t i = 0; i < n; ++i)
    fit.max_residual = std::max(fit.max_residual, std::fabs(ly[i] - (intercept + fit.exponent * lx[i])));
  fit.samples = n;
  return fit;
}

}  // namespace sfk
