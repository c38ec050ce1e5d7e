#include "sfk/cone_angle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "sfk/errors.hpp"

namespace sfk {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec3 lonlat_to_sphere(double lon, double lat) {
  return {std::sin(lat), std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon)};
}

}  // namespace

LonLatGrid LonLatGrid::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, body;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    body += line;
    body += '\n';
  }
  std::istringstream tok(body);
  std::string magic;
  int version = 0;
  if (!(tok >> magic >> version) || magic != "sfk-lonlat-grid" || version != 1)
    throw ConfigError("lon-lat grid: expected header 'sfk-lonlat-grid 1'");
  LonLatGrid g;
  if (!(tok >> g.n_lon >> g.n_lat) || g.n_lon < 4 || g.n_lat < 3)
    throw ConfigError("lon-lat grid: need n_lon >= 4 and n_lat >= 3");
  const std::size_t count = std::size_t(g.n_lon) * g.n_lat;
  g.values.reserve(count);
  double v = 0.0;
  while (g.values.size() < count && tok >> v) g.values.push_back(v);
  if (g.values.size() != count)
    throw ConfigError("lon-lat grid: expected " + std::to_string(count) + " values, got " +
                      std::to_string(g.values.size()));
  std::string extra;
  if (tok >> extra) throw ConfigError("lon-lat grid: trailing data after values");
  for (double b : g.values)
    if (!std::isfinite(b)) throw ConfigError("lon-lat grid: non-finite value");
  // Both pole rows are single points of the sphere.
  for (unsigned row : {0u, g.n_lat - 1}) {
    for (unsigned j = 1; j < g.n_lon; ++j)
      if (std::fabs(g.at(row, j) - g.at(row, 0)) > 1e-12 * std::fabs(g.at(row, 0)))
        throw ConfigError("lon-lat grid: pole row " + std::to_string(row) + " is not constant");
  }
  return g;
}

LonLatGrid LonLatGrid::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open lon-lat grid file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

double LonLatGrid::sample(const Vec3& xi) const {
  const double lat = std::asin(std::clamp(xi[0], -1.0, 1.0));
  const double lon = std::atan2(xi[2], xi[1]);
  const double fi = (lat / kDeg + 90.0) / 180.0 * (n_lat - 1);
  const double fj = (lon / kDeg + 180.0) / 360.0 * n_lon;
  const unsigned i0 = std::min<unsigned>(static_cast<unsigned>(std::floor(fi)), n_lat - 2);
  const double ti = std::clamp(fi - i0, 0.0, 1.0);
  const double jf = std::floor(fj);
  const double tj = fj - jf;
  const unsigned j0 = static_cast<unsigned>(static_cast<long>(jf) % static_cast<long>(n_lon));
  const unsigned j1 = (j0 + 1) % n_lon;
  const double a = (1 - tj) * at(i0, j0) + tj * at(i0, j1);
  const double b = (1 - tj) * at(i0 + 1, j0) + tj * at(i0 + 1, j1);
  return (1 - ti) * a + ti * b;
}

ConeAngleSpec ConeAngleSpec::constant(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("cone angle must be positive and finite");
  ConeAngleSpec s;
  s.kind_ = Kind::constant;
  s.beta_inf_ = beta;
  s.min_inv_ = s.max_inv_ = 1.0 / beta;
  s.min_sampled_beta_ = beta;
  return s;
}

ConeAngleSpec ConeAngleSpec::from_expression(const std::string& expr, double beta_at_infinity,
                                             std::optional<double> constant_outside) {
  if (!(beta_at_infinity > 0.0) || !std::isfinite(beta_at_infinity))
    throw ConfigError("beta at infinity must be positive and finite");
  if (constant_outside && !(*constant_outside > 0.0))
    throw ConfigError("constant_outside radius must be positive");
  ConeAngleSpec s;
  s.beta_inf_ = beta_at_infinity;
  s.constant_outside_ = constant_outside;
  auto compiled = std::make_shared<const Expression>(Expression::compile(expr));
  if (compiled->is_constant() && !constant_outside) {
    const double b = (*compiled)(0.0, 0.0);
    if (std::fabs(b - beta_at_infinity) <= 1e-15 * std::fabs(b)) return constant(b);
  }
  s.kind_ = Kind::expression;
  s.expr_ = std::move(compiled);
  s.compute_statistics();
  return s;
}

ConeAngleSpec ConeAngleSpec::from_grid(LonLatGrid grid) {
  ConeAngleSpec s;
  s.kind_ = Kind::grid;
  s.beta_inf_ = grid.at(grid.n_lat - 1, 0);
  if (!(s.beta_inf_ > 0.0)) throw ConfigError("lon-lat grid: beta at infinity must be positive");
  s.grid_ = std::make_shared<const LonLatGrid>(std::move(grid));
  s.compute_statistics();
  return s;
}

double ConeAngleSpec::beta(double x2, double x3) const {
  switch (kind_) {
    case Kind::constant:
      return beta_inf_;
    case Kind::expression:
      if (constant_outside_ && x2 * x2 + x3 * x3 > *constant_outside_ * *constant_outside_)
        return beta_inf_;
      return (*expr_)(x2, x3);
    case Kind::grid:
      return grid_->sample(boundary_to_sphere(PlanePoint{x2, x3}));
  }
  return beta_inf_;
}

double ConeAngleSpec::beta(const BoundaryPoint& b) const {
  if (std::holds_alternative<AtInfinity>(b)) return beta_inf_;
  const auto& q = std::get<PlanePoint>(b);
  return beta(q.x2, q.x3);
}

void ConeAngleSpec::inverse_batch(std::span<const double> x2, std::span<const double> x3,
                                  std::span<double> out) const {
  switch (kind_) {
    case Kind::constant:
      std::fill(out.begin(), out.end(), 1.0 / beta_inf_);
      return;
    case Kind::expression:
      expr_->evaluate(x2, x3, out);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (constant_outside_ && x2[i] * x2[i] + x3[i] * x3[i] > *constant_outside_ * *constant_outside_)
          out[i] = beta_inf_;
        out[i] = 1.0 / out[i];
      }
      return;
    case Kind::grid:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / beta(x2[i], x3[i]);
      return;
  }
}

std::string ConeAngleSpec::description() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::constant:
      os << "constant " << beta_inf_;
      break;
    case Kind::expression:
      os << "expression '" << expr_->source() << "', beta(inf)=" << beta_inf_;
      if (constant_outside_) os << ", constant outside r=" << *constant_outside_;
      break;
    case Kind::grid:
      os << "lon-lat grid " << grid_->n_lon << "x" << grid_->n_lat << ", beta(inf)=" << beta_inf_;
      break;
  }
  return os.str();
}

void ConeAngleSpec::compute_statistics() {
  constexpr unsigned n_lat = 361, n_lon = 720;
  std::vector<double> inv(std::size_t(n_lat) * n_lon);
  std::vector<Vec3> pts(inv.size());
  std::vector<double> px2, px3, pout;
  px2.reserve(inv.size());
  px3.reserve(inv.size());
  std::vector<std::size_t> plane_index;
  plane_index.reserve(inv.size());
  for (unsigned i = 0; i < n_lat; ++i) {
    const double lat = (-90.0 + 180.0 * i / (n_lat - 1)) * kDeg;
    for (unsigned j = 0; j < n_lon; ++j) {
      const double lon = (-180.0 + 360.0 * j / n_lon) * kDeg;
      const std::size_t k = std::size_t(i) * n_lon + j;
      pts[k] = lonlat_to_sphere(lon, lat);
      if (i == n_lat - 1) {
        inv[k] = 1.0 / beta_inf_;
        continue;
      }
      const auto b = std::get<PlanePoint>(sphere_to_boundary(i == 0 ? Vec3{-1.0, 0.0, 0.0} : pts[k]));
      px2.push_back(b.x2);
      px3.push_back(b.x3);
      plane_index.push_back(k);
    }
  }
  pout.resize(px2.size());
  inverse_batch(px2, px3, pout);
  min_sampled_beta_ = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < plane_index.size(); ++m) {
    inv[plane_index[m]] = pout[m];
    // A non-positive or non-finite beta shows up as a non-positive/NaN inverse.
    const double b = 1.0 / pout[m];
    if (!(b > 0.0) || !std::isfinite(b)) min_sampled_beta_ = std::min(min_sampled_beta_, -1.0);
    else min_sampled_beta_ = std::min(min_sampled_beta_, b);
  }
  min_sampled_beta_ = std::min(min_sampled_beta_, beta_inf_);
  min_inv_ = *std::min_element(inv.begin(), inv.end());
  max_inv_ = *std::max_element(inv.begin(), inv.end());
  max_quotient_ = 0.0;
  const auto quotient = [&](std::size_t a, std::size_t b) {
    const double dx = pts[a][0] - pts[b][0], dy = pts[a][1] - pts[b][1], dz = pts[a][2] - pts[b][2];
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (d < 1e-12) return;
    max_quotient_ = std::max(max_quotient_, std::fabs(inv[a] - inv[b]) / d);
  };
  for (unsigned i = 0; i < n_lat; ++i)
    for (unsigned j = 0; j < n_lon; ++j) {
      const std::size_t k = std::size_t(i) * n_lon + j;
      quotient(k, std::size_t(i) * n_lon + (j + 1) % n_lon);
      if (i + 1 < n_lat) quotient(k, std::size_t(i + 1) * n_lon + j);
    }
  if (!std::isfinite(max_quotient_)) max_quotient_ = std::numeric_limits<double>::infinity();
}

void ConeAngleSpec::validate(double quotient_bound) const {
  if (!(min_sampled_beta_ > 0.0) || !(min_inv_ > 0.0) || !std::isfinite(max_inv_))
    throw ConfigError("beta must be positive everywhere on C u {infinity} (" + description() + ")");
  if (!(max_quotient_ <= quotient_bound))
    throw ConfigError("beta^{-1} difference quotient " + std::to_string(max_quotient_) +
                      " exceeds the declared bound " + std::to_string(quotient_bound));
}

}  // namespace sfk
