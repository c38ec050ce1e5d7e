#pragma once

// Scenario files: one JSON document per scenario, parsed strictly (unknown
// keys are errors, beta and the charge list must always be given). The
// format is described in docs/config_schema.md.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfk/connection.hpp"
#include "sfk/curvature.hpp"
#include "sfk/errors.hpp"
#include "sfk/geodesic.hpp"

namespace sfk {

// All violations found in one document.
class SchemaError : public ConfigError {
 public:
  explicit SchemaError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct BetaSource {
  enum class Kind { constant, expression, grid };
  Kind kind = Kind::constant;
  double constant = 1.0;
  std::string expression;
  double at_infinity = 1.0;
  std::optional<double> constant_outside;
  std::filesystem::path grid_file;  // resolved against the config's directory
  double holder_exponent = 1.0;
  double quotient_bound = 100.0;

  ConeAngleSpec build() const;
};

struct GridSpec {
  std::string name;
  GridBox box;
  double h = 0.02;
};

struct ProbePoint {
  double x2 = 0.0, x3 = 0.0;
};

struct StokesDisk {
  Vec3 centre{};
  Vec3 normal{};
  double radius = 0.2;
};

struct GeodesicSpec {
  std::size_t random = 0;       // shots from random_shots
  std::size_t adversarial = 0;  // grazing the divisor or heading outward
  double length = 100.0;
  HPoint lo = make_hpoint(0.5, -1.0, -1.0);
  HPoint hi = make_hpoint(2.0, 1.0, 1.0);
  double zmin = 0.05;
  GeodesicOptions options;
  bool cone_oracle = false;     // compare with the developed cone (constant beta, no charges)
};

struct BarrierSpec {
  double eps = 0.05;
  double radius = 3.0;
  std::size_t samples = 1000;
  std::size_t validation = 200;
};

struct DecaySpec {
  std::size_t n = 24;
  double z_far = 1e4;
  double r_far = 1e4;
  std::vector<ProbePoint> feet;  // vertical descents for the Green decay fit
  double fit_z_max = 1e-1;
  double fit_z_min = 1e-4;
};

struct QuasiIsometrySpec {
  double Z0 = 10.0;
  double R0 = 10.0;
  std::size_t samples = 200;
};

struct RemainderSpec {
  std::vector<ProbePoint> feet;
  std::vector<double> heights{1e-1, 1e-2, 1e-3};
};

// Defaults are the documented tolerance ladder; --tol-scale multiplies all
// of them except the order windows.
struct Tolerances {
  double curvature = 1e-3;
  double kahler = 1e-3;
  std::array<double, 2> order{1.5, 2.5};
  double rounding_floor = 1e-11;  // below this an order is not measured
  double cone = 1e-2;
  double flux_relative = 1e-3;
  double empty_flux = 1e-6;
  double stokes = 1e-4;
  double drift = 1e-6;
  double cone_oracle = 1e-8;
  double decay_exponent = 0.1;
  double decay_stability = 0.2;
  double pointwise = 1e-10;  // J^2 + 1, omega ^ omega / vol - 2, coframe
  double closedness = 1e-8;
  double ansatz = 1e-5;
  double compatibility = 1e-6;
  double max_principle = 1e-8;
  double harmonicity_floor = 1e-9;
  double remainder_growth = 10.0;
  std::optional<double> quasi_isometry_spread;  // asserted only when given
  std::optional<double> quasi_isometry_target;  // expected c, if known

  Tolerances scaled(double s) const;
};

inline constexpr std::array<const char*, 24> kCheckNames{
    "positivity",    "harmonicity", "barrier",      "max_principle", "flux",           "flux_additivity",
    "dA_equals_F",   "stokes",      "decay_z2",     "decay_dA",      "curvature",      "kahler",
    "closedness",    "coframe",     "omega_wedge",  "complex_structure", "ansatz",     "compatibility",
    "cone_probes",   "quasi_isometry", "geodesics", "conformal_remainder", "theta_invariance", "model_forms"};

struct Scenario {
  std::string name;
  BetaSource beta;
  std::vector<HPoint> charges;
  double kappa = kDefaultKappa;
  GaugeDescriptor gauge;
  PoissonOptions quadrature;
  std::vector<HPoint> points;      // pointwise checks
  double fd_step = 0.02;           // harmonicity and dA = F
  double flux_radius = 0.2;
  std::vector<StokesDisk> stokes;
  std::vector<GridSpec> grids;
  std::vector<ProbePoint> cone_probes;
  ConeProbeOptions probe_options;
  GeodesicSpec geodesics;
  BarrierSpec barrier;
  DecaySpec decay;
  QuasiIsometrySpec quasi_isometry;
  RemainderSpec remainder;
  std::vector<std::string> checks;  // enabled checks, in kCheckNames order
  Tolerances tolerances;

  bool enabled(const std::string& check) const;
  ChargeConfig charge_config() const { return ChargeConfig(charges, kappa); }
};

// Throws SchemaError listing every violation.
Scenario parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_config(const std::filesystem::path& path);

// FNV-1a over the canonical form of the document (and any grid file it
// names), as 16 hex digits.
std::string config_hash(const std::string& text, const std::filesystem::path& base_dir = {});
std::string fnv1a_hex(const std::string& bytes);

}  // namespace sfk
