#include "sfk/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sfk {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid scenario:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A JSON object whose keys must all be consumed.
class Obj {
 public:
  Obj(const json* j, std::string path, std::vector<std::string>& errs) : j_(j), path_(std::move(path)), errs_(errs) {
    if (j_ && !j_->is_object()) {
      error("expected an object");
      j_ = nullptr;
    }
  }
  ~Obj() {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!seen_.count(it.key())) errs_.push_back(at(it.key()) + ": unknown key");
  }
  Obj(const Obj&) = delete;
  Obj& operator=(const Obj&) = delete;

  bool valid() const { return j_ != nullptr; }
  bool has(const std::string& k) const { return j_ && j_->contains(k); }
  std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  void error(const std::string& msg) const { errs_.push_back((path_.empty() ? "<root>" : path_) + ": " + msg); }

  const json* raw(const std::string& k) {
    if (!has(k)) return nullptr;
    seen_.insert(k);
    return &(*j_)[k];
  }

  template <class T>
  void get(const std::string& k, T& out) {
    const json* v = raw(k);
    if (v) read(*v, at(k), out);
  }
  template <class T>
  void require(const std::string& k, T& out) {
    if (!has(k)) {
      errs_.push_back(at(k) + ": required");
      return;
    }
    get(k, out);
  }
  void positive(const std::string& k, double& out) {
    get(k, out);
    if (has(k) && !(out > 0.0)) errs_.push_back(at(k) + ": must be positive");
  }
  template <class T>
  void count(const std::string& k, T& out) {
    const json* v = raw(k);
    if (!v) return;
    if (!v->is_number_unsigned()) {
      errs_.push_back(at(k) + ": expected a non-negative integer");
      return;
    }
    out = v->get<T>();
  }

  void read(const json& v, const std::string& where, double& out) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) errs_.push_back(where + ": expected a finite number");
    else out = v.get<double>();
  }
  void read(const json& v, const std::string& where, bool& out) {
    if (!v.is_boolean()) errs_.push_back(where + ": expected true or false");
    else out = v.get<bool>();
  }
  void read(const json& v, const std::string& where, std::string& out) {
    if (!v.is_string()) errs_.push_back(where + ": expected a string");
    else out = v.get<std::string>();
  }
  void read(const json& v, const std::string& where, std::optional<double>& out) {
    double d = 0.0;
    const std::size_t before = errs_.size();
    read(v, where, d);
    if (errs_.size() == before) out = d;
  }
  template <std::size_t N>
  void read(const json& v, const std::string& where, std::array<double, N>& out) {
    if (!v.is_array() || v.size() != N) {
      errs_.push_back(where + ": expected an array of " + std::to_string(N) + " numbers");
      return;
    }
    for (std::size_t i = 0; i < N; ++i) read(v[i], where + "[" + std::to_string(i) + "]", out[i]);
  }
  void read(const json& v, const std::string& where, HPoint& out) {
    std::array<double, 3> c{out.z, out.x2, out.x3};
    const std::size_t before = errs_.size();
    read(v, where, c);
    if (errs_.size() != before) return;
    if (!(c[0] > 0.0)) {
      errs_.push_back(where + ": z must be positive");
      return;
    }
    out = make_hpoint(c[0], c[1], c[2]);
  }
  void read(const json& v, const std::string& where, ProbePoint& out) {
    std::array<double, 2> c{};
    read(v, where, c);
    out = {c[0], c[1]};
  }
  template <class T>
  void read(const json& v, const std::string& where, std::vector<T>& out) {
    if (!v.is_array()) {
      errs_.push_back(where + ": expected an array");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T item{};
      read(v[i], where + "[" + std::to_string(i) + "]", item);
      out.push_back(item);
    }
  }

 private:
  const json* j_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

void parse_beta(Obj& root, BetaSource& b, const std::filesystem::path& base, std::vector<std::string>& errs) {
  if (!root.has("beta")) {
    errs.push_back("beta: required");
    return;
  }
  Obj o(root.raw("beta"), "beta", errs);
  if (!o.valid()) return;
  const int kinds = int(o.has("constant")) + int(o.has("expression")) + int(o.has("grid"));
  if (kinds != 1) {
    o.error("give exactly one of constant, expression, grid");
    return;
  }
  if (o.has("constant")) {
    b.kind = BetaSource::Kind::constant;
    o.get("constant", b.constant);
    if (!(b.constant > 0.0)) errs.push_back("beta.constant: must be positive");
  } else if (o.has("expression")) {
    b.kind = BetaSource::Kind::expression;
    o.get("expression", b.expression);
    o.require("at_infinity", b.at_infinity);
    o.get("constant_outside", b.constant_outside);
  } else {
    b.kind = BetaSource::Kind::grid;
    std::string file;
    o.get("grid", file);
    b.grid_file = base / file;
    if (!std::filesystem::exists(b.grid_file)) errs.push_back("beta.grid: no such file " + b.grid_file.string());
  }
  o.get("holder_exponent", b.holder_exponent);
  o.positive("quotient_bound", b.quotient_bound);
}

void parse_charges(Obj& root, Scenario& s, std::vector<std::string>& errs) {
  const json* c = root.raw("charges");
  if (!c) {
    errs.push_back("charges: required (use [] for none)");
    return;
  }
  if (!c->is_array()) {
    errs.push_back("charges: expected an array");
    return;
  }
  for (std::size_t i = 0; i < c->size(); ++i) {
    const std::string where = "charges[" + std::to_string(i) + "]";
    Obj o(&(*c)[i], where, errs);
    if (!o.valid()) continue;
    double z = 0.0, x2 = 0.0, x3 = 0.0;
    o.require("z", z);
    o.require("x2", x2);
    o.require("x3", x3);
    if (!(z > 0.0)) {
      errs.push_back(where + ".z: charges must have z > 0");
      continue;
    }
    s.charges.push_back(make_hpoint(z, x2, x3));
  }
}

void parse_gauge(Obj& root, Scenario& s, std::vector<std::string>& errs) {
  Obj o(root.raw("gauge"), "gauge", errs);
  if (!o.valid()) return;
  std::string kind = "coulomb";
  o.get("kind", kind);
  if (kind == "coulomb") s.gauge.gauge = Gauge::coulomb;
  else if (kind == "homotopy") s.gauge.gauge = Gauge::homotopy;
  else errs.push_back("gauge.kind: expected coulomb or homotopy");
  if (o.has("base_point")) {
    HPoint p;
    o.get("base_point", p);
    s.gauge.base_point = p;
  }
  std::vector<std::string> strings;
  o.get("strings", strings);
  for (const auto& d : strings) {
    if (d == "down") s.gauge.strings.push_back(StringDirection::down);
    else if (d == "up") s.gauge.strings.push_back(StringDirection::up);
    else errs.push_back("gauge.strings: expected down or up, got " + d);
  }
  o.count("path_order", s.gauge.path_order);
}

void parse_quadrature(Obj& root, PoissonOptions& q, std::vector<std::string>& errs) {
  Obj o(root.raw("quadrature"), "quadrature", errs);
  if (!o.valid()) return;
  o.positive("angular_scale", q.angular_scale);
  o.count("gauss_order", q.gauss_order);
  o.positive("angular_density", q.angular_density);
  o.count("min_angular", q.min_angular);
}

void parse_grids(Obj& root, Scenario& s, std::vector<std::string>& errs) {
  const json* g = root.raw("grids");
  if (!g) return;
  if (!g->is_array()) {
    errs.push_back("grids: expected an array");
    return;
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const std::string where = "grids[" + std::to_string(i) + "]";
    Obj o(&(*g)[i], where, errs);
    if (!o.valid()) continue;
    GridSpec spec;
    const std::size_t before = errs.size();
    o.require("name", spec.name);
    o.require("lo", spec.box.lo);
    o.require("hi", spec.box.hi);
    o.positive("h", spec.h);
    if (errs.size() != before) continue;
    if (!names.insert(spec.name).second) errs.push_back(where + ".name: duplicate grid name " + spec.name);
    const auto& [lo, hi] = spec.box;
    if (!(lo.z < hi.z && lo.x2 < hi.x2 && lo.x3 < hi.x3)) {
      errs.push_back(where + ": lo must be below hi in every coordinate");
      continue;
    }
    try {
      FieldGrid::shape_for(spec.box, spec.h);
    } catch (const std::exception& e) {
      errs.push_back(where + ": " + e.what());
      continue;
    }
    s.grids.push_back(spec);
  }
}

void parse_probes(Obj& root, Scenario& s, std::vector<std::string>& errs) {
  Obj o(root.raw("cone_probes"), "cone_probes", errs);
  if (!o.valid()) return;
  o.get("points", s.cone_probes);
  o.positive("z_top", s.probe_options.z_top);
  o.count("levels", s.probe_options.levels);
  o.count("gauss_order", s.probe_options.gauss_order);
  if (s.probe_options.levels < 2) errs.push_back("cone_probes.levels: need at least 2");
}

void parse_geodesics(Obj& root, GeodesicSpec& g, std::vector<std::string>& errs) {
  Obj o(root.raw("geodesics"), "geodesics", errs);
  if (!o.valid()) return;
  o.count("random", g.random);
  o.count("adversarial", g.adversarial);
  o.positive("length", g.length);
  o.get("lo", g.lo);
  o.get("hi", g.hi);
  o.positive("zmin", g.zmin);
  o.positive("abs_tol", g.options.abs_tol);
  o.positive("rel_tol", g.options.rel_tol);
  o.positive("initial_step", g.options.initial_step);
  o.positive("min_step", g.options.min_step);
  o.positive("divisor_z", g.options.divisor_z);
  o.positive("string_switch", g.options.string_switch);
  o.count("record_every", g.options.record_every);
  o.get("cone_oracle", g.cone_oracle);
  if (!(g.lo.z > g.zmin)) errs.push_back("geodesics: lo z must exceed zmin");
  if (!(g.lo.z < g.hi.z && g.lo.x2 <= g.hi.x2 && g.lo.x3 <= g.hi.x3))
    errs.push_back("geodesics: lo must be below hi");
}

void parse_tolerances(Obj& root, Tolerances& t, std::vector<std::string>& errs) {
  Obj o(root.raw("tolerances"), "tolerances", errs);
  if (!o.valid()) return;
  o.positive("curvature", t.curvature);
  o.positive("kahler", t.kahler);
  o.get("order", t.order);
  o.positive("rounding_floor", t.rounding_floor);
  o.positive("cone", t.cone);
  o.positive("flux_relative", t.flux_relative);
  o.positive("empty_flux", t.empty_flux);
  o.positive("stokes", t.stokes);
  o.positive("drift", t.drift);
  o.positive("cone_oracle", t.cone_oracle);
  o.positive("decay_exponent", t.decay_exponent);
  o.positive("decay_stability", t.decay_stability);
  o.positive("pointwise", t.pointwise);
  o.positive("closedness", t.closedness);
  o.positive("ansatz", t.ansatz);
  o.positive("compatibility", t.compatibility);
  o.positive("max_principle", t.max_principle);
  o.positive("harmonicity_floor", t.harmonicity_floor);
  o.positive("remainder_growth", t.remainder_growth);
  o.get("quasi_isometry_spread", t.quasi_isometry_spread);
  o.get("quasi_isometry_target", t.quasi_isometry_target);
  if (!(t.order[0] < t.order[1])) errs.push_back("tolerances.order: expected [lo, hi] with lo < hi");
}

// Grids must stay clear of the charges and of the Dirac strings, and the
// sample points away from both.
void check_clearance(const Scenario& s, std::vector<std::string>& errs) {
  for (std::size_t i = 0; i < s.charges.size(); ++i) {
    const HPoint& q = s.charges[i];
    const bool up = i < s.gauge.strings.size() && s.gauge.strings[i] == StringDirection::up;
    for (const auto& g : s.grids) {
      const auto& [lo, hi] = g.box;
      const bool on_line = q.x2 >= lo.x2 - g.h && q.x2 <= hi.x2 + g.h && q.x3 >= lo.x3 - g.h && q.x3 <= hi.x3 + g.h;
      if (!on_line) continue;
      const double zlo = lo.z - g.h, zhi = hi.z + g.h;
      const bool hits = up ? zhi >= q.z : zlo <= q.z;
      if (hits)
        errs.push_back("grids." + g.name + ": box reaches charge " + std::to_string(i) + " or its Dirac string");
    }
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      const HPoint& p = s.points[k];
      const double rho = std::hypot(p.x2 - q.x2, p.x3 - q.x3);
      const bool string_side = up ? p.z > q.z : p.z < q.z;
      if (rho < 0.05 * q.z && (string_side || std::fabs(p.z - q.z) < 0.05 * q.z))
        errs.push_back("points[" + std::to_string(k) + "]: too close to charge " + std::to_string(i) +
                       " or its Dirac string");
    }
  }
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> violations)
    : ConfigError(join(violations)), violations_(std::move(violations)) {}

ConeAngleSpec BetaSource::build() const {
  ConeAngleSpec b = [&] {
    switch (kind) {
      case Kind::constant: return ConeAngleSpec::constant(constant);
      case Kind::expression: return ConeAngleSpec::from_expression(expression, at_infinity, constant_outside);
      case Kind::grid: return ConeAngleSpec::from_grid(LonLatGrid::load(grid_file.string()));
    }
    throw ConfigError("unknown beta kind");
  }();
  b.set_declared_holder_exponent(holder_exponent);
  b.validate(quotient_bound);
  return b;
}

Tolerances Tolerances::scaled(double s) const {
  if (!(s > 0.0)) throw ConfigError("tolerance scale must be positive");
  Tolerances t = *this;
  for (double* v : {&t.curvature, &t.kahler, &t.cone, &t.flux_relative, &t.empty_flux, &t.stokes, &t.drift,
                    &t.cone_oracle, &t.decay_exponent, &t.decay_stability, &t.pointwise, &t.closedness, &t.ansatz,
                    &t.compatibility, &t.max_principle, &t.harmonicity_floor, &t.remainder_growth})
    *v *= s;
  if (t.quasi_isometry_spread) *t.quasi_isometry_spread *= s;
  return t;
}

bool Scenario::enabled(const std::string& check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

Scenario parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError({std::string("not valid JSON: ") + e.what()});
  }
  std::vector<std::string> errs;
  Scenario s;
  s.points = {make_hpoint(0.7, 0.3, 0.2), make_hpoint(1.3, -0.4, 0.5), make_hpoint(0.4, -0.2, -0.6)};
  s.checks.assign(kCheckNames.begin(), kCheckNames.end());
  {
    Obj root(&doc, "", errs);
    if (!root.valid()) throw SchemaError(errs);
    root.require("name", s.name);
    parse_beta(root, s.beta, base_dir, errs);
    parse_charges(root, s, errs);
    root.positive("kappa", s.kappa);
    parse_gauge(root, s, errs);
    parse_quadrature(root, s.quadrature, errs);
    root.get("points", s.points);
    root.positive("fd_step", s.fd_step);
    root.positive("flux_radius", s.flux_radius);
    if (const json* st = root.raw("stokes")) {
      if (!st->is_array()) {
        errs.push_back("stokes: expected an array");
      } else {
        for (std::size_t i = 0; i < st->size(); ++i) {
          Obj o(&(*st)[i], "stokes[" + std::to_string(i) + "]", errs);
          if (!o.valid()) continue;
          StokesDisk d;
          o.require("centre", d.centre);
          o.require("normal", d.normal);
          o.positive("radius", d.radius);
          if (!(d.centre[0] > d.radius)) o.error("disk must stay in z > 0");
          s.stokes.push_back(d);
        }
      }
    }
    parse_grids(root, s, errs);
    parse_probes(root, s, errs);
    parse_geodesics(root, s.geodesics, errs);
    {
      Obj o(root.raw("barrier"), "barrier", errs);
      if (o.valid()) {
        o.positive("eps", s.barrier.eps);
        o.positive("radius", s.barrier.radius);
        o.count("samples", s.barrier.samples);
        o.count("validation", s.barrier.validation);
      }
    }
    {
      Obj o(root.raw("decay"), "decay", errs);
      if (o.valid()) {
        o.count("rays", s.decay.n);
        o.positive("z_far", s.decay.z_far);
        o.positive("r_far", s.decay.r_far);
        o.get("feet", s.decay.feet);
        o.positive("fit_z_max", s.decay.fit_z_max);
        o.positive("fit_z_min", s.decay.fit_z_min);
      }
    }
    {
      Obj o(root.raw("quasi_isometry"), "quasi_isometry", errs);
      if (o.valid()) {
        o.positive("Z0", s.quasi_isometry.Z0);
        o.positive("R0", s.quasi_isometry.R0);
        o.count("samples", s.quasi_isometry.samples);
      }
    }
    {
      Obj o(root.raw("remainder"), "remainder", errs);
      if (o.valid()) {
        o.get("feet", s.remainder.feet);
        o.get("heights", s.remainder.heights);
        for (double h : s.remainder.heights)
          if (!(h > 0.0)) errs.push_back("remainder.heights: must be positive");
      }
    }
    if (root.has("checks")) {
      std::vector<std::string> wanted;
      root.get("checks", wanted);
      for (const auto& w : wanted)
        if (std::find(kCheckNames.begin(), kCheckNames.end(), w) == kCheckNames.end())
          errs.push_back("checks: unknown check " + w);
      s.checks.clear();
      for (const char* n : kCheckNames)
        if (std::find(wanted.begin(), wanted.end(), n) != wanted.end()) s.checks.push_back(n);
    }
    parse_tolerances(root, s.tolerances, errs);
  }
  if (errs.empty()) {
    try {
      (void)s.charge_config();
    } catch (const ConfigError& e) {
      errs.push_back(std::string("charges: ") + e.what());
    }
    try {
      (void)s.beta.build();
    } catch (const std::exception& e) {
      errs.push_back(std::string("beta: ") + e.what());
    }
    if (s.gauge.strings.size() > s.charges.size()) errs.push_back("gauge.strings: more entries than charges");
    check_clearance(s, errs);
  }
  if (!errs.empty()) throw SchemaError(errs);
  return s;
}

Scenario load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = json::parse(text);
  std::string canon = doc.dump();
  if (doc.contains("beta") && doc["beta"].contains("grid") && doc["beta"]["grid"].is_string())
    canon += read_file(base_dir / doc["beta"]["grid"].get<std::string>());
  return fnv1a_hex(canon);
}

}  // namespace sfk
