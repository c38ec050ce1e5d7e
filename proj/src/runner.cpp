#include "sfk/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "sfk/errors.hpp"

#ifndef SFK_VERSION
#define SFK_VERSION "0.0.0"
#endif

namespace sfk {

using nlohmann::json;

std::string code_version() { return SFK_VERSION; }

std::string cache_schema_hash() {
  std::string layout = std::string("sfk-cache/1;") + kReportSchema + ";node=g16,omega16;double;x3-fastest;checks=";
  for (const char* n : kCheckNames) layout += std::string(n) + ",";
  return fnv1a_hex(layout);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json point_json(const HPoint& p) { return json::array({p.z, p.x2, p.x3}); }

bool order_ok(double e_h, double e_h2, double order, const Tolerances& t, double floor) {
  if (e_h < floor && e_h2 < floor) return true;
  return std::isfinite(order) && order >= t.order[0] && order <= t.order[1];
}

CheckResult make(const std::string& name, bool ok) {
  CheckResult r;
  r.name = name;
  r.status = ok ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

CheckResult skipped(const std::string& name, const std::string& why) {
  CheckResult r;
  r.name = name;
  r.status = CheckStatus::skipped;
  r.note = why;
  return r;
}

struct GridPair {
  GridSpec spec;
  FieldGrid coarse;
  FieldGrid fine;
};

std::string grid_file(const std::string& name, bool fine) { return "grid_" + name + (fine ? "_fine" : "") + ".bin"; }

void write_samples(const std::filesystem::path& file, const FieldGrid& g) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw CacheError("cannot write " + file.string());
  for (const auto& s : g.samples()) {
    out.write(reinterpret_cast<const char*>(s.g.data()), 16 * sizeof(double));
    out.write(reinterpret_cast<const char*>(s.omega.data()), 16 * sizeof(double));
  }
  if (!out) throw CacheError("short write to " + file.string());
}

FieldGrid read_samples(const std::filesystem::path& file, const GridBox& box, double h) {
  const auto n = FieldGrid::shape_for(box, h);
  const std::size_t count = n[0] * n[1] * n[2];
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CacheError("missing cache file " + file.string());
  std::vector<ChartSample> data(count);
  for (auto& s : data) {
    in.read(reinterpret_cast<char*>(s.g.data()), 16 * sizeof(double));
    in.read(reinterpret_cast<char*>(s.omega.data()), 16 * sizeof(double));
  }
  if (!in || in.peek() != std::char_traits<char>::eof()) throw CacheError("cache file has the wrong size: " + file.string());
  return FieldGrid(box, h, std::move(data));
}

}  // namespace

struct Runner::Impl {
  const Scenario& s;
  const RunOptions& o;
  Tolerances tol;
  ConeAngleSpec beta;
  std::shared_ptr<const Potential> V;
  std::shared_ptr<const ConnectionData> A;
  std::unique_ptr<MetricField> g;
  std::vector<std::pair<std::string, double>> timings;

  Impl(const Scenario& s_, const RunOptions& o_)
      : s(s_), o(o_), tol(s_.tolerances.scaled(o_.tol_scale)), beta(s_.beta.build()) {
    V = std::make_shared<const Potential>(assemble_V(beta, s.charge_config(), s.quadrature));
    A = std::make_shared<const ConnectionData>(V, s.gauge);
    g = std::make_unique<MetricField>(A);
  }

  void log(const std::string& m) const {
    if (o.log) o.log(m);
  }

  template <class F>
  CheckResult timed(const std::string& name, F&& f) {
    log("check " + name);
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = f();
    } catch (const std::exception& e) {
      r = make(name, false);
      r.note = std::string("error: ") + e.what();
    }
    r.name = name;
    timings.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return r;
  }

  RunReport skeleton() const {
    RunReport rep;
    rep.scenario = s.name;
    rep.beta = beta.description();
    rep.config_hash = o.config_hash;
    rep.code_version = code_version();
    rep.seed = o.seed;
    rep.tol_scale = o.tol_scale;
    return rep;
  }

  std::vector<HPoint> collar(std::size_t n, std::uint64_t salt) const {
    return collar_samples(s.barrier.eps, s.barrier.radius, n, o.seed + salt);
  }

  // ---- pointwise and potential-level checks ----

  CheckResult positivity() {
    std::vector<HPoint> pts = s.points;
    for (const auto& p : collar(200, 6)) pts.push_back(p);
    for (const auto& p : far_samples(s.quasi_isometry.Z0, s.quasi_isometry.R0, 100, o.seed + 7)) pts.push_back(p);
    double vmin = std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;
    for (const auto& p : pts) {
      try {
        vmin = std::min(vmin, V->value(p));
        ++evaluated;
      } catch (const PoleError&) {
      }
    }
    auto r = make("positivity", evaluated > 0 && vmin > 0.0);
    r.measured = {{"samples", evaluated}, {"min_V", finite_or_null(vmin)}};
    r.tolerance = {{"min_V", "> 0"}};
    return r;
  }

  CheckResult harmonicity() {
    if (s.points.empty()) return skipped("harmonicity", "no sample points");
    const ScalarField u = V->harmonic().field();
    json per = json::array();
    bool ok = true;
    for (const auto& p : s.points) {
      const HarmonicityReport h = harmonicity_order(u, p, s.fd_step);
      const bool pass = order_ok(h.residual_h, h.residual_h2, h.order, tol, tol.harmonicity_floor);
      ok = ok && pass;
      per.push_back({{"point", point_json(p)},
                     {"residual_h", h.residual_h},
                     {"residual_h2", h.residual_h2},
                     {"order", finite_or_null(h.order)}});
    }
    auto r = make("harmonicity", ok);
    r.measured = {{"h", s.fd_step}, {"points", per}};
    r.tolerance = {{"order", tol.order}, {"floor", tol.harmonicity_floor}};
    return r;
  }

  CheckResult barrier() {
    const double C = barrier_constant(beta, s.barrier.eps, collar(s.barrier.validation, 1));
    const BarrierReport b = check_barriers(V->harmonic(), C, s.barrier.eps, collar(s.barrier.samples, 0));
    auto r = make("barrier", b.passed() && b.min_margin > 0.0);
    r.measured = {{"C", C},
                  {"eps", s.barrier.eps},
                  {"samples", b.samples},
                  {"violations", b.violations},
                  {"min_margin", b.min_margin},
                  {"v_sup", b.v_sup}};
    r.tolerance = {{"violations", 0}, {"min_margin", "> 0"}};
    return r;
  }

  CheckResult max_principle() {
    std::vector<HPoint> pts = s.points;
    for (const auto& p : collar(200, 6)) pts.push_back(p);
    for (const auto& p : far_samples(s.quasi_isometry.Z0, s.quasi_isometry.R0, 100, o.seed + 7)) pts.push_back(p);
    const MaxPrincipleReport m = check_max_principle(V->harmonic(), pts, tol.max_principle);
    auto r = make("max_principle", m.passed());
    r.measured = {{"samples", m.samples}, {"violations", m.violations}, {"min_u", m.min_value},
                  {"max_u", m.max_value}, {"lower", m.lower},        {"upper", m.upper}};
    r.tolerance = {{"slack", tol.max_principle}};
    return r;
  }

  CheckResult flux_check() {
    const double kappa = s.kappa;
    json per = json::array(), empty = json::array();
    bool ok = true;
    for (const auto& q : s.charges) {
      const double f = flux(*V, q, s.flux_radius);
      const bool pass = std::fabs(f - kappa) <= tol.flux_relative * kappa;
      ok = ok && pass;
      per.push_back({{"charge", point_json(q)}, {"flux", f}, {"error", f - kappa}});
    }
    for (const auto& p : s.points) {
      bool clear = true;
      for (const auto& q : s.charges) clear = clear && hyp_distance(p, q) > 2.0 * s.flux_radius;
      if (!clear) continue;
      const double f = flux(*V, p, s.flux_radius);
      ok = ok && std::fabs(f) <= tol.empty_flux;
      empty.push_back({{"centre", point_json(p)}, {"flux", f}});
    }
    auto r = make("flux", ok);
    r.measured = {{"radius", s.flux_radius}, {"kappa", kappa}, {"charges", per}, {"empty_spheres", empty}};
    r.tolerance = {{"relative", tol.flux_relative}, {"empty", tol.empty_flux}};
    return r;
  }

  CheckResult flux_additivity() {
    if (s.charges.size() < 2) return skipped("flux_additivity", "fewer than two charges");
    HPoint c{0.0, 0.0, 0.0};
    for (const auto& q : s.charges) {
      c.z += q.z / s.charges.size();
      c.x2 += q.x2 / s.charges.size();
      c.x3 += q.x3 / s.charges.size();
    }
    c = make_hpoint(c.z, c.x2, c.x3);
    double radius = 0.0;
    for (const auto& q : s.charges) radius = std::max(radius, hyp_distance(c, q));
    radius += 0.5;
    const double f = flux(*V, c, radius, 64, 128);
    const double expected = s.kappa * s.charges.size();
    auto r = make("flux_additivity", std::fabs(f - expected) <= tol.flux_relative * s.kappa);
    r.measured = {{"centre", point_json(c)}, {"radius", radius}, {"flux", f}, {"expected", expected}};
    r.tolerance = {{"absolute", tol.flux_relative * s.kappa}};
    return r;
  }

  CheckResult dA_equals_F() {
    if (s.points.empty()) return skipped("dA_equals_F", "no sample points");
    json per = json::array();
    bool ok = true;
    for (const auto& p : s.points) {
      const CurlCheck c = check_dA_equals_F(*A, p, s.fd_step);
      ok = ok && order_ok(c.residual_h, c.residual_h2, c.order, tol, tol.harmonicity_floor);
      per.push_back({{"point", point_json(p)},
                     {"residual_h", c.residual_h},
                     {"residual_h2", c.residual_h2},
                     {"order", finite_or_null(c.order)}});
    }
    auto r = make("dA_equals_F", ok);
    r.measured = {{"h", s.fd_step}, {"points", per}};
    r.tolerance = {{"order", tol.order}, {"floor", tol.harmonicity_floor}};
    return r;
  }

  CheckResult stokes() {
    if (s.stokes.empty()) return skipped("stokes", "no disks configured");
    json per = json::array();
    bool ok = true;
    for (const auto& d : s.stokes) {
      const double loop = loop_integral(*A, d.centre, d.normal, d.radius);
      const double surf = disk_flux(*V, d.centre, d.normal, d.radius);
      ok = ok && std::fabs(loop - surf) <= tol.stokes;
      per.push_back({{"centre", d.centre}, {"normal", d.normal}, {"radius", d.radius}, {"loop", loop},
                     {"surface", surf}});
    }
    auto r = make("stokes", ok);
    r.measured = {{"disks", per}};
    r.tolerance = {{"absolute", tol.stokes}};
    return r;
  }

  CheckResult decay_z2() {
    if (s.charges.empty()) return skipped("decay_z2", "no charges");
    if (s.decay.feet.empty()) return skipped("decay_z2", "no descent feet configured");
    json per = json::array();
    bool ok = true;
    const ChargeConfig ch = s.charge_config();
    for (const auto& f : s.decay.feet) {
      const DecayFit fit = check_decay_z2(ch, f.x2, f.x3, s.decay.fit_z_max, s.decay.fit_z_min);
      ok = ok && fit.passed(tol.decay_exponent);
      per.push_back({{"foot", {f.x2, f.x3}},
                     {"exponent", fit.exponent},
                     {"prefactor", fit.prefactor},
                     {"max_residual", fit.max_residual}});
    }
    auto r = make("decay_z2", ok);
    r.measured = {{"descents", per}};
    r.tolerance = {{"exponent", 2.0}, {"plus_minus", tol.decay_exponent}};
    return r;
  }

  CheckResult decay_dA() {
    const DecayReport d = check_decay_dA(V->harmonic(), s.decay.n, s.decay.z_far, s.decay.r_far);
    auto r = make("decay_dA", d.bounded() && d.stable(tol.decay_stability));
    r.measured = {{"constant", finite_or_null(d.constant)},
                  {"constant_doubled", finite_or_null(d.constant_doubled)},
                  {"stability", finite_or_null(d.stability)},
                  {"vertical_first", d.vertical_first},
                  {"vertical_last", d.vertical_last},
                  {"samples", d.samples}};
    r.tolerance = {{"stability", tol.decay_stability}};
    return r;
  }

  // Pointwise algebra at the sample points.
  template <class F>
  CheckResult pointwise(const std::string& name, double limit, F&& f) {
    if (s.points.empty()) return skipped(name, "no sample points");
    double worst = 0.0;
    json per = json::array();
    for (const auto& p : s.points) {
      const double v = f(p);
      worst = std::max(worst, std::isfinite(v) ? std::fabs(v) : std::numeric_limits<double>::infinity());
      per.push_back({{"point", point_json(p)}, {"value", finite_or_null(v)}});
    }
    auto r = make(name, worst <= limit);
    r.measured = {{"max", finite_or_null(worst)}, {"points", per}};
    r.tolerance = {{"max", limit}};
    return r;
  }

  CheckResult closedness() {
    return pointwise("closedness", tol.closedness, [&](const HPoint& p) { return omega_closedness(A->jet(p), p); });
  }
  CheckResult coframe() {
    return pointwise("coframe", tol.pointwise, [&](const HPoint& p) { return coframe_residual(A->jet(p), p); });
  }
  CheckResult omega_wedge() {
    return pointwise("omega_wedge", tol.pointwise, [&](const HPoint& p) {
      const MetricSample m = g->sample(p);
      return omega_wedge_ratio(m.g, m.omega) - 2.0;
    });
  }
  CheckResult complex_structure() {
    return pointwise("complex_structure", tol.pointwise, [&](const HPoint& p) {
      const MetricSample m = g->sample(p);
      return complex_structure_defect(m.g, m.omega);
    });
  }
  CheckResult theta_invariance() {
    return pointwise("theta_invariance", 0.0, [&](const HPoint& p) {
      return (g->g(0.0, p) - g->g(2.345, p)).cwiseAbs().maxCoeff();
    });
  }
  CheckResult compatibility() {
    return pointwise("compatibility", tol.compatibility, [&](const HPoint& p) { return compatibility_residual(*V, p); });
  }

  CheckResult ansatz() {
    if (s.points.empty()) return skipped("ansatz", "no sample points");
    const LeBrunData data(V);
    double exact = 0.0, fd = 0.0;
    json per = json::array();
    for (const auto& p : s.points) {
      const double e = scalar_curvature_ansatz(data, p);
      const double x1 = 0.5 * p.z * p.z;
      const double h = std::min(1e-3, 0.25 * x1);
      const double f = scalar_curvature_ansatz(data.v(), data.W(), x1, p.x2, p.x3, h);
      exact = std::max(exact, std::fabs(e));
      fd = std::max(fd, std::fabs(f));
      per.push_back({{"point", point_json(p)}, {"exact", e}, {"finite_difference", f}});
    }
    auto r = make("ansatz", exact == 0.0 && fd <= tol.ansatz);
    r.measured = {{"max_exact", exact}, {"max_finite_difference", fd}, {"points", per}};
    r.tolerance = {{"exact", 0.0}, {"finite_difference", tol.ansatz}};
    return r;
  }

  CheckResult model_forms() {
    if (s.points.empty()) return skipped("model_forms", "no sample points");
    const double h = s.fd_step;
    json per = json::array();
    bool ok = true;
    for (const auto& p : s.points) {
      if (!(p.z > 4.5 * h)) continue;
      const GridBox box{make_hpoint(p.z - 2 * h, p.x2 - 2 * h, p.x3 - 2 * h),
                        make_hpoint(p.z + 2 * h, p.x2 + 2 * h, p.x3 + 2 * h)};
      const auto field = [&](ModelForm kind, bool conformal_metric) -> ChartField {
        return [this, kind, conformal_metric](const HPoint& q) {
          Mat4 m = model_metric(beta, q);
          if (conformal_metric) m /= beta.beta(q.x2, q.x3);
          return ChartSample{m, model_form(beta, q, kind)};
        };
      };
      const auto defect = [&](ModelForm kind, bool conformal_metric) {
        const ChartSample c = field(kind, conformal_metric)(p);
        return complex_structure_defect(c.g, c.omega);
      };
      const double d_conf = kahler_check(field(ModelForm::conformal, true), box, h).residual;
      const double d_disp = kahler_check(field(ModelForm::displayed, true), box, h).residual;
      const double d_plain = kahler_check(field(ModelForm::plain, false), box, h).residual;
      const double j_conf = defect(ModelForm::conformal, true);
      const double j_disp = defect(ModelForm::displayed, true);
      const double j_plain = defect(ModelForm::plain, false);
      ok = ok && d_conf <= tol.closedness && j_conf <= tol.pointwise && j_plain <= tol.pointwise;
      per.push_back({{"point", point_json(p)},
                     {"conformal", {{"d_omega", d_conf}, {"J2_defect", j_conf}}},
                     {"displayed", {{"d_omega", d_disp}, {"J2_defect", j_disp}}},
                     {"plain", {{"d_omega", d_plain}, {"J2_defect", j_plain}}}});
    }
    if (per.empty()) return skipped("model_forms", "no sample point high enough for the stencil");
    auto r = make("model_forms", ok);
    r.measured = {{"h", h}, {"points", per}};
    r.tolerance = {{"conformal_d_omega", tol.closedness}, {"J2_defect", tol.pointwise}};
    r.note = "conformal: Kahler form of beta^-1 g_beta; displayed: z dz^dtheta + beta dx2^dx3 against "
             "beta^-1 g_beta (reported only); plain: form of g_beta, compatible but not closed for varying beta";
    return r;
  }

  // ---- curvature-level checks ----

  CheckResult cone_probes() {
    if (s.cone_probes.empty()) return skipped("cone_probes", "no probe points");
    json per = json::array();
    bool ok = true;
    std::size_t measured = 0;
    for (const auto& q : s.cone_probes) {
      const ConeProbeResult c = cone_angle_probe(*V, q.x2, q.x3, s.probe_options);
      json e = {{"x2", q.x2}, {"x3", q.x3}, {"expected", c.expected}};
      if (c.status == ProbeStatus::skipped_vertical_line) {
        e["status"] = "skipped_vertical_line";
      } else {
        ++measured;
        const bool pass = c.angle > 0.0 && std::fabs(c.angle - c.expected) <= tol.cone;
        ok = ok && pass;
        e["status"] = pass ? "pass" : "fail";
        e["angle"] = c.angle;
        e["heights"] = c.heights;
        e["radii"] = c.radii;
        e["ratios"] = c.ratios;
      }
      per.push_back(e);
    }
    if (measured == 0) {
      auto r = skipped("cone_probes", "every probe lies on a charge's vertical line");
      r.measured = {{"probes", per}};
      return r;
    }
    auto r = make("cone_probes", ok);
    r.measured = {{"probes", per}};
    r.tolerance = {{"absolute", tol.cone}};
    return r;
  }

  CheckResult quasi_isometry() {
    const auto& q = s.quasi_isometry;
    const auto a = far_samples(q.Z0, q.R0, q.samples, o.seed + 2);
    const auto b = far_samples(q.Z0, q.R0, q.samples, o.seed + 3);
    const QuasiIsometryReport ra = quasi_isometry_check(*g, beta, a);
    const QuasiIsometryReport rb = quasi_isometry_check(*g, beta, b);
    const double spread = std::fabs(ra.c - rb.c);
    bool ok = std::isfinite(ra.c) && std::isfinite(rb.c);
    json t = json::object();
    if (tol.quasi_isometry_spread) {
      ok = ok && spread <= *tol.quasi_isometry_spread;
      t["spread"] = *tol.quasi_isometry_spread;
    }
    if (tol.quasi_isometry_target) {
      ok = ok && std::fabs(ra.c - *tol.quasi_isometry_target) <= tol.pointwise * 10.0;
      t["target"] = *tol.quasi_isometry_target;
      t["target_slack"] = tol.pointwise * 10.0;
    }
    auto r = make("quasi_isometry", ok);
    r.measured = {{"Z0", q.Z0},
                  {"R0", q.R0},
                  {"samples", ra.samples},
                  {"c", finite_or_null(ra.c)},
                  {"c_second_set", finite_or_null(rb.c)},
                  {"spread", finite_or_null(spread)},
                  {"lambda_min", ra.lambda_min},
                  {"lambda_max", ra.lambda_max}};
    r.tolerance = t;
    return r;
  }

  struct ShotRun {
    std::vector<GeodesicState> starts;
    std::vector<GeodesicReport> reports;
  };

  ShotRun shoot() {
    const auto& gs = s.geodesics;
    ShotRun run;
    if (gs.random) run.starts = random_shots(*g, gs.lo, gs.hi, gs.zmin, gs.random, o.seed + 4);
    if (gs.adversarial)
      for (const auto& st : adversarial_shots(*g, gs.lo, gs.hi, gs.zmin, gs.adversarial, o.seed + 5))
        run.starts.push_back(st);
    for (std::size_t i = 0; i < run.starts.size(); ++i) {
      run.reports.push_back(geodesic_integrate(*g, run.starts[i], gs.length, gs.options));
      log("  shot " + std::to_string(i + 1) + "/" + std::to_string(run.starts.size()) + " " +
          to_string(run.reports.back().status));
    }
    return run;
  }

  CheckResult geodesics(const ShotRun& run) {
    const auto& gs = s.geodesics;
    if (run.starts.empty()) return skipped("geodesics", "no shots configured");
    std::size_t reached = 0, switches = 0, steps = 0;
    double drift = 0.0, oracle = 0.0;
    const bool use_oracle = gs.cone_oracle && beta.is_constant() && s.charges.empty();
    json per = json::array();
    for (std::size_t i = 0; i < run.starts.size(); ++i) {
      const auto& rep = run.reports[i];
      reached += rep.status == GeodesicStatus::reached_length;
      drift = std::max(drift, rep.max_drift);
      switches += rep.gauge_switches;
      steps += rep.steps;
      json e = {{"status", to_string(rep.status)},
                {"start", rep.trajectory.empty() ? json(run.starts[i].x) : json(rep.trajectory.front().x)},
                {"end", rep.final_state.x},
                {"length", rep.final_state.length},
                {"max_drift", rep.max_drift},
                {"steps", rep.steps}};
      if (use_oracle) {
        const auto x = cone_geodesic(beta.beta_at_infinity(), run.starts[i], rep.final_state.length);
        double err = 0.0;
        for (int a = 0; a < 4; ++a) err = std::max(err, std::fabs(x[a] - rep.final_state.x[a]));
        oracle = std::max(oracle, err);
        e["cone_oracle_error"] = err;
      }
      per.push_back(e);
    }
    bool ok = reached == run.starts.size() && drift <= tol.drift;
    json t = {{"drift", tol.drift}, {"reached", run.starts.size()}};
    json m = {{"shots", run.starts.size()},       {"reached", reached}, {"max_drift", drift},
              {"gauge_switches", switches},        {"steps", steps},     {"length", gs.length},
              {"random", gs.random},               {"adversarial", gs.adversarial}, {"per_shot", per}};
    if (use_oracle) {
      ok = ok && oracle <= tol.cone_oracle;
      m["cone_oracle_error"] = oracle;
      t["cone_oracle"] = tol.cone_oracle;
    }
    auto r = make("geodesics", ok);
    r.measured = m;
    r.tolerance = t;
    return r;
  }

  CheckResult conformal_remainder_check() {
    if (s.remainder.feet.empty()) return skipped("conformal_remainder", "no feet configured");
    json per = json::array();
    bool ok = true;
    for (const auto& f : s.remainder.feet) {
      std::vector<double> coord, model;
      for (double z : s.remainder.heights) {
        const HPoint p = make_hpoint(z, f.x2, f.x3);
        const ConformalRemainder c = conformal_remainder(A->jet(p), beta, p);
        coord.push_back(c.coordinate);
        model.push_back(c.model);
      }
      double mx = 0.0;
      bool finite = true;
      for (double v : coord) {
        finite = finite && std::isfinite(v);
        mx = std::max(mx, v);
      }
      const bool bounded = finite && mx <= tol.remainder_growth * std::max(coord.front(), 1e-12);
      ok = ok && bounded;
      per.push_back({{"foot", {f.x2, f.x3}}, {"coordinate", coord}, {"model", model}, {"bounded", bounded}});
    }
    auto r = make("conformal_remainder", ok);
    r.measured = {{"heights", s.remainder.heights}, {"feet", per}};
    r.tolerance = {{"growth", tol.remainder_growth}};
    r.note = "asserted in chart components; the g_beta operator norm is reported only";
    return r;
  }

  // ---- grids ----

  std::vector<GridPair> sample_grids() {
    std::vector<GridPair> out;
    const ChartField f = chart_field(*g);
    for (const auto& spec : s.grids) {
      log("grid " + spec.name);
      const auto t0 = std::chrono::steady_clock::now();
      FieldGrid coarse(f, spec.box, spec.h);
      FieldGrid fine(f, spec.box, 0.5 * spec.h);
      timings.emplace_back("grid:" + spec.name,
                           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      out.push_back({spec, std::move(coarse), std::move(fine)});
    }
    return out;
  }

  std::pair<CheckResult, CheckResult> grid_checks(const std::vector<GridPair>& grids) {
    if (grids.empty())
      return {skipped("curvature", "no grids configured"), skipped("kahler", "no grids configured")};
    json cur = json::array(), kah = json::array();
    bool ok_s = true, ok_k = true;
    for (const auto& gp : grids) {
      const CurvatureReport r = analyse_grids(gp.coarse, gp.fine);
      const bool s_ok = r.max_error <= tol.curvature &&
                        order_ok(r.max_error, r.max_error_fine, r.order, tol, tol.rounding_floor);
      const bool k_ok = r.kahler_residual <= tol.kahler &&
                        order_ok(r.kahler_residual, r.kahler_residual_fine, r.kahler_order, tol, tol.rounding_floor);
      ok_s = ok_s && s_ok;
      ok_k = ok_k && k_ok;
      const auto n = gp.coarse.shape();
      const json box = {{"lo", point_json(gp.spec.box.lo)}, {"hi", point_json(gp.spec.box.hi)}};
      cur.push_back({{"grid", gp.spec.name},
                     {"box", box},
                     {"h", r.h},
                     {"shape", {n[0], n[1], n[2]}},
                     {"interior_points", r.points.size()},
                     {"max_abs_s", r.max_error},
                     {"max_abs_s_fine", r.max_error_fine},
                     {"order", finite_or_null(r.order)},
                     {"pass", s_ok}});
      kah.push_back({{"grid", gp.spec.name},
                     {"h", r.h},
                     {"residual", r.kahler_residual},
                     {"residual_fine", r.kahler_residual_fine},
                     {"order", finite_or_null(r.kahler_order)},
                     {"pass", k_ok}});
    }
    auto c = make("curvature", ok_s);
    c.measured = {{"grids", cur}};
    c.tolerance = {{"max_abs_s", tol.curvature}, {"order", tol.order}, {"rounding_floor", tol.rounding_floor}};
    auto k = make("kahler", ok_k);
    k.measured = {{"grids", kah}};
    k.tolerance = {{"residual", tol.kahler}, {"order", tol.order}, {"rounding_floor", tol.rounding_floor}};
    return {c, k};
  }

  std::map<std::string, CheckResult> non_grid_checks() {
    std::map<std::string, CheckResult> out;
    const auto run = [&](const std::string& name, auto&& f) {
      if (s.enabled(name)) out[name] = timed(name, f);
    };
    run("positivity", [&] { return positivity(); });
    run("harmonicity", [&] { return harmonicity(); });
    run("barrier", [&] { return barrier(); });
    run("max_principle", [&] { return max_principle(); });
    run("flux", [&] { return flux_check(); });
    run("flux_additivity", [&] { return flux_additivity(); });
    run("dA_equals_F", [&] { return dA_equals_F(); });
    run("stokes", [&] { return stokes(); });
    run("decay_z2", [&] { return decay_z2(); });
    run("decay_dA", [&] { return decay_dA(); });
    run("closedness", [&] { return closedness(); });
    run("coframe", [&] { return coframe(); });
    run("omega_wedge", [&] { return omega_wedge(); });
    run("complex_structure", [&] { return complex_structure(); });
    run("ansatz", [&] { return ansatz(); });
    run("compatibility", [&] { return compatibility(); });
    run("cone_probes", [&] { return cone_probes(); });
    run("quasi_isometry", [&] { return quasi_isometry(); });
    run("geodesics", [&] { return geodesics(shoot()); });
    run("conformal_remainder", [&] { return conformal_remainder_check(); });
    run("theta_invariance", [&] { return theta_invariance(); });
    run("model_forms", [&] { return model_forms(); });
    return out;
  }

  bool wants_grids() const { return s.enabled("curvature") || s.enabled("kahler"); }

  RunReport assemble(std::map<std::string, CheckResult> results, const std::vector<GridPair>& grids) {
    if (wants_grids()) {
      const auto t0 = std::chrono::steady_clock::now();
      auto [c, k] = grid_checks(grids);
      timings.emplace_back("curvature+kahler",
                           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      if (s.enabled("curvature")) results["curvature"] = c;
      if (s.enabled("kahler")) results["kahler"] = k;
    }
    RunReport rep = skeleton();
    for (const auto& name : s.checks) rep.checks.push_back(results.at(name));
    rep.timings = timings;
    return rep;
  }
};

Runner::Runner(Scenario s, RunOptions o) : s_(std::move(s)), o_(std::move(o)) {
  impl_ = std::make_unique<Impl>(s_, o_);
}

Runner::~Runner() = default;

const MetricField& Runner::metric() const { return *impl_->g; }

RunReport Runner::verify() {
  impl_->timings.clear();
  auto results = impl_->non_grid_checks();
  std::vector<GridPair> grids;
  if (impl_->wants_grids()) grids = impl_->sample_grids();
  return impl_->assemble(std::move(results), grids);
}

RunReport Runner::solve() {
  impl_->timings.clear();
  auto results = impl_->non_grid_checks();
  std::vector<GridPair> grids = impl_->sample_grids();
  const auto dir = o_.out_dir / "cache";
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["schema_hash"] = cache_schema_hash();
  manifest["config_hash"] = o_.config_hash;
  manifest["code_version"] = code_version();
  manifest["seed"] = o_.seed;
  manifest["tol_scale"] = o_.tol_scale;
  manifest["checks"] = json::array();
  for (const auto& [name, r] : results) manifest["checks"].push_back(r.to_json());
  manifest["grids"] = json::array();
  for (const auto& gp : grids) {
    write_samples(dir / grid_file(gp.spec.name, false), gp.coarse);
    write_samples(dir / grid_file(gp.spec.name, true), gp.fine);
    std::ofstream csv(o_.out_dir / ("field_" + gp.spec.name + ".csv"));
    write_grid_csv(csv, gp.coarse);
    manifest["grids"].push_back({{"name", gp.spec.name}, {"h", gp.spec.h}});
  }
  manifest["timings"] = json::object();
  for (const auto& [k, v] : impl_->timings) manifest["timings"][k] = v;
  std::ofstream(dir / "manifest.json") << manifest.dump(1) << "\n";
  return impl_->assemble(std::move(results), grids);
}

RunReport Runner::report() {
  const auto dir = o_.out_dir / "cache";
  std::ifstream in(dir / "manifest.json");
  if (!in) throw CacheError("no cache in " + dir.string() + "; run solve first");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CacheError(std::string("unreadable cache manifest: ") + e.what());
  }
  const auto expect = [&](const char* key, const json& want) {
    if (!m.contains(key) || m[key] != want)
      throw CacheError(std::string("cache mismatch on ") + key + ": cached " + (m.contains(key) ? m[key].dump() : "none") +
                       ", current " + want.dump() + "; rerun solve");
  };
  expect("schema_hash", cache_schema_hash());
  expect("code_version", code_version());
  expect("config_hash", o_.config_hash);
  expect("seed", o_.seed);
  expect("tol_scale", o_.tol_scale);

  impl_->timings.clear();
  std::map<std::string, CheckResult> results;
  for (const auto& c : m.at("checks")) {
    CheckResult r = CheckResult::from_json(c);
    results[r.name] = r;
  }
  for (const auto& name : s_.checks)
    if (name != "curvature" && name != "kahler" && !results.count(name))
      throw CacheError("cache lacks check " + name + "; rerun solve");
  std::vector<GridPair> grids;
  if (m.at("grids").size() != s_.grids.size()) throw CacheError("cache holds a different set of grids");
  for (std::size_t i = 0; i < s_.grids.size(); ++i) {
    const auto& spec = s_.grids[i];
    if (m["grids"][i]["name"] != spec.name || m["grids"][i]["h"] != spec.h)
      throw CacheError("cache grid " + std::to_string(i) + " does not match the configuration");
    grids.push_back({spec, read_samples(dir / grid_file(spec.name, false), spec.box, spec.h),
                     read_samples(dir / grid_file(spec.name, true), spec.box, 0.5 * spec.h)});
  }
  for (auto it = m["timings"].begin(); it != m["timings"].end(); ++it)
    impl_->timings.emplace_back("cached:" + it.key(), it.value().get<double>());
  return impl_->assemble(std::move(results), grids);
}

RunReport Runner::probe_cone() {
  impl_->timings.clear();
  RunReport rep = impl_->skeleton();
  rep.checks.push_back(impl_->timed("cone_probes", [&] { return impl_->cone_probes(); }));
  rep.timings = impl_->timings;
  return rep;
}

RunReport Runner::geodesic() {
  impl_->timings.clear();
  Impl::ShotRun run;
  RunReport rep = impl_->skeleton();
  rep.checks.push_back(impl_->timed("geodesics", [&] {
    run = impl_->shoot();
    return impl_->geodesics(run);
  }));
  rep.timings = impl_->timings;
  std::filesystem::create_directories(o_.out_dir);
  std::ofstream csv(o_.out_dir / "geodesics.csv");
  csv.precision(17);
  csv << "shot,length,theta,z,x2,x3,p_theta,p_z,p_2,p_3,energy\n";
  for (std::size_t i = 0; i < run.reports.size(); ++i) {
    std::vector<GeodesicState> states = run.reports[i].trajectory;
    if (states.empty()) states = {run.starts[i], run.reports[i].final_state};
    for (const auto& st : states) {
      csv << i << ',' << st.length;
      for (double v : st.x) csv << ',' << v;
      for (double v : st.p) csv << ',' << v;
      csv << ',' << st.energy << '\n';
    }
  }
  return rep;
}

}  // namespace sfk
