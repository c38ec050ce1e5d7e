// Command-line front end: sfk solve|verify|probe-cone|geodesic|report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sfk/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sfk::ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void summarise(const sfk::RunReport& r) {
  for (const auto& c : r.checks) {
    std::printf("%-20s %s", c.name.c_str(), sfk::to_string(c.status).c_str());
    if (!c.note.empty() && c.status != sfk::CheckStatus::pass) std::printf("  (%s)", c.note.c_str());
    std::printf("\n");
  }
  std::printf("%zu passed, %zu failed, %zu skipped\n", r.count(sfk::CheckStatus::pass),
              r.count(sfk::CheckStatus::fail), r.count(sfk::CheckStatus::skipped));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scalar-flat Kahler metrics with varying cone angle: solve and verify scenarios"};
  app.require_subcommand(1);
  std::string config;
  std::uint64_t seed = 0;
  std::string out = "out";
  double tol_scale = 1.0;
  bool quiet = false;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed for every random sample")->capture_default_str();
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--tol-scale", tol_scale, "multiply every tolerance")->capture_default_str()->check(
        CLI::PositiveNumber);
    sub->add_flag("-q,--quiet", quiet, "no progress output");
  };
  auto* solve = app.add_subcommand("solve", "compute fields and checks, write the cache and CSV dumps");
  auto* verify = app.add_subcommand("verify", "run the full verification battery");
  auto* probe = app.add_subcommand("probe-cone", "measure cone angles at the configured divisor points");
  auto* geo = app.add_subcommand("geodesic", "shoot the configured geodesics and dump trajectories");
  auto* report = app.add_subcommand("report", "re-emit the verify report from the cache");
  for (auto* s : {solve, verify, probe, geo, report}) common(s);
  CLI11_PARSE(app, argc, argv);

  try {
    const std::string text = slurp(config);
    sfk::RunOptions opts;
    opts.seed = seed;
    opts.tol_scale = tol_scale;
    opts.out_dir = out;
    opts.config_hash = sfk::config_hash(text, std::filesystem::path(config).parent_path());
    if (!quiet) opts.log = [](const std::string& m) { std::fprintf(stderr, "%s\n", m.c_str()); };
    sfk::Runner runner(sfk::load_config(config), opts);
    sfk::RunReport r;
    if (*solve) r = runner.solve();
    else if (*verify) r = runner.verify();
    else if (*probe) r = runner.probe_cone();
    else if (*geo) r = runner.geodesic();
    else r = runner.report();
    r.write(out);
    summarise(r);
    return r.all_passed() ? 0 : 1;
  } catch (const sfk::SchemaError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
