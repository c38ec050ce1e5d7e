#pragma once

// Runs a scenario: the verification battery, the cache written by `solve`
// and read back by `report`, and the cone-probe and geodesic subcommands.
//
// Cache layout under <out>/cache: manifest.json (schema hash, config hash,
// code version, seed, tolerance scale, the non-grid check results) and two
// binary files per grid holding the samples at spacing h and h/2, 32
// native-endian doubles per node (g then omega, column-major), x3 fastest.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "sfk/config.hpp"
#include "sfk/report.hpp"

namespace sfk {

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string code_version();
// Hash of the cache layout and report schema; bumps whenever either changes.
std::string cache_schema_hash();

struct RunOptions {
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  std::filesystem::path out_dir = "out";
  std::string config_hash;
  std::function<void(const std::string&)> log;
};

class Runner {
 public:
  Runner(Scenario s, RunOptions o);
  ~Runner();

  RunReport verify();
  // verify, plus the cache and one CSV field dump per grid (spacing h).
  RunReport solve();
  // Rebuilds the verify report from the cache; throws CacheError when the
  // cache was written by another configuration, seed, tolerance scale or
  // code version.
  RunReport report();
  RunReport probe_cone();
  // Also writes geodesics.csv (recorded states of every shot) to out_dir.
  RunReport geodesic();

  const Scenario& scenario() const { return s_; }
  const MetricField& metric() const;

 private:
  struct Impl;
  Scenario s_;
  RunOptions o_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sfk
