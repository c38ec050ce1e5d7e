#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sfk/runner.hpp"

using namespace sfk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scenario(const std::string& name) { return fs::path(SFK_SCENARIO_DIR) / (name + ".json"); }

RunOptions options(const fs::path& config, const fs::path& out, std::uint64_t seed = 0) {
  RunOptions o;
  o.seed = seed;
  o.out_dir = out;
  o.config_hash = config_hash(slurp(config), config.parent_path());
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sfk_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("verify on the flat scenario") {
  const fs::path cfg = scenario("flat");
  const fs::path out = scratch("verify");
  Runner r(load_config(cfg), options(cfg, out));
  const RunReport rep = r.verify();
  CHECK(rep.all_passed());
  CHECK(rep.count(CheckStatus::fail) == 0);
  CHECK(validate_report(rep.to_json()).empty());
  CHECK(rep.checks.size() == kCheckNames.size());
  CHECK(rep.find("geodesics")->status == CheckStatus::pass);

  // Same seed, same bytes.
  Runner again(load_config(cfg), options(cfg, out));
  CHECK(again.verify().dump() == rep.dump());
}

TEST_CASE("solve then report reproduces verify") {
  const fs::path cfg = scenario("flat");
  const fs::path out = scratch("cache");
  const RunReport direct = Runner(load_config(cfg), options(cfg, out, 7)).verify();
  const RunReport solved = Runner(load_config(cfg), options(cfg, out, 7)).solve();
  CHECK(fs::exists(out / "cache" / "manifest.json"));
  CHECK(fs::exists(out / "field_main.csv"));
  const RunReport cached = Runner(load_config(cfg), options(cfg, out, 7)).report();
  CHECK(cached.dump() == direct.dump());
  CHECK(solved.dump() == direct.dump());

  // A different seed or configuration is refused.
  CHECK_THROWS_AS(Runner(load_config(cfg), options(cfg, out, 8)).report(), CacheError);
  const fs::path other = scenario("constant_cone");
  RunOptions o = options(other, out, 7);
  CHECK_THROWS_AS(Runner(load_config(other), o).report(), CacheError);
  CHECK_THROWS_AS(Runner(load_config(cfg), options(cfg, scratch("empty"), 7)).report(), CacheError);
}

TEST_CASE("probe-cone skips points on a charge's vertical line") {
  const fs::path cfg = scenario("one_blowup");
  const RunReport rep = Runner(load_config(cfg), options(cfg, scratch("probe"))).probe_cone();
  const CheckResult* c = rep.find("cone_probes");
  REQUIRE(c != nullptr);
  CHECK(c->status == CheckStatus::pass);
  bool skipped = false;
  for (const auto& p : c->measured.at("probes"))
    if (p.at("status") == "skipped_vertical_line") skipped = true;
  CHECK(skipped);
}

TEST_CASE("geodesic subcommand writes trajectories") {
  const fs::path cfg = scenario("flat");
  const fs::path out = scratch("geo");
  const RunReport rep = Runner(load_config(cfg), options(cfg, out)).geodesic();
  CHECK(rep.find("geodesics")->status == CheckStatus::pass);
  CHECK(fs::file_size(out / "geodesics.csv") > 0);
}
