#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "pinch/error.hpp"
#include "pinch/fattening.hpp"
#include "support.hpp"

using namespace pinch;
constexpr double kPi = std::numbers::pi;

namespace {

GridSet disk_mask(double cx, double cr, double rho, int nx) {
  GridSet s;
  s.grid = HalfPlaneGrid::square(-1.0, 1.0, 1.0, nx);
  s.mask.resize(s.grid.size());
  for (int j = 0; j <= s.grid.nr; ++j)
    for (int i = 0; i <= s.grid.nx; ++i)
      s.mask[s.grid.index(i, j)] = std::hypot(s.grid.x(i) - cx, s.grid.r(j) - cr) < rho;
  return s;
}

Scenario crosscheck_scenario(double gamma, double neck, int nx) {
  Scenario s;
  s.name = "crosscheck";
  s.n = 3;
  s.A = 1.0;
  s.profile = make_dumbbell_profile(gamma, 1.0, neck, 3);
  s.grid = HalfPlaneGrid::square(-1.2, 1.2, 0.8, nx);
  s.alpha = s.profile(neck / 2.0);
  s.inner_unit = 0.1;
  return s;
}

SelfSimilarBarrier n3_barrier() {
  SelfSimilarBarrier b;
  b.C = 1.3;
  b.rho = 1.1;
  b.n = 3;
  b.A = 1.0;
  find_tau0(b);
  return b;
}

}  // namespace

TEST_CASE("inscribed radius of discs") {
  for (int nx : {128, 256}) {
    const GridSet s = disk_mask(0.1, 0.5, 0.3, nx);
    CHECK(inscribed_radius(s) == doctest::Approx(0.3).epsilon(2.0 * s.grid.h() / 0.3));
    // The axis is not a boundary: a disc centred on it keeps its full radius.
    const GridSet half = disk_mask(0.0, 0.0, 0.4, nx);
    CHECK(inscribed_radius(half) == doctest::Approx(0.4).epsilon(2.0 * s.grid.h() / 0.4));
  }
  GridSet empty = disk_mask(0.0, 0.5, 0.3, 64);
  std::fill(empty.mask.begin(), empty.mask.end(), 0);
  CHECK(inscribed_radius(empty) == 0.0);
  std::fill(empty.mask.begin(), empty.mask.end(), 1);
  CHECK(std::isinf(inscribed_radius(empty)));
}

TEST_CASE("inscribed radius of an annulus band") {
  GridSet s = disk_mask(0.0, 0.0, 0.7, 256);
  const GridSet inner = disk_mask(0.0, 0.0, 0.5, 256);
  for (std::size_t k = 0; k < s.mask.size(); ++k) s.mask[k] = s.mask[k] && !inner.mask[k];
  CHECK(inscribed_radius(s) == doctest::Approx(0.1).epsilon(2.0 * s.grid.h() / 0.1));
}

TEST_CASE("contour length of a half circle") {
  const LevelSetField f = testing::sphere_field(0.5, 2, 1.0, 1.0, 256);
  CHECK(contour_length(zero_contour(f)) == doctest::Approx(kPi * 0.5).epsilon(1e-3));
}

TEST_CASE("scenario validation") {
  const auto suite = default_suite({256, 3});
  Scenario s = suite.front().scenario;
  CHECK_NOTHROW(s.validate());
  Scenario bad = s;
  bad.j_levels = 1;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = s;
  bad.n = 3;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = s;
  bad.grid = HalfPlaneGrid::square(-1.0, 1.0, 0.8, 256);
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = s;
  bad.j_levels = 8;
  CHECK_THROWS_AS(bad.validate(), ResolutionError);
}

TEST_CASE("default probe times") {
  const auto suite = default_suite({256, 3});
  CHECK(default_probe_time(suite[0].scenario) == doctest::Approx(0.02));
  const Scenario& cone = suite[5].scenario;
  REQUIRE(cone.barrier.has_value());
  const double T = admissible_blowdown(*cone.barrier, cone.profile);
  CHECK(default_probe_time(cone) == doctest::Approx(0.25 * T));
  CHECK(barrier_above_profile(*cone.barrier, cone.profile, T));
  Scenario no_time = suite[4].scenario;
  no_time.t_probe = 0.0;
  CHECK_THROWS_AS(default_probe_time(no_time), ParameterError);
}

TEST_CASE("verdict suite at baseline resolution") {
  DetectOptions opts;
  opts.threads = 2;
  const auto suite = default_suite({256, 3});
  const auto results = reproduce_tables(suite, opts);
  REQUIRE(results.size() == 6);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    INFO(r.name);
    CHECK(r.verdict_ok);
    CHECK(r.components_ok);
    CHECK(r.report.sandwich_violations == 0);
    CHECK(r.report.level_monitor.passed());
    if (r.report.graph_monitor) CHECK(r.report.graph_monitor->passed());
    for (std::size_t j = 1; j < r.report.gap_area.size(); ++j)
      CHECK(r.report.gap_area[j] <= r.report.gap_area[j - 1]);
    if (r.report.verdict == Verdict::fattening)
      CHECK(r.report.max_ball_radius >= r.report.ball_threshold);
    if (r.report.assumption == Assumption::A_minus) {
      REQUIRE(r.report.extrapolated_boundary_gap.has_value());
      CHECK(*r.report.extrapolated_boundary_gap <= 2.0 * suite[k].scenario.grid.h());
    }
  }
  CHECK(results[0].report.assumption == Assumption::A_plus);
  CHECK(results[1].report.assumption == Assumption::A_plus);
  CHECK(results[2].report.assumption == Assumption::A_minus);
  CHECK(results[3].report.assumption == Assumption::A_minus);

  const auto dir = std::filesystem::temp_directory_path();
  write_verdict_csv((dir / "pinch_verdicts.csv").string(), results);
  std::ifstream in(dir / "pinch_verdicts.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "scenario,expected,verdict,components_open,components_closed,assumption,passed");
  write_report_json((dir / "pinch_report.json").string(), results[0].report);
  std::ifstream js(dir / "pinch_report.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j.at("verdict") == "fattening");
  CHECK(j.at("evidence").size() == 3);
}

TEST_CASE("barrier excludes the origin from the closed evolution") {
  const Scenario s = crosscheck_scenario(kPi / 6.0, 0.45, 256);
  const CrosscheckReport r = barrier_crosscheck(s, n3_barrier(), 6);
  CHECK(r.certified);
  CHECK(r.t_probe == doctest::Approx(0.25 * r.T));
  for (const auto& q : r.snapshots) {
    CHECK(q.origin_outside);
    CHECK(q.min_separation >= 1.0);
  }
}

TEST_CASE("crosscheck preconditions") {
  const SelfSimilarBarrier b = n3_barrier();
  Scenario s = crosscheck_scenario(kPi / 6.0, 0.45, 128);
  SelfSimilarBarrier late = b;
  late.T = 0.99 * std::exp(-b.tau0);
  CHECK_THROWS_AS(barrier_crosscheck(s, late), PreconditionError);
  Scenario steep = crosscheck_scenario(kPi / 3.0, 0.45, 128);
  CHECK_THROWS_AS(barrier_crosscheck(steep, b), PreconditionError);
  Scenario other = s;
  other.A = 2.0;
  CHECK_THROWS_AS(barrier_crosscheck(other, b), PreconditionError);
}
