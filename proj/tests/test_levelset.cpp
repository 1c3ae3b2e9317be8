#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pinch/barriers.hpp"
#include "pinch/error.hpp"
#include "pinch/levelset.hpp"
#include "pinch/profiles.hpp"
#include "support.hpp"

using namespace pinch;
constexpr double kPi = std::numbers::pi;

namespace {

// Smooth random field: a sum of Gaussian bumps minus a constant, clamped.
LevelSetField random_field(const HalfPlaneGrid& g, std::mt19937_64& rng, int n, double A) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  LevelSetField f;
  f.grid = g;
  f.n = n;
  f.A = A;
  f.psi.assign(g.size(), -0.3);
  for (int b = 0; b < 4; ++b) {
    const double cx = g.x_min + (g.x_max - g.x_min) * (0.2 + 0.6 * U(rng));
    const double cr = g.r_max * 0.5 * U(rng);
    const double w = 0.1 + 0.2 * U(rng), amp = 0.2 + 0.5 * U(rng);
    for (int j = 0; j <= g.nr; ++j)
      for (int i = 0; i <= g.nx; ++i) {
        const double d2 = std::pow(g.x(i) - cx, 2) + std::pow(g.r(j) - cr, 2);
        f.at(i, j) += amp * std::exp(-d2 / (w * w));
      }
  }
  for (double& v : f.psi) v = std::clamp(v, -1.0, 1.0);
  return f;
}

// Radius of an x-independent tube at the middle column.
double tube_radius(const LevelSetField& f) {
  const HalfPlaneGrid& g = f.grid;
  const int i = g.nx / 2;
  for (int j = 0; j < g.nr; ++j) {
    const double a = f.at(i, j), b = f.at(i, j + 1);
    if (a > 0.0 && b <= 0.0) return g.r(j) + a / (a - b) * g.hr;
  }
  return 0.0;
}

LevelSetField tube_field(double alpha, int n, double A, int nx) {
  HalfPlaneGrid g = HalfPlaneGrid::square(-0.5, 0.5, 1.5, nx);
  g.periodic_x = true;
  LevelSetField f;
  f.grid = g;
  f.n = n;
  f.A = A;
  f.psi.resize(g.size());
  for (int j = 0; j <= g.nr; ++j)
    for (int i = 0; i <= g.nx; ++i) f.at(i, j) = std::clamp(alpha - g.r(j), -1.0, 1.0);
  return f;
}

}  // namespace

TEST_CASE("constant field is stationary") {
  LevelSetField f = testing::sphere_field(0.5, 2, 1.0, 1.0, 32);
  for (double& v : f.psi) v = 0.25;
  const LevelSetField g = step(f, stable_dt(f.grid, f.n, f.A));
  CHECK(g.psi == f.psi);
}

TEST_CASE("step rejects unstable time steps and invalid dimensions") {
  LevelSetField f = testing::sphere_field(0.5, 2, 1.0, 1.0, 32);
  CHECK_THROWS_AS(step(f, 2.0 * stable_dt(f.grid, f.n, f.A)), StabilityError);
  f.n = 0;
  CHECK_THROWS_AS(step(f, 1e-6), ParameterError);
}

TEST_CASE("evolve lands on the requested snapshot times") {
  const LevelSetField f = testing::sphere_field(0.5, 2, 1.0, 1.0, 32);
  CHECK(evolve(f, 0.0, {}).empty());
  const auto snaps = evolve(f, 0.02, {0.01, 0.02});
  REQUIRE(snaps.size() == 2);
  CHECK(snaps[0].t == 0.01);
  CHECK(snaps[1].t == 0.02);
  CHECK_THROWS_AS(evolve(f, 0.02, {0.02, 0.01}), ParameterError);
}

TEST_CASE("expanding sphere follows the radius ODE") {
  for (int n : {1, 2}) {
    const LevelSetField f = testing::sphere_field(0.5, n, 1.0, 1.0, 128);
    const auto snaps = evolve(f, 0.05, {0.05});
    const double R = testing::rk4_ball(0.5, n, 1.0, 0.05);
    CHECK(testing::axis_radius(snaps.back()) == doctest::Approx(R).epsilon(0.02));
  }
}

TEST_CASE("sphere of radius n/A is stationary") {
  const LevelSetField f = testing::sphere_field(2.0, 2, 1.0, 2.6, 128);
  const auto snaps = evolve(f, 0.1, {0.1});
  CHECK(testing::axis_radius(snaps.back()) == doctest::Approx(2.0).epsilon(0.005));
}

TEST_CASE("periodic tubes follow the cylinder ODE") {
  const LevelSetField eq = tube_field(1.0, 2, 1.0, 64);
  CHECK(tube_radius(evolve(eq, 0.1, {0.1}).back()) == doctest::Approx(1.0).epsilon(0.005));
  double prev_err = 1.0;
  for (int nx : {64, 128}) {
    const LevelSetField f = tube_field(0.5, 3, 1.0, nx);
    const double oracle = integrate_radius({RadiusKind::cylinder, 3, 1.0, 0.5}, 0.04).value;
    const double err = std::abs(tube_radius(evolve(f, 0.04, {0.04}).back()) - oracle) / oracle;
    CHECK(err < 0.02);
    CHECK(err <= prev_err);
    prev_err = err;
  }
}

TEST_CASE("discrete comparison on random ordered pairs") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const HalfPlaneGrid g = HalfPlaneGrid::square(-1.0, 1.0, 0.8, 48);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3;
    const double A = 2.0 * U(rng);
    const LevelSetField lo = random_field(g, rng, n, A);
    LevelSetField hi = lo;
    const LevelSetField bump = random_field(g, rng, n, A);
    for (std::size_t k = 0; k < hi.psi.size(); ++k)
      hi.psi[k] = std::min(1.0, hi.psi[k] + 0.3 * (bump.psi[k] + 1.0));
    const auto a = evolve(lo, 0.01, {0.005, 0.01});
    const auto b = evolve(hi, 0.01, {0.005, 0.01});
    for (std::size_t s = 0; s < a.size(); ++s)
      for (std::size_t k = 0; k < a[s].psi.size(); ++k) CHECK(a[s].psi[k] <= b[s].psi[k] + 1e-12);
  }
}

TEST_CASE("even data stays exactly even") {
  const ProfileCurve p = make_dumbbell_profile(kPi / 2.0, 1.0, 0.25, 2, 1024);
  const HalfPlaneGrid g = HalfPlaneGrid::square(-1.2, 1.2, 0.8, 96);
  LevelSetField f = signed_distance(p, g, 1.0);
  f.n = 2;
  f.A = 1.0;
  const LevelSetField e = evolve(f, 0.01, {0.01}).back();
  for (int j = 0; j <= g.nr; ++j)
    for (int i = 0; i <= g.nx; ++i) CHECK(e.at(i, j) == e.at(g.nx - i, j));
}

TEST_CASE("maximum principle and finiteness") {
  std::mt19937_64 rng(99);
  const HalfPlaneGrid g = HalfPlaneGrid::square(-1.0, 1.0, 0.8, 48);
  const LevelSetField f = random_field(g, rng, 2, 1.5);
  double lo = 1e300;
  for (double v : f.psi) lo = std::min(lo, v);
  const LevelSetField e = evolve(f, 0.02, {0.02}).back();
  for (double v : e.psi) {
    CHECK(std::isfinite(v));
    CHECK(v >= lo - 1e-12);
  }
}

TEST_CASE("semigroup property holds bitwise") {
  const LevelSetField f = testing::sphere_field(0.5, 2, 1.0, 1.0, 48);
  const auto direct = evolve(f, 0.02, {0.01, 0.02});
  const auto first = evolve(f, 0.01, {0.01});
  const auto second = evolve(first.back(), 0.02, {0.02});
  CHECK(direct[0].psi == first[0].psi);
  CHECK(direct[1].psi == second[0].psi);
}

TEST_CASE("open and closed sets") {
  LevelSetField f = testing::sphere_field(0.5, 2, 1.0, 1.0, 64);
  const GridSet open = extract_set(f, SetKind::open);
  const GridSet closed = extract_set(f, SetKind::closed);
  CHECK(closed.area() >= open.area());
  for (int j = 0; j <= f.grid.nr; ++j)
    for (int i = 0; i <= f.grid.nx; ++i) {
      if (open.at(i, j)) CHECK(closed.at(i, j));
      if (closed.at(i, j) && !open.at(i, j)) CHECK(std::abs(f.at(i, j)) < f.grid.h());
    }
  for (double& v : f.psi) v = -0.5;
  CHECK(extract_set(f, SetKind::open).count() == 0);
  CHECK(extract_set(f, SetKind::closed).count() == 0);
}

TEST_CASE("nested initial sets stay nested") {
  const LevelSetField a = testing::sphere_field(0.3, 2, 1.0, 1.0, 64);
  const LevelSetField b = testing::sphere_field(0.5, 2, 1.0, 1.0, 64);
  const GridSet ea = extract_set(evolve(a, 0.02, {0.02}).back(), SetKind::closed);
  const GridSet eb = extract_set(evolve(b, 0.02, {0.02}).back(), SetKind::closed);
  for (std::size_t k = 0; k < ea.mask.size(); ++k)
    if (ea.mask[k]) CHECK(eb.mask[k]);
}

TEST_CASE("connected components") {
  LevelSetField f = testing::sphere_field(0.3, 2, 1.0, 1.0, 64);
  for (double& v : f.psi) v = -1.0;
  CHECK(count_components(extract_set(f, SetKind::closed)) == 0);
  const HalfPlaneGrid& g = f.grid;
  for (int j = 0; j <= g.nr; ++j)
    for (int i = 0; i <= g.nx; ++i)
      f.at(i, j) = std::max(0.2 - std::hypot(g.x(i) - 0.5, g.r(j)), 0.2 - std::hypot(g.x(i) + 0.5, g.r(j)));
  CHECK(count_components(extract_set(f, SetKind::open)) == 2);
  f.n = 1;
  CHECK(count_components(extract_set(f, SetKind::open)) == 2);
}

TEST_CASE("flat pinch separates the closed evolution for n >= 2") {
  const ProfileCurve p = make_dumbbell_profile(0.0, 1.0, 0.2, 2, 2048);
  const HalfPlaneGrid g = HalfPlaneGrid::square(-1.2, 1.2, 0.8, 128);
  LevelSetField f = signed_distance(p, g, 1.0);
  f.n = 2;
  f.A = 0.5;
  const LevelSetField e = evolve(f, 0.01, {0.01}).back();
  CHECK(count_components(extract_set(e, SetKind::closed)) == 2);
}

TEST_CASE("zero set does not depend on the initial labelling") {
  const ProfileCurve sphere = make_sphere_profile(0.0, 0.5, 0.6, 2, 4096);
  const HalfPlaneGrid g = HalfPlaneGrid::square(-1.0, 1.0, 1.0, 128);
  CHECK(relabel_invariance_check(sphere, g, 0.02, 1.0, 2));
  const ProfileCurve neck = make_dumbbell_profile(kPi / 2.0, 1.0, 0.25, 2, 2048);
  const HalfPlaneGrid g2 = HalfPlaneGrid::square(-1.2, 1.2, 0.8, 128);
  CHECK(relabel_invariance_check(neck, g2, 0.01, 1.0, 2, 2.0));
}

TEST_CASE("contour of a circle and Hausdorff distance") {
  const LevelSetField f = testing::sphere_field(0.5, 2, 1.0, 1.0, 128);
  const auto c = zero_contour(f);
  REQUIRE(!c.empty());
  for (const auto& line : c)
    for (const auto& q : line) CHECK(std::hypot(q[0], q[1]) == doctest::Approx(0.5).epsilon(1e-3));
  const auto c2 = zero_contour(testing::sphere_field(0.6, 2, 1.0, 1.0, 128));
  CHECK(hausdorff(c, c2) == doctest::Approx(0.1).epsilon(0.02));
  CHECK(hausdorff(c, c) == 0.0);
}

TEST_CASE("grid dump round trip") {
  const LevelSetField f = testing::sphere_field(0.5, 3, 2.0, 1.0, 32);
  const auto base = (std::filesystem::temp_directory_path() / "pinch_dump").string();
  write_grid_dump(base, f);
  const LevelSetField g = read_grid_dump(base);
  CHECK(g.psi == f.psi);
  CHECK(g.n == 3);
  CHECK(g.A == 2.0);
  CHECK(g.grid.nx == f.grid.nx);
  CHECK(g.grid.nr == f.grid.nr);
  std::filesystem::remove(base + ".bin");
  std::filesystem::remove(base + ".json");
}
