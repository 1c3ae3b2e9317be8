#include <cmath>
#include <random>

#include "doctest.h"
#include "pinch/error.hpp"
#include "pinch/graphflow.hpp"
#include "pinch/intersection.hpp"
#include "pinch/profiles.hpp"

using namespace pinch;

namespace {

ProfileCurve on_mesh(double (*f)(double), double half = 1.0, int samples = 2000) {
  return sample_profile(f, half, 1, samples);
}

}  // namespace

TEST_CASE("separated curves do not intersect") {
  const ProfileCurve a = on_mesh([](double) { return 1.0; });
  const ProfileCurve b = on_mesh([](double) { return 0.5; });
  const CrossingCount c = intersection_number(a, b, -0.9, 0.9);
  CHECK(c.count == 0);
  CHECK(!c.degenerate);
}

TEST_CASE("parabola against a constant crosses twice") {
  const ProfileCurve a = on_mesh([](double x) { return x * x + 0.1; });
  const ProfileCurve b = on_mesh([](double) { return 0.3; });
  const CrossingCount c = intersection_number(a, b, -0.9, 0.9);
  REQUIRE(c.count == 2);
  CHECK(!c.degenerate);
  CHECK(c.locations[0] == doctest::Approx(-std::sqrt(0.2)).epsilon(1e-5));
  CHECK(c.locations[1] == doctest::Approx(std::sqrt(0.2)).epsilon(1e-5));
}

TEST_CASE("identical curves are degenerate") {
  const ProfileCurve a = on_mesh([](double x) { return 1.0 - x * x; });
  CHECK(intersection_number(a, a, -0.9, 0.9).degenerate);
}

TEST_CASE("tangential contact is degenerate, transversal zero is counted") {
  const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0, 4.0};
  const CrossingCount touch = count_crossings(xs, {1, 0.5, 0.3, 0.5, 1}, {0.3, 0.3, 0.3, 0.3, 0.3});
  CHECK(touch.degenerate);
  CHECK(touch.count == 0);
  const CrossingCount cross = count_crossings(xs, {1, 0.5, 0.3, 0.2, 0.1}, {0.3, 0.3, 0.3, 0.3, 0.3});
  CHECK(!cross.degenerate);
  CHECK(cross.count == 1);
}

TEST_CASE("intersection number is symmetric and translation invariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng), shift = 0.3 * U(rng);
    auto f = [&](double x, double p, double q) { return 1.0 + 0.5 * std::sin(3 * x + p) + 0.3 * q * x; };
    const ProfileCurve u = sample_profile([&](double x) { return f(x, a1, a2); }, 2.0, 1, 4000);
    const ProfileCurve v = sample_profile([&](double x) { return f(x, b1, b2); }, 2.0, 1, 4000);
    const ProfileCurve us = sample_profile([&](double x) { return f(x - shift, a1, a2); }, 2.0, 1, 4000);
    const ProfileCurve vs = sample_profile([&](double x) { return f(x - shift, b1, b2); }, 2.0, 1, 4000);
    const CrossingCount c12 = intersection_number(u, v, -1.0, 1.0);
    const CrossingCount c21 = intersection_number(v, u, -1.0, 1.0);
    CHECK(c12.count == c21.count);
    CHECK(c12.degenerate == c21.degenerate);
    const CrossingCount ct = intersection_number(us, vs, -1.0 + shift, 1.0 + shift);
    CHECK(ct.count == c12.count);
  }
}

TEST_CASE("curves beyond their support are extended by zero") {
  const ProfileCurve a = sample_profile([](double x) { return 0.5 - std::abs(x - 0.5); }, 2.0, 1, 4000);
  const ProfileCurve b = sample_profile([](double x) { return 0.5 - std::abs(x + 0.5); }, 2.0, 1, 4000);
  const CrossingCount c = intersection_number(a, b, -1.5, 1.5);
  CHECK(c.count == 1);
  CHECK(c.locations.front() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("monitor flags increases and exceedances") {
  auto counts = [](std::vector<int> zs, std::vector<bool> deg = {}) {
    std::vector<CrossingCount> out;
    for (std::size_t k = 0; k < zs.size(); ++k) {
      CrossingCount c;
      c.count = zs[k];
      c.degenerate = k < deg.size() && deg[k];
      out.push_back(c);
    }
    return out;
  };
  const std::vector<double> t = {0, 1, 2, 3, 4};
  CHECK(monitor_sequence(t, counts({4, 4, 2, 2, 0})).passed());
  CHECK(monitor_sequence(t, counts({2, 3, 2, 2, 2})).violations == 1);
  CHECK(monitor_sequence(t, counts({2, 0, 1, 2, 0})).violations == 1);
  CHECK(monitor_sequence(t, counts({2, 5, 2, 2, 2}, {false, true})).passed());
  CHECK_THROWS_AS(monitor_sequence({}, {}), InputError);
  CHECK_THROWS_AS(monitor_sequence({0.0}, counts({1, 2})), InputError);
}

TEST_CASE("disjoint and nested spheres keep zero intersections") {
  GraphflowOptions go;
  go.snapshot_times = {0.005, 0.01, 0.015, 0.02};
  const auto left = evolve_free_boundary(make_sphere_profile(-0.6, 0.4, 1.2, 2, 8000), 2, 1.0, 0.02, 0.01, go);
  const auto right = evolve_free_boundary(make_sphere_profile(0.6, 0.4, 1.2, 2, 8000), 2, 1.0, 0.02, 0.01, go);
  const MonitorReport d = monotonicity_monitor(left, right);
  CHECK(d.passed());
  for (const auto& e : d.entries) CHECK(e.Z == 0);
  const auto big = evolve_free_boundary(make_sphere_profile(0.0, 0.6, 1.2, 2, 8000), 2, 1.0, 0.02, 0.01, go);
  const auto small = evolve_free_boundary(make_sphere_profile(0.05, 0.4, 1.2, 2, 8000), 2, 1.0, 0.02, 0.01, go);
  const MonitorReport nested = monotonicity_monitor(big, small);
  CHECK(nested.passed());
  for (const auto& e : nested.entries) CHECK(e.Z == 0);
}

TEST_CASE("peanut against an offset sphere: intersections never increase") {
  GraphflowOptions go;
  for (int k = 0; k <= 10; ++k) go.snapshot_times.push_back(0.002 * k);
  const ProfileCurve peanut = sample_profile(
      [](double x) { return x * x < 1.0 ? std::sqrt(1.0 - x * x) * (0.35 + 0.4 * x * x) : 0.0; }, 1.2, 2,
      8000);
  const ProfileCurve sphere = make_sphere_profile(0.3, 0.45, 1.2, 2, 8000);
  const auto r1 = evolve_free_boundary(peanut, 2, 1.0, 0.02, 0.01, go);
  const auto r2 = evolve_free_boundary(sphere, 2, 1.0, 0.02, 0.01, go);
  const MonitorReport m = monotonicity_monitor(r1, r2);
  CHECK(m.entries.front().Z == 2);
  CHECK(m.passed());
  for (std::size_t k = 1; k < m.entries.size(); ++k)
    if (!m.entries[k].degenerate && !m.entries[k - 1].degenerate)
      CHECK(m.entries[k].Z <= m.entries[k - 1].Z);
}

TEST_CASE("monitor rejects runs without shared snapshots or parameters") {
  GraphflowOptions a, b;
  a.snapshot_times = {0.01};
  b.snapshot_times = {0.015};
  const auto r1 = evolve_free_boundary(make_sphere_profile(0.0, 0.4, 1.0, 2, 4000), 2, 1.0, 0.01, 0.02, a);
  const auto r2 = evolve_free_boundary(make_sphere_profile(0.0, 0.3, 1.0, 2, 4000), 2, 1.0, 0.015, 0.02, b);
  // Both runs store t = 0, so they overlap there.
  CHECK_NOTHROW(monotonicity_monitor(r1, r2));
  const auto r3 = evolve_free_boundary(make_sphere_profile(0.0, 0.3, 1.0, 2, 4000), 2, 2.0, 0.01, 0.02, a);
  CHECK_THROWS_AS(monotonicity_monitor(r1, r3), InputError);
}
