#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pinch/barriers.hpp"
#include "pinch/error.hpp"
#include "pinch/graphflow.hpp"
#include "pinch/profiles.hpp"
#include "support.hpp"

using namespace pinch;
constexpr double kPi = std::numbers::pi;

TEST_CASE("tracked sphere follows the radius ODE and stays symmetric") {
  const ProfileCurve p = make_sphere_profile(0.0, 0.5, 0.59, 2, 16384);
  const FreeBoundarySolution s = evolve_free_boundary(p, 2, 1.0, 0.05, 0.005);
  const double R = testing::rk4_ball(0.5, 2, 1.0, 0.05);
  CHECK(s.horizon() == doctest::Approx(0.05));
  CHECK(s.b_star.back() == doctest::Approx(R).epsilon(0.01));
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    CHECK(std::abs(s.a_star[k] + s.b_star[k]) < 1e-10);
    CHECK(s.a_star[k] < s.b_star[k]);
    CHECK(s.curves[k].front()[1] == 0.0);
    CHECK(s.curves[k].back()[1] == 0.0);
    for (std::size_t i = 1; i + 1 < s.curves[k].size(); ++i) CHECK(s.curves[k][i][1] > 0.0);
  }
}

TEST_CASE("sphere of radius n/A is stationary under front tracking") {
  const ProfileCurve p = make_sphere_profile(0.0, 2.0, 2.2, 2, 16384);
  const FreeBoundarySolution s = evolve_free_boundary(p, 2, 1.0, 0.1, 0.02);
  CHECK(s.b_star.back() == doctest::Approx(2.0).epsilon(0.002));
  CHECK(s.a_star.back() == doctest::Approx(-2.0).epsilon(0.002));
}

TEST_CASE("endpoint speed at a round pinch approaches curvature minus A") {
  const ProfileCurve p = right_lobe(make_dumbbell_profile(kPi / 2.0, 1.0, 0.25, 2, 8192));
  const double kappa = curvature_at_origin(make_dumbbell_profile(kPi / 2.0, 1.0, 0.25, 2, 8192));
  double prev_err = 1e300;
  for (double ds : {0.004, 0.002}) {
    GraphflowOptions go;
    go.snapshot_times = {0.002};
    const FreeBoundarySolution s = evolve_free_boundary(p, 2, 1.0, 0.002, ds, go);
    const double err = std::abs(endpoint_speed(s, 0.002) - (kappa - 1.0)) / (kappa - 1.0);
    CHECK(err < 0.1);
    CHECK(err <= prev_err + 0.01);
    prev_err = err;
  }
}

TEST_CASE("assumption classification follows the sign of curvature minus A") {
  const ProfileCurve plus = right_lobe(make_dumbbell_profile(kPi / 2.0, 1.0, 0.25, 2, 8192));
  const FreeBoundarySolution sp = evolve_free_boundary(plus, 2, 1.0, 0.04, 0.004);
  CHECK(classify_assumption(sp, 0.04) == Assumption::A_plus);
  const ProfileCurve minus = right_lobe(make_dumbbell_profile(kPi / 2.0, 1.0, 0.4, 2, 8192));
  const FreeBoundarySolution sm = evolve_free_boundary(minus, 2, 8.0, 0.04, 0.004);
  CHECK(classify_assumption(sm, 0.04) == Assumption::A_minus);
  CHECK_THROWS_AS(classify_assumption(sm, 1.0), HorizonError);
}

TEST_CASE("endpoint noise within the tolerance is undetermined") {
  FreeBoundarySolution s;
  s.ds = 0.01;
  for (int k = 0; k <= 20; ++k) {
    s.times.push_back(0.001 * k);
    s.a_star.push_back(k == 0 ? 0.0 : (k % 2 ? 0.01 : -0.01));
    s.b_star.push_back(1.0);
    s.curves.push_back({{s.a_star.back(), 0.0}, {0.5, 0.5}, {1.0, 0.0}});
  }
  CHECK(classify_assumption(s, 0.02) == Assumption::undetermined);
  s.a_star.assign(s.a_star.size(), 0.0);
  CHECK(classify_assumption(s, 0.02) == Assumption::undetermined);
}

TEST_CASE("cap speed estimate") {
  CHECK(cap_speed_estimate(kPi / 4.0, 1.0, 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0));
  double prev = -1e300;
  for (double r : {1.0, 0.5, 0.1, 0.01, 0.001}) {
    const double v = cap_speed_estimate(kPi / 6.0, 1.0, r);
    CHECK(v > prev);
    prev = v;
  }
  const double gamma = kPi / 3.0, A = 2.0;
  const double r0 = 1.0 / (A * std::cos(kPi / 2.0 - gamma));
  CHECK(cap_speed_estimate(gamma, A, r0) == doctest::Approx(0.0).scale(1.0));
  CHECK(cap_speed_estimate(gamma, A, 0.9 * r0) > 0.0);
  CHECK(cap_speed_estimate(gamma, A, 1.1 * r0) < 0.0);
  CHECK_THROWS_AS(cap_speed_estimate(kPi / 2.0, 1.0, 1.0), ParameterError);
}

TEST_CASE("cone tip is mollified and the evolution stays simple") {
  const ProfileCurve p = right_lobe(make_dumbbell_profile(kPi / 4.0, 1.0, 0.25, 1, 4096));
  const Polyline c = initial_curve(p, 0.002);
  CHECK(c.front()[1] == 0.0);
  CHECK(c.back()[1] == 0.0);
  CHECK(c.front()[0] > 0.0);
  CHECK(c.front()[0] < 6.0 * 0.002);
  const FreeBoundarySolution s = evolve_free_boundary(p, 1, 1.0, 0.02, 0.002);
  CHECK(s.horizon() == doctest::Approx(0.02));
  for (std::size_t k = 1; k < s.a_star.size(); ++k) CHECK(s.a_star[k] >= s.a_star[0] - 2.0 * 0.002);
}

TEST_CASE("gradient diagnostic is recorded") {
  const ProfileCurve p = make_sphere_profile(0.0, 0.5, 0.59, 2, 8192);
  const FreeBoundarySolution s = evolve_free_boundary(p, 2, 1.0, 0.02, 0.01);
  CHECK(s.max_slope.size() == s.times.size());
  CHECK(s.slope_violations == 0);
}
