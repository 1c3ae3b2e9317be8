#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pinch/barriers.hpp"
#include "pinch/error.hpp"
#include "pinch/profiles.hpp"
#include "support.hpp"

using namespace pinch;
constexpr double kPi = std::numbers::pi;

TEST_CASE("cylinder at the equilibrium radius stays constant") {
  const RadiusResult r = integrate_radius({RadiusKind::cylinder, 2, 1.0, 1.0}, 5.0);
  CHECK(!r.extinct);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cylinder extinction time matches the separated-variables quadrature") {
  for (int n : {2, 3, 5}) {
    for (double A : {0.5, 1.0, 2.0}) {
      const double a0 = 0.5 * (n - 1) / A;
      const double oracle =
          testing::simpson([&](double a) { return a / ((n - 1) - A * a); }, 0.0, a0);
      const auto T = extinction_time({RadiusKind::cylinder, n, A, a0});
      REQUIRE(T.has_value());
      CHECK(std::abs(*T - oracle) < 1e-6);
      const RadiusResult r = integrate_radius({RadiusKind::cylinder, n, A, a0}, 2.0 * oracle);
      CHECK(r.extinct);
      CHECK(r.bracket_hi - r.bracket_lo <= 2e-8);
      CHECK(r.bracket_lo <= oracle + 1e-6);
      CHECK(r.bracket_hi >= oracle - 1e-6);
    }
  }
}

TEST_CASE("cylinder trichotomy around (n-1)/A") {
  const int n = 3;
  const double A = 1.0, star = 2.0;
  CHECK(integrate_radius({RadiusKind::cylinder, n, A, 0.9 * star}, 100.0).extinct);
  const RadiusResult eq = integrate_radius({RadiusKind::cylinder, n, A, star}, 3.0);
  CHECK(eq.value == doctest::Approx(star).epsilon(1e-10));
  double prev = 1.1 * star;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const RadiusResult up = integrate_radius({RadiusKind::cylinder, n, A, 1.1 * star}, t);
    CHECK(!up.extinct);
    CHECK(up.value > prev);
    prev = up.value;
  }
  CHECK(!extinction_time({RadiusKind::cylinder, n, A, 1.1 * star}).has_value());
}

TEST_CASE("shrinking ball decreases strictly and goes extinct") {
  for (double A : {0.0, 1.0, 3.0}) {
    const RadiusODE ode{RadiusKind::ball_shrink, 2, A, 0.4};
    const auto T = extinction_time(ode);
    REQUIRE(T.has_value());
    double prev = 0.4;
    for (int k = 1; k < 10; ++k) {
      const double v = integrate_radius(ode, *T * k / 10.0).value;
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("growing ball matches an independent RK4 integration") {
  const RadiusResult r = integrate_radius({RadiusKind::ball_grow, 2, 1.0, 0.5}, 0.05);
  CHECK(r.value == doctest::Approx(testing::rk4_ball(0.5, 2, 1.0, 0.05)).epsilon(1e-9));
}

TEST_CASE("sub-solution vanishes at the ends of its support") {
  const SubSolution s(0.1, 2, 1.0, 1e-2);
  const double t = 0.5 * s.valid_until();
  const double end = s.R0() + s.R_of(t);
  CHECK(s.value(end, t) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK(s.value(-end, t) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK_THROWS_AS(s.value(1.01 * end, t), DomainError);
  CHECK_THROWS_AS(s.value(0.0, 2.0 * s.valid_until()), DomainError);
}

TEST_CASE("sub-solution pieces match to first order at the junction") {
  const SubSolution s(0.1, 2, 1.0, 1e-2);
  for (int k = 1; k <= 20; ++k) {
    const double t = s.valid_until() * k / 21.0;
    const double xm = s.matching_point(t);
    const auto in = s.inner_piece(xm, t);
    const auto cap = s.cap_piece(xm, t);
    CHECK(std::abs(in.value - cap.value) / std::max(1.0, std::abs(in.value)) < 1e-10);
    CHECK(std::abs(in.slope - cap.slope) / std::max(1.0, std::abs(in.slope)) < 1e-10);
  }
}

TEST_CASE("sub-solution residual is negative in the inner piece") {
  const SubSolution s(0.1, 2, 1.0, 1e-2);
  for (int k = 1; k <= 30; ++k) {
    const double t = s.valid_until() * k / 31.0;
    const double xm = s.matching_point(t);
    for (double frac : {0.0, 0.3, 0.7, 0.99})
      CHECK(s.residual(frac * xm, t) < 0.0);
  }
  CHECK_THROWS_AS(s.residual(s.matching_point(1e-7), 1e-7), DomainError);
}

TEST_CASE("sub-solution residual at the pinch blows down like t^(-3/4)") {
  const SubSolution s(0.1, 2, 1.0, 1e-2);
  double prev = 0.0;
  for (double t : {1e-10, 1e-11, 1e-12, 1e-13}) {
    const double scaled = s.residual(0.0, t) * std::pow(t, 0.75);
    CHECK(scaled < 0.0);
    if (prev != 0.0) CHECK(scaled == doctest::Approx(prev).epsilon(0.1));
    prev = scaled;
  }
}

TEST_CASE("spherical cap piece solves the graph equation") {
  const SubSolution s(0.1, 3, 2.0, 1e-2);
  const double t = 0.5 * s.valid_until();
  const double xm = s.matching_point(t);
  const double R = s.R_of(t);
  for (double frac : {0.2, 0.5, 0.8}) {
    const double x = xm + frac * (s.R0() + R - xm);
    CHECK(std::abs(s.residual(x, t)) < 1e-6 * (1.0 + s.n() / R));
  }
}

TEST_CASE("neck height of the sub-solution grows like t^(3/8)") {
  const SubSolution s(0.1, 2, 1.0, 1e-2);
  double lower = 1e300;
  for (int k = 0; k <= 40; ++k) {
    const double t = 1e-6 * std::pow(1e4, k / 40.0);
    if (t >= s.valid_until()) break;
    lower = std::min(lower, s.value(0.0, t) / std::pow(t, 0.375));
  }
  CHECK(lower > 0.0);
}

TEST_CASE("super-solution admissibility") {
  CHECK(validate_supersolution_params({1.3, 1.1, 3, 1.0}).valid);
  const ValidationReport bad = validate_supersolution_params({1.0, 1.1, 3, 1.0});
  CHECK(!bad.valid);
  CHECK(!bad.violations.empty());
  CHECK(validate_supersolution_params({1.099, 1.095, 2, 1.0, 0.9, 0.1}).valid);
  CHECK(!validate_supersolution_params({1.2, 1.095, 2, 1.0, 0.9, 0.1}).valid);
  CHECK(!validate_supersolution_params({1.5, 1.4, 3, 1.0}).valid);
}

TEST_CASE("super-solution residual closed form matches direct evaluation") {
  for (const SelfSimilarBarrier& b :
       {SelfSimilarBarrier{1.3, 1.1, 3, 1.0}, SelfSimilarBarrier{1.099, 1.095, 2, 0.7, 0.9, 0.1}}) {
    for (double tau : {0.0, 1.0, 3.0}) {
      for (double z : chebyshev_samples(b.rho, 33)) {
        const double q = std::sqrt(b.rho * b.rho - z * z);
        const double w = b.C - q, wz = z / q, wzz = b.rho * b.rho / (q * q * q);
        const double rhs = wzz / (1.0 + wz * wz) - z * wz + w - (b.n - 1) / w +
                           std::sqrt(2.0) * b.A * std::exp(-tau) * std::sqrt(1.0 + wz * wz);
        CHECK(supersolution_residual(b, z, tau) == doctest::Approx(-rhs).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("super-solution residual positive beyond tau0") {
  SelfSimilarBarrier b{1.3, 1.1, 3, 1.0};
  const double tau0 = find_tau0(b);
  CHECK(b.tau0 == tau0);
  CHECK(supersolution_residual(b, 0.0, tau0 + 1.0) > 0.0);
  for (double tau : {tau0, tau0 + 0.1, tau0 + 2.0})
    for (double z : chebyshev_samples(b.rho, 257)) CHECK(supersolution_residual(b, z, tau) > 0.0);
  bool negative = false;
  for (double z : chebyshev_samples(b.rho, 257))
    negative = negative || supersolution_residual(b, z, tau0 - 5.0) < 0.0;
  CHECK(negative);
}

TEST_CASE("tau0 vanishes without forcing and grows with A") {
  SelfSimilarBarrier b0{1.3, 1.1, 3, 0.0};
  CHECK(find_tau0(b0) == 0.0);
  double prev = -1e300;
  for (double A : {0.5, 1.0, 2.0, 4.0}) {
    SelfSimilarBarrier b{1.3, 1.1, 3, A};
    const double t0 = find_tau0(b);
    CHECK(t0 > prev);
    prev = t0;
  }
}

TEST_CASE("n = 2 closed-form bound") {
  const double theta = 0.9, eps0 = 0.1;
  const double direct = (2.0 * theta * eps0 - 9.0 * eps0 * eps0) / (1.0 + theta * eps0);
  CHECK(std::abs(n2_lower_bound(theta, eps0) - direct) < 1e-12);
  CHECK(direct > 0.0);
  for (double rho : {1.091, 1.093, 1.095})
    for (double C : {rho + 1e-4, 1.097, 1.0999})
      if (C > rho) CHECK(n2_quadratic_minimum(C, rho) >= direct);
}

TEST_CASE("self-similar barrier values") {
  SelfSimilarBarrier b{1.3, 1.1, 3, 1.0};
  find_tau0(b);
  b.T = 0.5 * std::exp(-b.tau0);
  for (double t : {0.0, 0.5 * b.T, 0.9 * b.T}) {
    const double L = std::sqrt(2.0 * (b.T - t));
    CHECK(selfsimilar_barrier_value(b, 0.0, t) == doctest::Approx(L * (b.C - b.rho)));
    CHECK(selfsimilar_barrier_value(b, b.rho * L, t) == doctest::Approx(L * b.C));
    CHECK(selfsimilar_barrier_value(b, -b.rho * L, t) == doctest::Approx(L * b.C));
  }
  SelfSimilarBarrier late = b;
  late.T = 1.1 * std::exp(-b.tau0);
  CHECK_THROWS(selfsimilar_barrier_value(late, 0.0, 0.0));
}

TEST_CASE("envelope cone") {
  CHECK(envelope_slope(std::sqrt(2.0), 1.0) == doctest::Approx(1.0));
  CHECK(envelope_slope(1.0 + 1e-9, 1.0) < 1e-4);
  CHECK_THROWS_AS(envelope_slope(1.0, 1.1), ParameterError);
  // Lower envelope of the family lambda * w(x / lambda) is the cone.
  const double C = 1.3, rho = 1.1, slope = envelope_slope(C, rho);
  for (double x : {0.1, 0.5, 1.0}) {
    double best = 1e300;
    for (int k = 1; k <= 200000; ++k) {
      const double lambda = x / rho * (1.0 + 4.0 * k / 200000.0);
      const double z = x / lambda;
      best = std::min(best, lambda * (C - std::sqrt(rho * rho - z * z)));
    }
    CHECK(best == doctest::Approx(slope * x).epsilon(1e-6));
  }
}

TEST_CASE("critical angles") {
  CHECK(critical_angle(3) == kPi / 4.0);
  CHECK(critical_angle(11) == doctest::Approx(std::atan(3.0)).epsilon(1e-15));
  CHECK(critical_angle(2, 0.1) == doctest::Approx(std::atan(std::sqrt(1.1 * 1.1 - 1.0))));
  for (int n = 2; n < 20; ++n) CHECK(critical_angle(n + 1) > critical_angle(n));
  CHECK(critical_angle(100000) > kPi / 2.0 - 1e-2);
  CHECK_THROWS_AS(critical_angle(1), ParameterError);
}

TEST_CASE("barrier above the profile at the initial time") {
  const ProfileCurve p = make_dumbbell_profile(kPi / 6.0, 1.0, 0.45, 3, 2048);
  SelfSimilarBarrier b{1.3, 1.1, 3, 1.0};
  find_tau0(b);
  CHECK(barrier_above_profile(b, p, 0.01));
  CHECK(!barrier_above_profile(b, p, 0.9 * std::exp(-b.tau0)));
}
