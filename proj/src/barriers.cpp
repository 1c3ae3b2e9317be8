#include "pinch/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "pinch/error.hpp"

namespace pinch {

namespace {

// Adaptive Simpson on [a, b].
double simpson_rec(const std::function<double(double)>& g, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& g, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(g, a, b, fa, fm, fb, whole, tol, 50);
}

bool decreasing(const RadiusODE& ode) { return ode.rate(ode.value0) < 0.0; }

// Time needed to shrink from value0 down to v (decreasing trajectories).
double time_to_reach(const RadiusODE& ode, double v) {
  auto g = [&](double s) { return s <= 0.0 ? 0.0 : -1.0 / ode.rate(s); };
  return integrate(g, v, ode.value0, 1e-15);
}

void check_ode(const RadiusODE& ode) {
  if (!(ode.value0 > 0.0)) throw ParameterError("barriers", "value0 must be positive");
  if (ode.n < 1) throw ParameterError("barriers", "n must be >= 1");
}

}  // namespace

double RadiusODE::rate(double v) const {
  switch (kind) {
    case RadiusKind::cylinder: return A - (n - 1) / v;
    case RadiusKind::ball_shrink: return -A - n / v;
    case RadiusKind::ball_grow: return A - n / v;
  }
  return 0.0;
}

std::optional<double> extinction_time(const RadiusODE& ode) {
  check_ode(ode);
  if (!decreasing(ode)) return std::nullopt;
  return time_to_reach(ode, 0.0);
}

RadiusResult integrate_radius(const RadiusODE& ode, double t) {
  check_ode(ode);
  if (t < 0.0) throw ParameterError("barriers", "t must be non-negative");
  RadiusResult res;
  const double r0 = ode.rate(ode.value0);
  if (r0 == 0.0 || t == 0.0) {
    res.value = ode.value0;
    return res;
  }
  if (r0 < 0.0) {
    // dt/dv = 1/v' is smooth down to v = 0, so integrate in v.
    const double T = time_to_reach(ode, 0.0);
    const double half = std::abs(T - integrate([&](double s) {
      return s <= 0.0 ? 0.0 : -1.0 / ode.rate(s);
    }, 0.0, ode.value0, 1e-11));
    const double err = std::max(half, 1e-12);
    if (t >= T) {
      res.extinct = true;
      res.value = 0.0;
      res.extinction_time = T;
      res.bracket_lo = T - err;
      res.bracket_hi = T + err;
      return res;
    }
    double lo = 0.0, hi = ode.value0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * ode.value0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (time_to_reach(ode, mid) > t) lo = mid;
      else hi = mid;
    }
    res.value = 0.5 * (lo + hi);
    return res;
  }
  // Growing trajectory: RK4 in t with step-doubling control.
  auto rk4 = [&](double v, double h) {
    const double k1 = ode.rate(v);
    const double k2 = ode.rate(v + 0.5 * h * k1);
    const double k3 = ode.rate(v + 0.5 * h * k2);
    const double k4 = ode.rate(v + h * k3);
    return v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  double v = ode.value0, s = 0.0;
  double h = std::min(t, 0.01 * ode.value0 / std::abs(r0));
  while (s < t) {
    h = std::min(h, t - s);
    const double full = rk4(v, h);
    const double half = rk4(rk4(v, 0.5 * h), 0.5 * h);
    const double err = std::abs(full - half);
    if (err > 1e-12 * std::max(1.0, std::abs(half)) && h > 1e-14) {
      h *= 0.5;
      continue;
    }
    v = half + (half - full) / 15.0;
    s += h;
    if (err < 1e-14 * std::max(1.0, std::abs(v))) h *= 2.0;
  }
  res.value = v;
  return res;
}

// ---------------------------------------------------------------------------

SubSolution::SubSolution(double R0, int n, double A, double t_max) : R0_(R0), n_(n), A_(A) {
  if (!(R0 > 0.0)) throw ParameterError("barriers", "R0 must be positive");
  if (n < 1) throw ParameterError("barriers", "n must be >= 1");
  if (!(t_max > 0.0)) throw ParameterError("barriers", "t_max must be positive");
  auto ok = [&](double t) {
    const RadiusResult rr = integrate_radius({RadiusKind::ball_grow, n_, A_, R0_}, t);
    if (rr.extinct) return false;
    const double r = r_of(t), R = rr.value;
    const double S2 = (r + R) * (r + R) - R0_ * R0_;
    if (!(S2 > r * r)) return false;
    const double S = std::sqrt(S2);
    const double rp = 0.75 * std::pow(t, -0.25), Rp = A_ - n_ / R;
    const double bound = (r + R) * (rp + Rp) / S - rp - 1.0 / r - A_ + (n_ - 1) / (S - r);
    return bound < 0.0;
  };
  double good = 0.0, bad = -1.0;
  for (double t = 1e-14; t <= t_max * (1.0 + 1e-12); t *= 1.1) {
    if (ok(t)) good = t;
    else {
      bad = t;
      break;
    }
  }
  if (bad < 0.0) {
    valid_until_ = ok(t_max) ? t_max : good;
    return;
  }
  if (good == 0.0) throw ParameterError("barriers", "sub-solution has an empty validity window");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (good + bad);
    (ok(mid) ? good : bad) = mid;
  }
  valid_until_ = good;
}

double SubSolution::r_of(double t) { return std::pow(t, 0.75); }

double SubSolution::R_of(double t) const {
  return integrate_radius({RadiusKind::ball_grow, n_, A_, R0_}, t).value;
}

void SubSolution::check_time(double t) const {
  if (!(t > 0.0) || !(t < valid_until_))
    throw DomainError("barriers", "t outside the sub-solution validity window");
}

double SubSolution::matching_point(double t) const {
  const double r = r_of(t), R = R_of(t);
  return R0_ * r / (R + r);
}

double SubSolution::residual_bound(double t) const {
  const double r = r_of(t), R = R_of(t);
  const double S = std::sqrt((r + R - R0_) * (r + R + R0_));
  const double rp = 0.75 * std::pow(t, -0.25), Rp = A_ - n_ / R;
  return (r + R) * (rp + Rp) / S - rp - 1.0 / r - A_ + (n_ - 1) / (S - r);
}

SubSolution::Piece SubSolution::inner_piece(double x, double t) const {
  const double r = r_of(t), R = R_of(t);
  const double S = std::sqrt((r + R - R0_) * (r + R + R0_));
  const double q = std::sqrt((r - x) * (r + x));
  return {S - q, x / q};
}

SubSolution::Piece SubSolution::cap_piece(double x, double t) const {
  const double R = R_of(t);
  const double c = std::abs(x) - R0_;
  const double v = std::sqrt(std::max(0.0, (R - c) * (R + c)));
  const double sgn = x < 0.0 ? -1.0 : 1.0;
  return {v, -sgn * c / v};
}

double SubSolution::value(double x, double t) const {
  check_time(t);
  const double R = R_of(t);
  if (std::abs(x) > R0_ + R) throw DomainError("barriers", "x outside the sub-solution support");
  const double xm = matching_point(t);
  return std::abs(x) < xm ? inner_piece(x, t).value : cap_piece(x, t).value;
}

double SubSolution::residual(double x, double t) const {
  check_time(t);
  const double r = r_of(t), R = R_of(t);
  const double xm = R0_ * r / (R + r);
  const double ax = std::abs(x);
  if (std::abs(ax - xm) <= 1e-12 * xm)
    throw DomainError("barriers", "residual undefined at the matching point");
  const double Rp = A_ - n_ / R;
  if (ax > xm) {
    if (ax >= R0_ + R) throw DomainError("barriers", "x outside the sub-solution support");
    const double u = cap_piece(x, t).value;
    return (R * Rp + n_ - A_ * R) / u;
  }
  const double rp = 0.75 * std::pow(t, -0.25);
  const double S = std::sqrt((r + R - R0_) * (r + R + R0_));
  const double q = std::sqrt((r - x) * (r + x));
  const double u = S - q;
  const double ut = (r + R) * (rp + Rp) / S - r * rp / q;
  return ut - 1.0 / q + (n_ - 1) / u - A_ * r / q;
}

bool SubSolution::fits_below(const ProfileCurve& p) const {
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double c = std::abs(p.x[k]) - R0_;
    if (std::abs(c) >= R0_) continue;
    if (std::sqrt(R0_ * R0_ - c * c) > p.u[k] + 1e-12) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

ValidationReport validate_supersolution_params(const SelfSimilarBarrier& b) {
  ValidationReport rep;
  auto fail = [&](const std::string& what) {
    rep.valid = false;
    rep.violations.push_back(what);
  };
  if (b.n < 2) fail("n >= 2");
  if (b.A < 0.0) fail("A >= 0");
  if (b.n > 2) {
    if (!(b.C * b.C + b.rho * b.rho < b.n)) fail("C^2 + rho^2 < n");
    if (!(b.C > b.rho)) fail("C > rho");
    if (!(b.rho > 1.0)) fail("rho > 1");
  } else if (b.n == 2) {
    if (!(b.theta > 0.0 && b.theta < 1.0)) fail("0 < theta < 1");
    if (!(b.eps0 > 0.0 && b.eps0 < 2.0 * b.theta / 9.0)) fail("0 < eps0 < 2 theta/9");
    if (!(1.0 + b.theta * b.eps0 < b.rho)) fail("1 + theta eps0 < rho");
    if (!(b.rho < b.C)) fail("rho < C");
    if (!(b.C < 1.0 + b.eps0)) fail("C < 1 + eps0");
  }
  if (b.T > 0.0 && !(b.T < std::exp(-b.tau0))) fail("T < exp(-tau0)");
  return rep;
}

double supersolution_residual(const SelfSimilarBarrier& b, double z, double tau) {
  const double q2 = b.rho * b.rho - z * z;
  if (!(q2 > 0.0)) throw DomainError("barriers", "residual singular at |z| >= rho");
  const double q = std::sqrt(q2);
  const double C = b.C, rho = b.rho;
  const double num = C * q * q - (rho * rho + C * C - b.n) * q - C + rho * rho * C -
                     std::sqrt(2.0) * b.A * std::exp(-tau) * rho * (C - q);
  return num / (q * (C - q));
}

double n2_lower_bound(double theta, double eps0) {
  return (2.0 * theta * eps0 - 9.0 * eps0 * eps0) / (1.0 + theta * eps0);
}

double n2_quadratic_minimum(double C, double rho) {
  const double s = C * C + rho * rho - 2.0;
  return -s * s / (4.0 * C) + (rho * rho - 1.0) * C;
}

std::vector<double> chebyshev_samples(double rho, int count) {
  if (count < 2) throw ParameterError("barriers", "need at least 2 samples");
  const double half = rho - 1e-3 * rho;
  std::vector<double> z(count);
  for (int k = 0; k < count; ++k)
    z[k] = -half * std::cos(std::numbers::pi * (k + 0.5) / count);
  return z;
}

double find_tau0(SelfSimilarBarrier& b, int z_samples) {
  const ValidationReport rep = validate_supersolution_params(SelfSimilarBarrier{
      b.C, b.rho, b.n, b.A, b.theta, b.eps0, 0.0, 0.0});
  if (!rep.valid) throw ParameterError("barriers", "invalid barrier parameters: " + rep.violations.front());
  const std::vector<double> zs = chebyshev_samples(b.rho, z_samples);
  auto positive = [&](double tau) {
    for (double z : zs)
      if (!(supersolution_residual(b, z, tau) > 0.0)) return false;
    return true;
  };
  if (b.A == 0.0 || positive(0.0)) {
    if (!positive(0.0)) throw ConsistencyError("barriers", "residual not positive for A = 0");
    b.tau0 = 0.0;
    return 0.0;
  }
  double lo = 0.0, hi = 1.0;
  while (!positive(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) throw ConsistencyError("barriers", "residual never becomes positive");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (positive(mid) ? hi : lo) = mid;
  }
  b.tau0 = 1.05 * hi;
  return b.tau0;
}

double selfsimilar_barrier_value(const SelfSimilarBarrier& b, double x, double t) {
  if (!(b.T < std::exp(-b.tau0)))
    throw DomainError("barriers", "T must be below exp(-tau0)");
  if (!(t >= 0.0) || !(t < b.T)) throw DomainError("barriers", "t must lie in [0, T)");
  const double lam = std::sqrt(2.0 * (b.T - t));
  const double z = x / lam;
  if (std::abs(z) > b.rho * (1.0 + 1e-12))
    throw DomainError("barriers", "x outside the barrier support");
  const double q = std::sqrt(std::max(0.0, b.rho * b.rho - z * z));
  return lam * (b.C - q);
}

double envelope_slope(double C, double rho) {
  if (!(rho > 0.0) || !(C > rho)) throw ParameterError("barriers", "need C > rho > 0");
  return std::sqrt(C * C - rho * rho) / rho;
}

double tangency_z(double C, double rho) {
  if (!(rho > 0.0) || !(C > rho)) throw ParameterError("barriers", "need C > rho > 0");
  return rho * std::sqrt(C * C - rho * rho) / C;
}

double critical_angle(int n, double eps0) {
  if (n < 2) throw ParameterError("barriers", "critical angle needs n >= 2");
  if (n == 2) {
    if (!(eps0 > 0.0)) throw ParameterError("barriers", "eps0 must be positive");
    return std::atan(std::sqrt((1.0 + eps0) * (1.0 + eps0) - 1.0));
  }
  return std::atan(std::sqrt(static_cast<double>(n - 2)));
}

bool barrier_above_profile(const SelfSimilarBarrier& b, const ProfileCurve& p, double T) {
  SelfSimilarBarrier c = b;
  c.T = T;
  const double lam = std::sqrt(2.0 * T);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (std::abs(p.x[k]) > b.rho * lam) continue;
    if (!(selfsimilar_barrier_value(c, p.x[k], 0.0) > p.u[k])) return false;
  }
  return true;
}

}  // namespace pinch
