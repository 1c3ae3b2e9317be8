#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pinch/barriers.hpp"
#include "pinch/error.hpp"
#include "pinch/fattening.hpp"
#include "pinch/graphflow.hpp"
#include "pinch/intersection.hpp"
#include "pinch/levelset.hpp"
#include "pinch/profiles.hpp"

using namespace pinch;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rk4_ball(double R0, int n, double A, double t) {
  const int steps = 20000;
  const double h = t / steps;
  double R = R0;
  auto f = [&](double r) { return A - n / r; };
  for (int k = 0; k < steps; ++k) {
    const double k1 = f(R), k2 = f(R + 0.5 * h * k1), k3 = f(R + 0.5 * h * k2), k4 = f(R + h * k3);
    R += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return R;
}

double axis_radius(const LevelSetField& f) {
  const std::vector<double> xs = axis_crossings(f);
  return xs.size() < 2 ? 0.0 : 0.5 * (xs.back() - xs.front());
}

double tube_radius(const LevelSetField& f) {
  const HalfPlaneGrid& g = f.grid;
  const int i = g.nx / 2;
  for (int j = 0; j < g.nr; ++j) {
    const double a = f.at(i, j), b = f.at(i, j + 1);
    if (a > 0.0 && b <= 0.0) return g.r(j) + a / (a - b) * g.hr;
  }
  return 0.0;
}

LevelSetField sphere_run(double R, int n, double A, double half, int nx, double t) {
  LevelSetField f;
  f.grid = HalfPlaneGrid::square(-half, half, half, nx);
  f.n = n;
  f.A = A;
  f.psi.resize(f.grid.size());
  for (int j = 0; j <= f.grid.nr; ++j)
    for (int i = 0; i <= f.grid.nx; ++i)
      f.at(i, j) = std::clamp(R - std::hypot(f.grid.x(i), f.grid.r(j)), -1.0, 1.0);
  return evolve(f, t, {t}).back();
}

Outcome sphere_consistency() {
  Outcome o;
  const double R = rk4_ball(0.5, 2, 1.0, 0.05);
  for (auto [nx, tol] : {std::pair{256, 0.02}, std::pair{512, 0.01}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const double r = axis_radius(sphere_run(0.5, 2, 1.0, 1.0, nx, 0.05));
    const double secs = seconds_since(t0);
    const double err = std::abs(r - R) / R;
    o.require(err < tol, std::to_string(nx) + fmt2(": error %.3f%% (limit %.0f%%)", 100.0 * err, 100.0 * tol));
    o.require(secs < 30.0, std::to_string(nx) + fmt(": %.1f s (limit 30 s)", secs));
  }
  return o;
}

Outcome stationary_states() {
  Outcome o;
  const double r = axis_radius(sphere_run(2.0, 2, 1.0, 2.6, 256, 0.1));
  o.require(std::abs(r - 2.0) / 2.0 < 0.005, fmt("sphere R=n/A drift %.3f%%", 100.0 * std::abs(r - 2.0) / 2.0));
  HalfPlaneGrid g = HalfPlaneGrid::square(-0.5, 0.5, 1.5, 128);
  g.periodic_x = true;
  LevelSetField f;
  f.grid = g;
  f.n = 2;
  f.A = 1.0;
  f.psi.resize(g.size());
  for (int j = 0; j <= g.nr; ++j)
    for (int i = 0; i <= g.nx; ++i) f.at(i, j) = std::clamp(1.0 - g.r(j), -1.0, 1.0);
  const double a = tube_radius(evolve(f, 0.1, {0.1}).back());
  o.require(std::abs(a - 1.0) < 0.005, fmt("cylinder alpha=(n-1)/A drift %.3f%%", 100.0 * std::abs(a - 1.0)));
  return o;
}

Outcome cylinder_trichotomy() {
  Outcome o;
  for (int n : {2, 3, 5}) {
    for (double A : {0.5, 1.0, 2.0}) {
      const double c1 = n - 1.0, star = c1 / A;
      const double a0 = 0.5 * star;
      const double oracle = -a0 / A - c1 / (A * A) * std::log1p(-A * a0 / c1);
      const RadiusResult below = integrate_radius({RadiusKind::cylinder, n, A, a0}, 1e3);
      const RadiusResult eq = integrate_radius({RadiusKind::cylinder, n, A, star}, 1.0);
      const RadiusResult above = integrate_radius({RadiusKind::cylinder, n, A, 1.5 * star}, 1.0);
      const auto T = extinction_time({RadiusKind::cylinder, n, A, a0});
      const bool ok = below.extinct && T && std::abs(*T - oracle) < 1e-6 && !eq.extinct &&
                      std::abs(eq.value - star) < 1e-9 * star && !above.extinct && above.value > 1.5 * star;
      if (!ok) o.require(false, "n=" + std::to_string(n) + fmt(" A=%g", A));
    }
  }
  if (o.passed) o.require(true, "9 (n, A) pairs, extinction within 1e-6 of the quadrature");
  return o;
}

Outcome subsolution_checks() {
  Outcome o;
  const SubSolution sub(0.1, 2, 1.0, 1e-2);
  const double ts = sub.valid_until();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const double t = ts * std::pow(1e-3, unit(rng));
    const double x = sub.matching_point(t) * (1.0 - 1e-6) * (2.0 * unit(rng) - 1.0);
    try {
      if (!(sub.residual(x, t) < 0.0)) ++bad;
    } catch (const DomainError&) {
      ++bad;
    }
  }
  o.require(bad == 0, std::to_string(bad) + " of 1000 residuals positive");
  double match = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double t = ts * k / 21.0;
    const double xm = sub.matching_point(t);
    const auto in = sub.inner_piece(xm, t);
    const auto cap = sub.cap_piece(xm, t);
    match = std::max({match, std::abs(in.value - cap.value) / std::max(1.0, std::abs(in.value)),
                      std::abs(in.slope - cap.slope) / std::max(1.0, std::abs(in.slope))});
  }
  o.require(match < 1e-10, fmt("C1 matching %.2e", match));
  double lower = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 40; ++k) {
    const double t = 1e-6 * std::pow(1e4, k / 40.0);
    if (t >= ts) break;
    lower = std::min(lower, sub.value(0.0, t) / std::pow(t, 0.375));
  }
  o.require(lower > 0.0, fmt2("u(0,t)/t^(3/8) >= %.3g for t < %.2e", lower, ts));
  return o;
}

bool residuals_positive(const SelfSimilarBarrier& b, double tau) {
  for (double z : chebyshev_samples(b.rho, 257))
    if (!(supersolution_residual(b, z, tau) > 0.0)) return false;
  return true;
}

Outcome supersolution_checks() {
  Outcome o;
  for (SelfSimilarBarrier b : {SelfSimilarBarrier{1.3, 1.1, 3, 1.0, 0.9, 0.1, 0.0, 0.0},
                               SelfSimilarBarrier{1.099, 1.095, 2, 1.0, 0.9, 0.1, 0.0, 0.0}}) {
    const bool valid = validate_supersolution_params(b).valid;
    const double tau0 = valid ? find_tau0(b) : 0.0;
    bool ok = valid;
    for (double dt : {1e-9, 0.5, 1.0, 5.0, 20.0, 100.0}) ok = ok && residuals_positive(b, tau0 + dt);
    o.require(ok, "n=" + std::to_string(b.n) + fmt(" residual positive beyond tau0=%.4f", tau0));
  }
  const double direct = (2.0 * 0.9 * 0.1 - 9.0 * 0.01) / (1.0 + 0.9 * 0.1);
  const double diff = std::abs(n2_lower_bound(0.9, 0.1) - direct);
  o.require(diff < 1e-12, fmt("n=2 closed-form bound difference %.1e", diff));
  return o;
}

Outcome critical_angles(const std::vector<SuiteCell>& suite) {
  Outcome o;
  o.require(critical_angle(3) == kPi / 4.0, "critical_angle(3) = pi/4");
  bool mono = true;
  for (int n = 2; n < 20; ++n) mono = mono && critical_angle(n + 1) > critical_angle(n);
  o.require(mono, "increasing over n = 2..20");
  for (const auto& c : suite) {
    const Scenario& s = c.scenario;
    if (s.n < 2 || s.profile.gamma >= kPi / 2.0 - 1e-12) continue;
    const bool below = s.profile.gamma < critical_angle(s.n);
    o.require(below == (c.expected == Verdict::non_fattening),
              s.name + fmt2(" gamma %.4f vs %.4f", s.profile.gamma, critical_angle(s.n)));
  }
  return o;
}

Outcome verdict_matrix(const std::vector<CellResult>& results, double secs) {
  Outcome o;
  for (const auto& r : results)
    o.require(r.passed(), r.name + " " + to_string(r.report.verdict) + " open " +
                              std::to_string(r.report.components_open) + " closed " +
                              std::to_string(r.report.components_closed));
  o.require(secs < 1200.0, fmt("%.1f s with 4 threads (limit 1200 s)", secs));
  return o;
}

Outcome endpoint_law() {
  Outcome o;
  const double A = 6.5;
  for (double neck : {0.25, 0.4}) {
    const ProfileCurve full = make_dumbbell_profile(kPi / 2.0, 1.0, neck, 2, 8192);
    const double kappa = curvature_at_origin(full);
    double worst = 0.0;
    for (double ds : {0.004, 0.002}) {
      const double w = 0.001;
      GraphflowOptions go;
      go.snapshot_times = {0.25 * w, 0.5 * w, 0.75 * w, w};
      const FreeBoundarySolution s = evolve_free_boundary(right_lobe(full), 2, A, w, ds, go);
      worst = std::max(worst, std::abs(endpoint_speed(s, w) - (kappa - A)) / std::abs(kappa - A));
    }
    o.require(worst < 0.1, fmt2("kappa %.3f vs A: worst relative error %.3f", kappa, worst));
  }
  return o;
}

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

Outcome comparison_and_monitors(const std::vector<CellResult>& results) {
  Outcome o;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const HalfPlaneGrid g = HalfPlaneGrid::square(-1.0, 1.0, 0.8, 64);
  long violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const double A = 2.0 * U(rng);
    const LevelSetField lo = random_field(g, rng, n, A);
    LevelSetField hi = lo;
    const LevelSetField bump = random_field(g, rng, n, A);
    for (std::size_t k = 0; k < hi.psi.size(); ++k)
      hi.psi[k] = std::min(1.0, hi.psi[k] + 0.3 * U(rng) * (bump.psi[k] + 1.0));
    const auto a = evolve(lo, 0.01, {0.0025, 0.005, 0.0075, 0.01});
    const auto b = evolve(hi, 0.01, {0.0025, 0.005, 0.0075, 0.01});
    for (std::size_t s = 0; s < a.size(); ++s)
      for (std::size_t k = 0; k < a[s].psi.size(); ++k)
        if (a[s].psi[k] > b[s].psi[k] + 1e-12) ++violations;
  }
  o.require(violations == 0, std::to_string(violations) + " comparison violations over 50 pairs");
  int monitor_violations = 0;
  for (const auto& r : results) {
    monitor_violations += r.report.level_monitor.violations;
    if (r.report.graph_monitor) monitor_violations += r.report.graph_monitor->violations;
  }
  o.require(monitor_violations == 0, std::to_string(monitor_violations) + " monitor violations over the suite");
  return o;
}

Outcome barrier_exclusion() {
  Outcome o;
  Scenario s;
  s.name = "crosscheck";
  s.n = 3;
  s.A = 1.0;
  s.profile = make_dumbbell_profile(kPi / 6.0, 1.0, 0.45, 3);
  s.grid = HalfPlaneGrid::square(-1.2, 1.2, 0.8, 256);
  s.alpha = s.profile(0.225);
  s.inner_unit = 0.1;
  SelfSimilarBarrier b{1.3, 1.1, 3, 1.0, 0.9, 0.1, 0.0, 0.0};
  find_tau0(b);
  const CrosscheckReport r = barrier_crosscheck(s, b, 8);
  double sep = std::numeric_limits<double>::infinity();
  bool outside = true;
  for (const auto& q : r.snapshots) {
    sep = std::min(sep, q.min_separation);
    outside = outside && q.origin_outside;
  }
  o.require(r.certified && outside, std::to_string(r.snapshots.size()) + " snapshots up to t_probe " +
                                        fmt("%.4g", r.t_probe));
  o.require(sep >= 1.0, fmt("minimum separation %.1f cells", sep));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the pinch library"};
  int threads = 4;
  app.add_option("--threads", threads, "Worker threads for the verdict suite")->check(CLI::Range(1, 64));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (!o.passed) ++failed;
    std::printf("criterion %2d %-34s %s (%.1f s) %s\n", id, name.c_str(), o.passed ? "PASS" : "FAIL",
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  };

  const std::vector<SuiteCell> suite = default_suite({256, 3});
  std::vector<CellResult> results;
  double suite_secs = 0.0;

  report(1, "sphere ODE consistency", sphere_consistency);
  report(2, "stationary sphere and cylinder", stationary_states);
  report(3, "cylinder trichotomy", cylinder_trichotomy);
  report(4, "sub-solution checks", subsolution_checks);
  report(5, "super-solution checks", supersolution_checks);
  report(6, "critical angles", [&] { return critical_angles(suite); });
  report(7, "verdict matrix", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    DetectOptions opts;
    opts.threads = threads;
    results = reproduce_tables(suite, opts);
    suite_secs = seconds_since(t0);
    return verdict_matrix(results, suite_secs);
  });
  report(8, "endpoint law", endpoint_law);
  report(9, "comparison and intersection", [&] { return comparison_and_monitors(results); });
  report(10, "barrier exclusion", barrier_exclusion);
  std::printf("%d of 10 criteria pass\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
