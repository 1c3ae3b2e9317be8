#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pinch/barriers.hpp"
#include "pinch/config.hpp"
#include "pinch/error.hpp"
#include "pinch/fattening.hpp"
#include "pinch/graphflow.hpp"
#include "pinch/intersection.hpp"
#include "pinch/levelset.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pinch;

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kSolver = 3 };

struct Options {
  std::string config;
  std::string out = "out";
  int threads = 1;
  bool strict = false;
};

// Collects checks, warnings and tolerances of one run.
struct Run {
  std::string command;
  Options opt;
  const Config* config = nullptr;
  json tolerances = json::object();
  json checks = json::array();
  std::vector<std::string> warnings;
  int failures = 0;

  void check(const std::string& name, bool ok, json detail = json::object()) {
    detail["name"] = name;
    detail["passed"] = ok;
    checks.push_back(detail);
    if (!ok) ++failures;
    std::printf("%-44s %s\n", name.c_str(), ok ? "PASS" : "FAIL");
  }
  void warn(const std::string& w) {
    warnings.push_back(w);
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
  fs::path path(const std::string& name) const { return fs::path(opt.out) / name; }
  int status() const { return failures > 0 || (opt.strict && !warnings.empty()) ? kFailed : kOk; }
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw InputError("cli", "cannot write " + p.string());
  out << j.dump(2) << '\n';
}

void write_manifest(const Run& run, const std::string& status, const std::string& message) {
  json m;
  m["command"] = run.command;
  m["status"] = status;
  if (!message.empty()) m["message"] = message;
  m["config_path"] = run.opt.config;
  m["threads"] = run.opt.threads;
  m["strict"] = run.opt.strict;
  m["module_versions"] = module_versions();
  m["tolerances"] = run.tolerances;
  m["warnings"] = run.warnings;
  m["failures"] = run.failures;
  if (run.config) {
    m["config_hash"] = "fnv1a64:" + hex64(run.config->hash());
    m["config"] = run.config->values();
    m["seed"] = run.config->integer_or("run.seed", 0);
  }
  std::error_code ec;
  fs::create_directories(run.opt.out, ec);
  write_json(run.path("manifest.json"), m);
}

// Physical parameters are validated wherever they appear.
void validate_physics(const Config& c) {
  if (c.has("physics.n")) config_n(c);
  if (c.has("physics.A")) config_A(c);
}

std::vector<double> even_times(double t_end, int count) {
  std::vector<double> ts;
  for (int k = 1; k <= count; ++k) ts.push_back(t_end * k / count);
  return ts;
}

void write_contours_csv(const fs::path& p, const std::vector<LevelSetField>& fields) {
  std::ofstream out(p);
  if (!out) throw InputError("cli", "cannot write " + p.string());
  out.precision(10);
  out << "t,x,r\n";
  for (const auto& f : fields)
    for (const auto& line : zero_contour(f))
      for (const auto& q : line) out << f.t << ',' << q[0] << ',' << q[1] << '\n';
}

void write_barrier_csv(const fs::path& p, const SelfSimilarBarrier& b, int steps, int samples) {
  std::ofstream out(p);
  if (!out) throw InputError("cli", "cannot write " + p.string());
  out.precision(10);
  out << "t,x,value\n";
  for (int k = 0; k < steps; ++k) {
    const double t = b.T * k / steps;
    const double half = b.rho * std::sqrt(2.0 * (b.T - t));
    for (int i = 0; i <= samples; ++i) {
      const double x = -half + 2.0 * half * i / samples;
      out << t << ',' << x << ',' << selfsimilar_barrier_value(b, x, t) << '\n';
    }
  }
}

void fattening_tolerances(Run& run) {
  run.tolerances["ball_threshold_cells"] = 3.0;
  run.tolerances["area_floor_cells2"] = 10.0;
  run.tolerances["non_fattening_band_cells"] = 4.0;
  run.tolerances["sandwich_slack_cells"] = 1.0;
  run.tolerances["contact_tolerance"] = kContactTolerance;
  run.tolerances["classification_tolerance_ds"] = 2.0;
  run.tolerances["minus_boundary_gap_cells"] = 2.0;
}

void review_report(Run& run, const EvolutionReport& r, double h) {
  if (r.verdict == Verdict::inconclusive) run.warn(r.scenario + ": verdict inconclusive");
  if (r.sandwich_violations > 0)
    run.warn(r.scenario + ": " + std::to_string(r.sandwich_violations) + " sandwich violations");
  if (!r.level_monitor.passed()) run.warn(r.scenario + ": level-set intersection monitor violations");
  if (r.graph_monitor && !r.graph_monitor->passed())
    run.warn(r.scenario + ": front-tracking intersection monitor violations");
  if (r.extrapolated_boundary_gap && *r.extrapolated_boundary_gap > 2.0 * h)
    run.warn(r.scenario + ": open and closed boundaries differ by more than 2 cells");
}

// ---------------------------------------------------------------------------

void cmd_levelset(Run& run, const Config& c) {
  const int n = config_n(c);
  const double A = config_A(c);
  const ProfileCurve p = profile_from_config(c, n);
  const HalfPlaneGrid g = grid_from_config(c);
  const double t_end = c.number("levelset.t_end");
  if (!(t_end > 0.0)) throw ConfigError("cli", "levelset.t_end: must be positive");
  EvolveOptions eo;
  eo.cfl = c.number_or("levelset.cfl", 0.9);
  if (!(eo.cfl > 0.0 && eo.cfl <= 0.9)) throw ConfigError("cli", "levelset.cfl: must lie in (0, 0.9]");
  eo.reinit_every = c.integer_or("levelset.reinit_every", 0);
  eo.reinit_iterations = c.integer_or("levelset.reinit_iterations", 20);
  if (eo.reinit_every < 0 || eo.reinit_iterations < 0)
    throw ConfigError("cli", "levelset.reinit_every: must be non-negative");
  const double clamp = c.number_or("levelset.clamp", 1.0);
  if (!(clamp > 0.0)) throw ConfigError("cli", "levelset.clamp: must be positive");
  std::vector<double> times = c.numbers_or("levelset.snapshots", even_times(t_end, 4));
  for (double t : times)
    if (!(t > 0.0 && t <= t_end)) throw ConfigError("cli", "levelset.snapshots: must lie in (0, t_end]");
  run.tolerances["cfl"] = eo.cfl;
  run.tolerances["clamp"] = clamp;

  LevelSetField f = signed_distance(p, g, clamp);
  f.n = n;
  f.A = A;
  write_profile_csv(run.path("profile.csv").string(), p);
  const std::vector<LevelSetField> fields = evolve(f, t_end, times, eo);
  write_contours_csv(run.path("contours.csv"), fields);
  json snaps = json::array();
  for (const auto& s : fields) {
    const GridSet open = extract_set(s, SetKind::open);
    const GridSet closed = extract_set(s, SetKind::closed);
    snaps.push_back({{"t", s.t},
                     {"area_open", open.area()},
                     {"area_closed", closed.area()},
                     {"components_open", count_components(open)},
                     {"components_closed", count_components(closed)},
                     {"axis_crossings", axis_crossings(s)}});
  }
  write_grid_dump(run.path("field_final").string(), fields.back());
  write_json(run.path("report.json"), {{"n", n}, {"A", A}, {"t_end", t_end}, {"snapshots", snaps}});
  std::printf("levelset-run: %zu snapshots to t=%g\n", fields.size(), t_end);
}

FreeBoundarySolution run_graphflow(Run& run, const Config& c, const ProfileCurve& p, int n,
                                   double A, double t_end) {
  const double ds = c.number("graphflow.ds");
  if (!(ds > 0.0)) throw ConfigError("cli", "graphflow.ds: must be positive");
  GraphflowOptions go;
  go.store_count = c.integer_or("graphflow.store_count", 200);
  if (go.store_count < 1) throw ConfigError("cli", "graphflow.store_count: must be positive");
  go.cfl = c.number_or("graphflow.cfl", 0.4);
  if (!(go.cfl > 0.0 && go.cfl <= 0.5)) throw ConfigError("cli", "graphflow.cfl: must lie in (0, 0.5]");
  go.mollify_radius = c.number_or("graphflow.mollify_radius", 0.0);
  if (go.mollify_radius < 0.0) throw ConfigError("cli", "graphflow.mollify_radius: must be non-negative");
  go.slope_bound = c.number_or("graphflow.slope_bound", 50.0);
  if (!(go.slope_bound > 0.0)) throw ConfigError("cli", "graphflow.slope_bound: must be positive");
  run.tolerances["ds"] = ds;
  run.tolerances["cfl"] = go.cfl;
  run.tolerances["slope_bound"] = go.slope_bound;
  run.tolerances["mollify_radius"] = go.mollify_radius > 0.0 ? go.mollify_radius : 6.0 * ds;
  const std::string lobe = c.text_or("graphflow.lobe", "right");
  ProfileCurve q = p;
  if (lobe == "right") {
    q = right_lobe(p);
  } else if (lobe == "left") {
    q = right_lobe(sample_profile([&](double x) { return p(-x); }, p.x_hi(), n,
                                  static_cast<int>(p.size()) - 1));
    q.gamma = p.gamma;
    q.b0 = p.b0;
  } else if (lobe != "full") {
    throw ConfigError("cli", "graphflow.lobe: must be 'right', 'left' or 'full'");
  }
  FreeBoundarySolution sol = evolve_free_boundary(q, n, A, t_end, ds, go);
  if (sol.slope_violations > 0)
    run.warn("gradient bound exceeded at " + std::to_string(sol.slope_violations) + " stored times");
  return sol;
}

void cmd_graphflow(Run& run, const Config& c) {
  const int n = config_n(c);
  const double A = config_A(c);
  const ProfileCurve p = profile_from_config(c, n);
  const double t_end = c.number("graphflow.t_end");
  if (!(t_end > 0.0)) throw ConfigError("cli", "graphflow.t_end: must be positive");
  const FreeBoundarySolution sol = run_graphflow(run, c, p, n, A, t_end);
  write_profile_csv(run.path("profile.csv").string(), p);
  write_endpoints_csv(run.path("endpoints.csv").string(), sol);
  write_curves_csv(run.path("curves.csv").string(), sol);
  json r = {{"n", n},
            {"A", A},
            {"horizon", sol.horizon()},
            {"stop_reason", sol.stop_reason},
            {"slope_violations", sol.slope_violations},
            {"a_star_final", sol.a_star.back()},
            {"b_star_final", sol.b_star.back()}};
  r["blowup_time"] = sol.blowup_time ? json(*sol.blowup_time) : json(nullptr);
  write_json(run.path("report.json"), r);
  std::printf("graphflow-run: horizon %g (%s)\n", sol.horizon(), sol.stop_reason.c_str());
}

void cmd_classify(Run& run, const Config& c) {
  const int n = config_n(c);
  const double A = config_A(c);
  const ProfileCurve p = profile_from_config(c, n);
  const double window = c.number("graphflow.apm_window");
  if (!(window > 0.0)) throw ConfigError("cli", "graphflow.apm_window: must be positive");
  if (std::abs(p.gamma - std::numbers::pi / 2.0) > 1e-12)
    throw ConfigError("cli", "profile.gamma: classification needs a round neck (gamma = pi/2)");
  const FreeBoundarySolution sol = run_graphflow(run, c, p, n, A, window);
  const double ds = c.number("graphflow.ds");
  run.tolerances["classification_tolerance"] = 2.0 * ds;
  Assumption a = Assumption::undetermined;
  try {
    a = classify_assumption(sol, window);
  } catch (const HorizonError& e) {
    run.warn(std::string("classification window not reached: ") + e.what());
  }
  const double kappa = curvature_at_origin(p);
  const double speed_window = c.number_or("graphflow.speed_window", window / 20.0);
  if (!(speed_window > 0.0 && speed_window <= window))
    throw ConfigError("cli", "graphflow.speed_window: must lie in (0, apm_window]");
  const double speed = endpoint_speed(sol, std::min(speed_window, sol.horizon()));
  const Assumption predicted = kappa > A ? Assumption::A_plus
                               : kappa < A ? Assumption::A_minus
                                           : Assumption::undetermined;
  write_endpoints_csv(run.path("endpoints.csv").string(), sol);
  write_json(run.path("report.json"), {{"assumption", to_string(a)},
                                       {"predicted", to_string(predicted)},
                                       {"curvature_at_origin", kappa},
                                       {"A", A},
                                       {"endpoint_speed", speed},
                                       {"predicted_speed", kappa - A},
                                       {"speed_window", speed_window},
                                       {"window", window},
                                       {"horizon", sol.horizon()}});
  if (a == Assumption::undetermined) run.warn("assumption undetermined");
  std::printf("classify-apm: %s (curvature %g, A %g, endpoint speed %g)\n", to_string(a), kappa, A,
              speed);
  if (a != Assumption::undetermined && predicted != Assumption::undetermined)
    run.check("assumption matches curvature sign", a == predicted);
}

bool residuals_positive(const SelfSimilarBarrier& b, double tau, int samples) {
  for (double z : chebyshev_samples(b.rho, samples))
    if (!(supersolution_residual(b, z, tau) > 0.0)) return false;
  return true;
}

void check_barrier_set(Run& run, const std::string& label, SelfSimilarBarrier b) {
  const ValidationReport v = validate_supersolution_params(b);
  run.check(label + " admissible", v.valid, {{"violations", v.violations}});
  if (!v.valid) return;
  const double tau0 = find_tau0(b);
  bool ok = true;
  for (double dt : {0.0, 0.5, 1.0, 5.0, 20.0}) ok = ok && residuals_positive(b, tau0 + dt, 257);
  run.check(label + " residual positive beyond tau0", ok, {{"tau0", tau0}});
}

void cmd_verify_barriers(Run& run, const Config& c) {
  const int n = config_n(c);
  const double A = config_A(c);
  const std::uint64_t seed = static_cast<std::uint64_t>(c.integer_or("run.seed", 0));
  std::mt19937_64 rng(seed);
  run.tolerances["extinction_time"] = 1e-6;
  run.tolerances["matching"] = 1e-10;
  run.tolerances["closed_form"] = 1e-12;
  run.tolerances["constant_radius"] = 1e-9;

  // Cylinder trichotomy against the separated-variables closed form.
  if (n >= 2) {
    const double c1 = n - 1.0;
    auto oracle = [&](double a0) {
      return A > 0.0 ? -a0 / A - c1 / (A * A) * std::log1p(-A * a0 / c1) : a0 * a0 / (2.0 * c1);
    };
    const double star = A > 0.0 ? c1 / A : 1.0;
    const RadiusResult below = integrate_radius({RadiusKind::cylinder, n, A, 0.5 * star}, 1e3);
    run.check("cylinder below equilibrium goes extinct",
              below.extinct && std::abs(below.extinction_time - oracle(0.5 * star)) < 1e-6,
              {{"extinction_time", below.extinction_time}, {"oracle", oracle(0.5 * star)}});
    if (A > 0.0) {
      const RadiusResult eq = integrate_radius({RadiusKind::cylinder, n, A, star}, 1.0);
      run.check("cylinder at equilibrium is constant",
                !eq.extinct && std::abs(eq.value - star) < 1e-9 * star, {{"value", eq.value}});
      const RadiusResult above = integrate_radius({RadiusKind::cylinder, n, A, 1.5 * star}, 1.0);
      run.check("cylinder above equilibrium grows", !above.extinct && above.value > 1.5 * star,
                {{"value", above.value}});
    }
  }
  {
    const RadiusODE ode{RadiusKind::ball_shrink, n, A, 0.5};
    bool dec = true;
    double prev = ode.value0;
    const auto ext = extinction_time(ode);
    for (int k = 1; ext && k < 20; ++k) {
      const double v = integrate_radius(ode, *ext * k / 20.0).value;
      dec = dec && v < prev;
      prev = v;
    }
    run.check("shrinking ball decreases to extinction", ext.has_value() && dec);
  }

  // Sub-solution sweeps.
  const double R0 = c.number_or("subsolution.R0", 0.1);
  const double t_max = c.number_or("subsolution.t_max", 1e-2);
  const int samples = c.integer_or("subsolution.samples", 1000);
  if (!(R0 > 0.0)) throw ConfigError("cli", "subsolution.R0: must be positive");
  if (!(t_max > 0.0)) throw ConfigError("cli", "subsolution.t_max: must be positive");
  if (samples < 1) throw ConfigError("cli", "subsolution.samples: must be positive");
  const SubSolution sub(R0, n, A, t_max);
  const double ts = sub.valid_until();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double t = ts * (1e-6 + (1.0 - 2e-6) * unit(rng));
    const double xm = sub.matching_point(t);
    const double x = xm * (1.0 - 1e-6) * (2.0 * unit(rng) - 1.0);
    const double res = sub.residual(x, t);
    worst = std::max(worst, res);
    if (!(res <= 0.0)) ++bad;
  }
  run.check("sub-solution residual non-positive", bad == 0,
            {{"samples", samples}, {"worst", worst}, {"valid_until", ts}, {"seed", seed}});
  double match = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double t = ts * k / 21.0;
    const double xm = sub.matching_point(t);
    const auto in = sub.inner_piece(xm, t);
    const auto cap = sub.cap_piece(xm, t);
    match = std::max({match, std::abs(in.value - cap.value) / std::max(1.0, std::abs(in.value)),
                      std::abs(in.slope - cap.slope) / std::max(1.0, std::abs(in.slope))});
  }
  run.check("sub-solution C1 matching", match < 1e-10, {{"max_error", match}});
  double lower = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 40; ++k) {
    const double t = 1e-6 * std::pow(1e4, k / 40.0);
    if (t >= ts) break;
    lower = std::min(lower, sub.value(0.0, t) / std::pow(t, 0.375));
  }
  run.check("neck height bounded below by c t^(3/8)", lower > 0.0, {{"constant", lower}});

  // Super-solution parameter sets.
  check_barrier_set(run, "barrier n=3 C=1.3 rho=1.1", {1.3, 1.1, 3, A, 0.9, 0.1, 0.0, 0.0});
  check_barrier_set(run, "barrier n=2 C=1.099 rho=1.095", {1.099, 1.095, 2, A, 0.9, 0.1, 0.0, 0.0});
  const double theta = 0.9, eps0 = 0.1;
  const double direct = (2.0 * theta * eps0 - 9.0 * eps0 * eps0) / (1.0 + theta * eps0);
  run.check("n=2 closed-form lower bound", std::abs(n2_lower_bound(theta, eps0) - direct) < 1e-12 &&
                                               n2_quadratic_minimum(1.099, 1.095) >= direct,
            {{"bound", direct}});
  SelfSimilarBarrier own;
  if (c.has("barrier.C")) {
    own = barrier_from_config(c, n, A);
    check_barrier_set(run, "configured barrier", own);
    find_tau0(own);
    if (own.T == 0.0) own.T = 0.5 * std::exp(-own.tau0);
    write_barrier_csv(run.path("barrier.csv"), own, 8, 200);
  }

  // Critical angles.
  bool mono = true;
  for (int m = 2; m < 20; ++m) mono = mono && critical_angle(m + 1) > critical_angle(m);
  run.check("critical angle n=3 is pi/4", std::abs(critical_angle(3) - std::numbers::pi / 4.0) < 1e-15);
  run.check("critical angles increase with n", mono);
  write_json(run.path("report.json"), {{"checks", run.checks}});
}

void cmd_detect(Run& run, const Config& c) {
  const Scenario s = scenario_from_config(c);
  fattening_tolerances(run);
  run.tolerances["cfl"] = c.number_or("levelset.cfl", 0.9);
  DetectOptions opts;
  opts.threads = run.opt.threads;
  opts.cfl = c.number_or("levelset.cfl", 0.9);
  std::vector<LevelSetField> finest;
  opts.finest_fields = &finest;
  const EvolutionReport r = detect(s, opts);
  write_report_json(run.path("report.json").string(), r);
  write_monitor_jsonl(run.path("monitor.jsonl").string(), r.level_monitor);
  if (r.graph_monitor) write_monitor_jsonl(run.path("monitor_graph.jsonl").string(), *r.graph_monitor);
  if (!finest.empty()) {
    write_grid_dump(run.path("outer_finest").string(), finest.front());
    write_mask_dump(run.path("outer_finest_mask").string(), extract_set(finest.front(), SetKind::closed));
  }
  if (finest.size() > 1) {
    write_grid_dump(run.path("inner_finest").string(), finest[1]);
    write_mask_dump(run.path("inner_finest_mask").string(), extract_set(finest[1], SetKind::open));
  }
  std::printf("detect-fattening: %s verdict %s (open %d, closed %d)\n", s.name.c_str(),
              to_string(r.verdict), r.components_open, r.components_closed);
  review_report(run, r, s.grid.h());
  const std::string expect = c.text_or("fattening.expect", "");
  if (!expect.empty()) {
    if (expect != "fattening" && expect != "non_fattening" && expect != "inconclusive")
      throw ConfigError("cli", "fattening.expect: must be fattening, non_fattening or inconclusive");
    run.check("verdict matches expectation", expect == to_string(r.verdict));
  }
}

void cmd_tables(Run& run, const Config& c) {
  validate_physics(c);
  const SuiteSettings st = suite_from_config(c);
  fattening_tolerances(run);
  run.tolerances["cfl"] = 0.9;
  DetectOptions opts;
  opts.threads = run.opt.threads;
  const auto cells = default_suite(st);
  const auto results = reproduce_tables(cells, opts);
  write_verdict_csv(run.path("verdicts.csv").string(), results);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    write_report_json(run.path(r.name + ".json").string(), r.report);
    write_monitor_jsonl(run.path(r.name + "_monitor.jsonl").string(), r.report.level_monitor);
    if (r.report.graph_monitor)
      write_monitor_jsonl(run.path(r.name + "_monitor_graph.jsonl").string(), *r.report.graph_monitor);
    run.check(r.name + " " + to_string(r.report.verdict), r.passed(),
              {{"expected", to_string(r.expected)},
               {"verdict_ok", r.verdict_ok},
               {"components_ok", r.components_ok}});
    review_report(run, r.report, cells[k].scenario.grid.h());
  }
  int passed = 0;
  for (const auto& r : results) passed += r.passed() ? 1 : 0;
  std::printf("reproduce-tables: %d/%zu cells pass\n", passed, results.size());
}

void cmd_crosscheck(Run& run, const Config& c) {
  const Scenario s = scenario_from_config(c);
  if (!s.barrier) throw ConfigError("cli", "barrier.C: crosscheck needs a [barrier] section");
  const int snaps = c.integer_or("barrier.snapshots", 8);
  if (snaps < 1) throw ConfigError("cli", "barrier.snapshots: must be positive");
  const double cfl = c.number_or("levelset.cfl", 0.9);
  run.tolerances["separation_cells"] = 1.0;
  run.tolerances["cfl"] = cfl;
  const CrosscheckReport r = barrier_crosscheck(s, *s.barrier, snaps, cfl);
  json snapshots = json::array();
  for (const auto& q : r.snapshots)
    snapshots.push_back(
        {{"t", q.t}, {"min_separation_cells", q.min_separation}, {"origin_outside", q.origin_outside}});
  write_json(run.path("crosscheck.json"),
             {{"T", r.T}, {"t_probe", r.t_probe}, {"certified", r.certified}, {"snapshots", snapshots}});
  SelfSimilarBarrier b = *s.barrier;
  b.T = r.T;
  write_barrier_csv(run.path("barrier.csv"), b, 8, 200);
  std::printf("crosscheck: T %g, t_probe %g\n", r.T, r.t_probe);
  run.check("barrier separated and origin outside", r.certified);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axisymmetric pinching and fattening experiments"};
  app.require_subcommand(1, 1);
  Options opt;
  struct Sub {
    const char* name;
    const char* help;
    void (*fn)(Run&, const Config&);
  };
  const Sub subs[] = {
      {"levelset-run", "Evolve the level-set equation and export contours", cmd_levelset},
      {"graphflow-run", "Track the generating curve and export endpoints", cmd_graphflow},
      {"classify-apm", "Classify the endpoint motion of a round neck", cmd_classify},
      {"verify-barriers", "Residual and admissibility sweeps of the comparison objects",
       cmd_verify_barriers},
      {"detect-fattening", "Fattening verdict for one scenario", cmd_detect},
      {"reproduce-tables", "Run the full verdict suite", cmd_tables},
      {"crosscheck", "Barrier against the level-set closed evolution", cmd_crosscheck},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", opt.config, "Configuration file")->required();
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::Range(1, 256));
    sub->add_flag("--strict", opt.strict, "Treat warnings as failures");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const Sub* chosen = nullptr;
  for (const auto& s : subs)
    if (app.got_subcommand(s.name)) chosen = &s;
  Run run;
  run.command = chosen->name;
  run.opt = opt;

  std::error_code ec;
  fs::create_directories(opt.out, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create %s: %s\n", opt.out.c_str(), ec.message().c_str());
    return kConfig;
  }
  Config config;
  try {
    config = Config::load(opt.config);
    run.config = &config;
    validate_physics(config);
  } catch (const Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    write_manifest(run, "config_error", e.what());
    return kConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    chosen->fn(run, config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    write_manifest(run, "config_error", e.what());
    return kConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver error [%s]: %s\n", e.module().c_str(), e.what());
    write_manifest(run, "solver_error", e.what());
    return kSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    write_manifest(run, "solver_error", e.what());
    return kSolver;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int status = run.status();
  std::ostringstream msg;
  msg << "elapsed " << secs << " s";
  write_manifest(run, status == kOk ? "ok" : "failed", msg.str());
  if (status != kOk) std::fprintf(stderr, "%d failed checks, %zu warnings\n", run.failures, run.warnings.size());
  return status;
}
