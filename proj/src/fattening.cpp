#include "pinch/fattening.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <thread>

#include "json.hpp"
#include "pinch/error.hpp"

namespace pinch {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

bool round_neck(const Scenario& s) { return s.profile.gamma >= kHalfPi - 1e-12; }

// Runs task(k) for k < count on up to `threads` workers; rethrows the first
// failure after all workers have joined.
template <class F>
void run_tasks(std::size_t count, int threads, F&& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        task(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Squared distance transform along one line (lower envelope of parabolas).
void edt_line(const double* f, double* d, int m, std::vector<int>& v, std::vector<double>& z) {
  const double inf = std::numeric_limits<double>::infinity();
  v.assign(static_cast<std::size_t>(m), 0);
  z.assign(static_cast<std::size_t>(m) + 1, 0.0);
  auto meet = [&](int q, int p) {
    return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
  };
  int first = 0;
  while (first < m && f[first] == inf) ++first;
  if (first == m) {
    for (int q = 0; q < m; ++q) d[q] = inf;
    return;
  }
  std::size_t k = 0;
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  for (int q = first + 1; q < m; ++q) {
    if (f[q] == inf) continue;
    double s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < m; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    d[q] = double(q - p) * (q - p) + f[p];
  }
}

LevelSetField initial_field(const ProfileCurve& p, const Scenario& s) {
  LevelSetField f = signed_distance(p, s.grid, s.clamp);
  f.A = s.A;
  f.n = s.n;
  return f;
}

// Nodes of `inner` outside `outer` with no node of `outer` among their
// 4-neighbours.
int containment_violations(const GridSet& inner, const GridSet& outer) {
  const HalfPlaneGrid& g = inner.grid;
  int bad = 0;
  for (int j = 0; j <= g.nr; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      if (!inner.at(i, j) || outer.at(i, j)) continue;
      bool near = (i > 0 && outer.at(i - 1, j)) || (i < g.nx && outer.at(i + 1, j)) ||
                  (j > 0 && outer.at(i, j - 1)) || (j < g.nr && outer.at(i, j + 1)) ||
                  (j == 0 && g.nr > 0 && outer.at(i, 1));
      if (!near) ++bad;
    }
  return bad;
}

std::vector<double> probe_schedule(double t_probe, int snapshots) {
  std::vector<double> ts;
  const int m = std::max(1, snapshots);
  for (int k = 1; k <= m; ++k) ts.push_back(t_probe * k / m);
  return ts;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::fattening: return "fattening";
    case Verdict::non_fattening: return "non_fattening";
    default: return "inconclusive";
  }
}

void Scenario::validate() const {
  if (n < 1) throw ParameterError("fattening", "n must be >= 1");
  if (j_levels < 2) throw ParameterError("fattening", "j_levels must be >= 2");
  if (!(alpha > 0.0)) throw ParameterError("fattening", "alpha must be positive");
  if (!(inner_unit > 0.0)) throw ParameterError("fattening", "inner_unit must be positive");
  if (t_probe < 0.0) throw ParameterError("fattening", "t_probe must be non-negative");
  if (profile.n != n) throw ParameterError("fattening", "profile dimension differs from n");
  grid.validate();
  if (!grid.covers(profile.b0, 4.0 * grid.hx))
    throw ParameterError("fattening", "grid does not cover the profile");
  // The finest plateau and erosion must span at least one cell.
  if (std::ldexp(alpha, -j_levels) < grid.h_min())
    throw ResolutionError("fattening", "grid too coarse for alpha / 2^j_levels");
  if (std::ldexp(inner_unit, -j_levels) < 0.5 * grid.h_min())
    throw ResolutionError("fattening", "grid too coarse for inner_unit / 2^j_levels");
}

double admissible_blowdown(const SelfSimilarBarrier& b, const ProfileCurve& p, double safety) {
  if (!(safety > 0.0) || safety > 1.0) throw ParameterError("fattening", "safety must lie in (0, 1]");
  const double cap = std::exp(-b.tau0);
  double lo = 0.0, hi = 1e-4;
  while (barrier_above_profile(b, p, std::min(hi, cap)) && hi < cap) {
    lo = hi;
    hi *= 2.0;
  }
  hi = std::min(hi, cap);
  if (lo == 0.0 && !barrier_above_profile(b, p, hi * 0.5)) {
    hi *= 0.5;
    while (hi > 1e-12 && !barrier_above_profile(b, p, hi)) hi *= 0.5;
    if (hi <= 1e-12) throw PreconditionError("fattening", "barrier never lies above the profile");
    lo = hi;
    hi *= 2.0;
  }
  if (lo == 0.0) lo = hi * 0.5;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid < cap && barrier_above_profile(b, p, mid)) lo = mid;
    else hi = mid;
  }
  return safety * lo;
}

double default_probe_time(const Scenario& s) {
  if (round_neck(s)) {
    if (!(s.apm_window > 0.0))
      throw ParameterError("fattening", "round necks need apm_window for the default probe time");
    return 0.5 * s.apm_window;
  }
  if (s.n >= 2 && s.barrier) return 0.25 * admissible_blowdown(*s.barrier, s.profile);
  throw ParameterError("fattening", "t_probe must be given for this scenario");
}

double inscribed_radius(const GridSet& s) {
  const HalfPlaneGrid& g = s.grid;
  const int nxp = g.cols(), nrp = g.rows();
  const double inf = std::numeric_limits<double>::infinity();
  bool any_out = false, any_in = false;
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    f[k] = s.mask[k] ? inf : 0.0;
    any_out = any_out || !s.mask[k];
    any_in = any_in || s.mask[k];
  }
  if (!any_in) return 0.0;
  if (!any_out) return inf;
  // Columns (along r, in units of hr), then rows (along x, in units of hx).
  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> line(static_cast<std::size_t>(std::max(nxp, nrp)));
  std::vector<double> out(line.size());
  const double ratio = g.hr / g.hx;
  for (int i = 0; i < nxp; ++i) {
    for (int j = 0; j < nrp; ++j) line[static_cast<std::size_t>(j)] = f[g.index(i, j)];
    edt_line(line.data(), out.data(), nrp, v, z);
    for (int j = 0; j < nrp; ++j) f[g.index(i, j)] = out[static_cast<std::size_t>(j)] * ratio * ratio;
  }
  double best = 0.0;
  for (int j = 0; j < nrp; ++j) {
    const double* row = &f[g.index(0, j)];
    edt_line(row, out.data(), nxp, v, z);
    for (int i = 0; i < nxp; ++i)
      if (s.mask[g.index(i, j)]) best = std::max(best, out[static_cast<std::size_t>(i)]);
  }
  return std::sqrt(best) * g.hx;
}

double contour_length(const std::vector<Polyline>& c) {
  double L = 0.0;
  for (const auto& line : c)
    for (std::size_t k = 1; k < line.size(); ++k)
      L += std::hypot(line[k][0] - line[k - 1][0], line[k][1] - line[k - 1][1]);
  return L;
}

namespace {

FreeBoundarySolution mirrored(const FreeBoundarySolution& sol) {
  FreeBoundarySolution m = sol;
  for (auto& c : m.curves) {
    std::reverse(c.begin(), c.end());
    for (auto& q : c) q[0] = -q[0];
  }
  for (std::size_t k = 0; k < m.a_star.size(); ++k) {
    m.a_star[k] = -sol.b_star[k];
    m.b_star[k] = -sol.a_star[k];
  }
  return m;
}

}  // namespace

EvolutionReport detect(const Scenario& s, const DetectOptions& opts) {
  s.validate();
  EvolutionReport rep;
  rep.scenario = s.name;
  rep.t_probe = s.t_probe > 0.0 ? s.t_probe : default_probe_time(s);
  const double h = s.grid.h();
  rep.area_floor = 10.0 * h * h;
  rep.ball_threshold = 3.0 * h;

  const int J = s.j_levels;
  std::vector<LevelSetField> init(2 * static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j) {
    init[2 * (j - 1)] = initial_field(make_outer_approx(s.profile, j, s.alpha), s);
    const auto lobes = make_inner_approx(s.profile, j, s.inner_unit);
    init[2 * (j - 1) + 1] = initial_field(profile_union(lobes.first, lobes.second), s);
  }
  const std::vector<double> times = probe_schedule(rep.t_probe, s.snapshots);
  std::vector<std::vector<LevelSetField>> runs(init.size());
  std::optional<FreeBoundarySolution> graph;
  const bool classify = round_neck(s) && s.graph_ds > 0.0 && s.apm_window > 0.0;
  EvolveOptions eo;
  eo.cfl = opts.cfl;
  run_tasks(init.size() + (classify ? 1 : 0), opts.threads, [&](std::size_t k) {
    if (k == init.size()) {
      GraphflowOptions go;
      graph = evolve_free_boundary(right_lobe(s.profile), s.n, s.A, s.apm_window, s.graph_ds, go);
      return;
    }
    runs[k] = evolve(init[k], rep.t_probe, times, eo);
  });
  if (classify) {
    rep.graph_monitor = monotonicity_monitor(*graph, mirrored(*graph));
    try {
      rep.assumption = classify_assumption(*graph, s.apm_window);
    } catch (const HorizonError&) {
      rep.assumption = Assumption::undetermined;
    }
  }

  // Sandwich U_j <= U_{j+1} <= E_{j+1} <= E_j at every snapshot.
  for (std::size_t q = 0; q < times.size(); ++q) {
    for (int j = 1; j <= J; ++j) {
      const GridSet E = extract_set(runs[2 * (j - 1)][q], SetKind::closed);
      const GridSet U = extract_set(runs[2 * (j - 1) + 1][q], SetKind::open);
      rep.sandwich_violations += containment_violations(U, E);
      if (j < J) {
        const GridSet E2 = extract_set(runs[2 * j][q], SetKind::closed);
        const GridSet U2 = extract_set(runs[2 * j + 1][q], SetKind::open);
        rep.sandwich_violations += containment_violations(E2, E);
        rep.sandwich_violations += containment_violations(U, U2);
      }
    }
  }

  for (int j = 1; j <= J; ++j) {
    const LevelSetField& fo = runs[2 * (j - 1)].back();
    const LevelSetField& fi = runs[2 * (j - 1) + 1].back();
    const GridSet E = extract_set(fo, SetKind::closed);
    const GridSet U = extract_set(fi, SetKind::open);
    GridSet gap = E;
    for (std::size_t k = 0; k < gap.mask.size(); ++k) gap.mask[k] = E.mask[k] && !U.mask[k];
    LevelEvidence ev;
    ev.j = j;
    ev.gap_area = gap.area();
    ev.ball_radius = inscribed_radius(gap);
    ev.perimeter = contour_length(zero_contour(fo));
    ev.components_outer_closed = count_components(E);
    ev.components_inner_open = count_components(U);
    rep.gap_area.push_back(ev.gap_area);
    rep.evidence.push_back(ev);
  }
  const LevelEvidence& fine = rep.evidence.back();
  const LevelEvidence& prev = rep.evidence[rep.evidence.size() - 2];
  rep.extrapolated_gap = std::max(0.0, 2.0 * fine.gap_area - prev.gap_area);
  rep.max_ball_radius = fine.ball_radius;
  rep.extrapolated_ball = std::max(0.0, 2.0 * fine.ball_radius - prev.ball_radius);
  rep.components_open = fine.components_inner_open;
  rep.components_closed = fine.components_outer_closed;
  if (rep.extrapolated_gap > rep.area_floor && rep.max_ball_radius >= rep.ball_threshold &&
      rep.extrapolated_ball >= rep.ball_threshold)
    rep.verdict = Verdict::fattening;
  else if (fine.gap_area < 4.0 * h * fine.perimeter && rep.extrapolated_ball < rep.ball_threshold)
    rep.verdict = Verdict::non_fattening;
  else
    rep.verdict = Verdict::inconclusive;

  rep.level_monitor = monotonicity_monitor(runs[2 * (J - 1)], runs[2 * (J - 1) + 1]);
  if (rep.assumption == Assumption::A_minus) {
    auto gap_at = [&](int j) {
      return hausdorff(zero_contour(runs[2 * (j - 1)].back()), zero_contour(runs[2 * (j - 1) + 1].back()));
    };
    const double fine_gap = gap_at(J);
    rep.boundary_gap = fine_gap;
    rep.extrapolated_boundary_gap = std::max(0.0, 2.0 * fine_gap - gap_at(J - 1));
  }
  if (opts.finest_fields) {
    opts.finest_fields->clear();
    opts.finest_fields->push_back(runs[2 * (J - 1)].back());
    opts.finest_fields->push_back(runs[2 * (J - 1) + 1].back());
  }
  return rep;
}

std::vector<SuiteCell> default_suite(const SuiteSettings& settings) {
  const double half = 1.2, top = 0.8;
  const HalfPlaneGrid g = HalfPlaneGrid::square(-half, half, top, settings.nx);
  const double graph_ds = 0.004;
  auto round = [&](const char* name, int n, double A, double neck, double window, Verdict v,
                   int open, int closed) {
    SuiteCell c;
    Scenario& s = c.scenario;
    s.name = name;
    s.profile = make_dumbbell_profile(kHalfPi, 1.0, neck, n);
    s.n = n;
    s.A = A;
    s.j_levels = settings.j_levels;
    s.grid = g;
    s.alpha = s.profile(neck / 2.0);
    s.inner_unit = 0.1;
    s.graph_ds = graph_ds;
    s.apm_window = window;
    c.expected = v;
    c.expected_open = open;
    c.expected_closed = closed;
    return c;
  };
  std::vector<SuiteCell> suite;
  suite.push_back(round("round_plus_n1", 1, 1.0, 0.25, 0.04, Verdict::fattening, 2, 1));
  suite.push_back(round("round_plus_n2", 2, 1.0, 0.25, 0.04, Verdict::fattening, 2, 1));
  suite.push_back(round("round_minus_n1", 1, 5.0, 0.4, 0.04, Verdict::non_fattening, 1, 1));
  suite.push_back(round("round_minus_n2", 2, 8.0, 0.4, 0.04, Verdict::non_fattening, 1, 1));

  auto cone = [&](const char* name, int n, double A, double gamma, double neck, Verdict v,
                  int open, int closed) {
    SuiteCell c;
    Scenario& s = c.scenario;
    s.name = name;
    s.profile = make_dumbbell_profile(gamma, 1.0, neck, n);
    s.n = n;
    s.A = A;
    s.j_levels = settings.j_levels;
    s.grid = g;
    s.alpha = s.profile(neck / 2.0);
    s.inner_unit = 0.1;
    c.expected = v;
    c.expected_open = open;
    c.expected_closed = closed;
    return c;
  };
  SuiteCell c1 = cone("cone_n1", 1, 1.0, std::numbers::pi / 3.0, 0.25, Verdict::fattening, 2, 1);
  c1.scenario.t_probe = 0.02;
  suite.push_back(c1);
  SuiteCell c3 = cone("cone_n3", 3, 1.0, 0.6 * critical_angle(3), 0.45, Verdict::non_fattening, 2, 2);
  SelfSimilarBarrier b;
  b.C = 1.3;
  b.rho = 1.1;
  b.n = 3;
  b.A = 1.0;
  find_tau0(b);
  c3.scenario.barrier = b;
  suite.push_back(c3);
  return suite;
}

std::vector<CellResult> reproduce_tables(const std::vector<SuiteCell>& suite,
                                         const DetectOptions& opts) {
  std::vector<CellResult> out;
  for (const auto& cell : suite) {
    CellResult r;
    r.name = cell.scenario.name;
    r.expected = cell.expected;
    r.report = detect(cell.scenario, opts);
    r.verdict_ok = r.report.verdict == cell.expected;
    r.components_ok = (cell.expected_open == 0 || r.report.components_open == cell.expected_open) &&
                      (cell.expected_closed == 0 || r.report.components_closed == cell.expected_closed);
    out.push_back(std::move(r));
  }
  return out;
}

CrosscheckReport barrier_crosscheck(const Scenario& s, const SelfSimilarBarrier& b, int snapshots,
                                    double cfl) {
  if (s.n < 2) throw PreconditionError("fattening", "barrier crosscheck needs n >= 2");
  if (b.n != s.n || b.A != s.A) throw PreconditionError("fattening", "barrier and scenario differ in n or A");
  const double gamma = s.profile.gamma;
  if (!(gamma < critical_angle(s.n, b.eps0)))
    throw PreconditionError("fattening", "gamma must lie below the critical angle");
  if (!(envelope_slope(b.C, b.rho) > std::tan(gamma)))
    throw PreconditionError("fattening", "envelope slope must exceed tan(gamma)");
  const ValidationReport vr = validate_supersolution_params(b);
  if (!vr.valid) throw PreconditionError("fattening", "barrier parameters are not admissible");

  SelfSimilarBarrier bb = b;
  if (bb.T > 0.0) {
    if (!barrier_above_profile(bb, s.profile, bb.T))
      throw PreconditionError("fattening", "barrier does not lie above the profile at s = 0; choose a smaller T");
  } else {
    bb.T = admissible_blowdown(bb, s.profile);
  }
  CrosscheckReport rep;
  rep.T = bb.T;
  rep.t_probe = s.t_probe > 0.0 ? s.t_probe : 0.25 * bb.T;
  if (!(rep.t_probe < bb.T)) throw PreconditionError("fattening", "t_probe must precede the blow-down time");

  s.grid.validate();
  const HalfPlaneGrid& g = s.grid;
  const std::vector<double> times = probe_schedule(rep.t_probe, snapshots);
  EvolveOptions eo;
  eo.cfl = cfl;
  const std::vector<LevelSetField> run = evolve(initial_field(s.profile, s), rep.t_probe, times, eo);
  const int i0 = static_cast<int>(std::lround(-g.x_min / g.hx));
  const double h = g.h();
  rep.certified = true;
  for (const auto& f : run) {
    const GridSet E = extract_set(f, SetKind::closed);
    const double lam = std::sqrt(2.0 * (bb.T - f.t));
    CrosscheckSnapshot snap;
    snap.t = f.t;
    snap.min_separation = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= g.nx; ++i) {
      const double x = g.x(i);
      if (std::abs(x) >= bb.rho * lam) continue;
      const double ub = selfsimilar_barrier_value(bb, x, f.t);
      for (int j = g.nr; j >= 0; --j) {
        if (!E.at(i, j)) continue;
        snap.min_separation = std::min(snap.min_separation, (ub - g.r(j)) / h);
        break;
      }
    }
    snap.origin_outside = !E.at(i0, 0);
    if (!(snap.min_separation >= 1.0) || !snap.origin_outside) rep.certified = false;
    rep.snapshots.push_back(snap);
  }
  return rep;
}

void write_report_json(const std::string& path, const EvolutionReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["verdict"] = to_string(r.verdict);
  j["t_probe"] = r.t_probe;
  j["gap_area"] = r.gap_area;
  j["extrapolated_gap"] = r.extrapolated_gap;
  j["max_ball_radius"] = r.max_ball_radius;
  j["extrapolated_ball"] = r.extrapolated_ball;
  j["area_floor"] = r.area_floor;
  j["ball_threshold"] = r.ball_threshold;
  j["components_open"] = r.components_open;
  j["components_closed"] = r.components_closed;
  j["assumption"] = r.assumption ? nlohmann::json(to_string(*r.assumption)) : nlohmann::json(nullptr);
  j["sandwich_violations"] = r.sandwich_violations;
  j["boundary_gap"] = r.boundary_gap ? nlohmann::json(*r.boundary_gap) : nlohmann::json(nullptr);
  j["extrapolated_boundary_gap"] =
      r.extrapolated_boundary_gap ? nlohmann::json(*r.extrapolated_boundary_gap) : nlohmann::json(nullptr);
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : r.evidence)
    ev.push_back({{"j", e.j},
                  {"gap_area", e.gap_area},
                  {"ball_radius", e.ball_radius},
                  {"perimeter", e.perimeter},
                  {"components_outer_closed", e.components_outer_closed},
                  {"components_inner_open", e.components_inner_open}});
  j["evidence"] = ev;
  auto monitor_json = [](const MonitorReport& m) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : m.entries)
      a.push_back({{"t", e.t}, {"Z", e.Z}, {"degenerate", e.degenerate}, {"violation", e.violation}});
    return nlohmann::json{{"violations", m.violations}, {"entries", a}};
  };
  j["level_monitor"] = monitor_json(r.level_monitor);
  j["graph_monitor"] = r.graph_monitor ? monitor_json(*r.graph_monitor) : nlohmann::json(nullptr);
  std::ofstream out(path);
  if (!out) throw InputError("fattening", "cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_verdict_csv(const std::string& path, const std::vector<CellResult>& cells) {
  std::ofstream out(path);
  if (!out) throw InputError("fattening", "cannot write " + path);
  out << "scenario,expected,verdict,components_open,components_closed,assumption,passed\n";
  for (const auto& c : cells)
    out << c.name << ',' << to_string(c.expected) << ',' << to_string(c.report.verdict) << ','
        << c.report.components_open << ',' << c.report.components_closed << ','
        << (c.report.assumption ? to_string(*c.report.assumption) : "") << ','
        << (c.passed() ? "true" : "false") << '\n';
}

}  // namespace pinch
