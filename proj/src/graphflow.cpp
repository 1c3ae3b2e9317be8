#include "pinch/graphflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "pinch/error.hpp"

namespace pinch {

namespace {

using Point = std::array<double, 2>;

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

std::vector<double> arclengths(const Polyline& c) {
  std::vector<double> s(c.size(), 0.0);
  for (std::size_t i = 1; i < c.size(); ++i) s[i] = s[i - 1] + dist(c[i - 1], c[i]);
  return s;
}

// Linear resampling by arclength into `segs` equal pieces.
Polyline resample_linear(const Polyline& c, int segs) {
  const std::vector<double> s = arclengths(c);
  Polyline out(segs + 1);
  std::size_t k = 0;
  for (int i = 0; i <= segs; ++i) {
    const double target = s.back() * i / segs;
    while (k + 2 < c.size() && s[k + 1] < target) ++k;
    const double span = s[k + 1] - s[k];
    const double w = span > 0.0 ? std::clamp((target - s[k]) / span, 0.0, 1.0) : 0.0;
    out[i] = {c[k][0] + w * (c[k + 1][0] - c[k][0]), c[k][1] + w * (c[k + 1][1] - c[k][1])};
  }
  out.front()[1] = 0.0;
  out.back()[1] = 0.0;
  return out;
}

// Cubic Hermite resampling by arclength; end tangents come from the mirror
// image across the axis.
Polyline resample_cubic(const Polyline& c, int segs) {
  const std::size_t N = c.size() - 1;
  const std::vector<double> s = arclengths(c);
  std::vector<Point> m(N + 1);
  m[0] = {0.0, c[1][1] / s[1]};
  m[N] = {0.0, -c[N - 1][1] / (s[N] - s[N - 1])};
  for (std::size_t i = 1; i < N; ++i) {
    const double d = s[i + 1] - s[i - 1];
    m[i] = {(c[i + 1][0] - c[i - 1][0]) / d, (c[i + 1][1] - c[i - 1][1]) / d};
  }
  Polyline out(segs + 1);
  std::size_t k = 0;
  for (int i = 0; i <= segs; ++i) {
    const double target = s.back() * i / segs;
    while (k + 1 < N && s[k + 1] < target) ++k;
    const double D = s[k + 1] - s[k];
    const double u = std::clamp((target - s[k]) / D, 0.0, 1.0);
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    for (int q = 0; q < 2; ++q)
      out[i][q] = h00 * c[k][q] + h10 * D * m[k][q] + h01 * c[k + 1][q] + h11 * D * m[k + 1][q];
  }
  out.front() = c.front();
  out.back() = c.back();
  return out;
}

// Replaces a cone tip at endpoint `end` (0 or last) by a round cap of the given
// radius tangent to the curve.
Polyline mollify_tip(const Polyline& c, bool at_front, double radius, double gamma) {
  Polyline w = c;
  if (!at_front) std::reverse(w.begin(), w.end());
  const Point O = w.front();
  const double side = w[1][0] >= O[0] ? 1.0 : -1.0;
  double d = radius / std::tan(gamma);
  std::size_t k = 1;
  while (k < w.size() && dist(w[k], O) < d) ++k;
  if (k + 2 >= w.size()) throw ResolutionError("graphflow", "cone tip cap does not fit the lobe");
  const Point P = w[k];
  d = dist(P, O);
  const double phi = std::atan2(P[1], side * (P[0] - O[0]));
  const double rad = d * std::tan(phi);
  const double cx = O[0] + side * d / std::cos(phi);
  // Arc from the axis point (cx - side*rad, 0) up to P.
  const double a0 = side > 0 ? std::numbers::pi : 0.0;
  const double a1 = std::atan2(P[1], P[0] - cx);
  const int pieces = 64;
  Polyline out;
  for (int q = 0; q < pieces; ++q) {
    const double a = a0 + (a1 - a0) * q / pieces;
    out.push_back({cx + rad * std::cos(a), q == 0 ? 0.0 : rad * std::sin(a)});
  }
  out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(k), w.end());
  if (!at_front) std::reverse(out.begin(), out.end());
  return out;
}

bool segments_cross(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  auto orient = [](const Point& a, const Point& b, const Point& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  };
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

bool self_intersects(const Polyline& c) {
  const std::size_t segs = c.size() - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    double xlo = std::min(c[i][0], c[i + 1][0]), xhi = std::max(c[i][0], c[i + 1][0]);
    for (std::size_t j = i + 2; j < segs; ++j) {
      if (std::max(c[j][0], c[j + 1][0]) < xlo || std::min(c[j][0], c[j + 1][0]) > xhi) continue;
      if (segments_cross(c[i], c[i + 1], c[j], c[j + 1])) return true;
    }
  }
  return false;
}

double interp(const std::vector<double>& ts, const std::vector<double>& v, double t) {
  if (ts.empty() || t < ts.front() || t > ts.back() * (1.0 + 1e-12) + 1e-300)
    throw HorizonError("graphflow", "time outside the stored horizon");
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.end()) return v.back();
  const std::size_t k = static_cast<std::size_t>(it - ts.begin());
  if (k == 0) return v.front();
  const double w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
  return (1.0 - w) * v[k - 1] + w * v[k];
}

double max_slope_above(const Polyline& c, double height) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    if (c[i][1] < height) continue;
    const double tx = c[i + 1][0] - c[i - 1][0], tr = c[i + 1][1] - c[i - 1][1];
    const double s = tx == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(tr / tx);
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace

double FreeBoundarySolution::a_at(double t) const { return interp(times, a_star, t); }
double FreeBoundarySolution::b_at(double t) const { return interp(times, b_star, t); }

const char* to_string(Assumption a) {
  switch (a) {
    case Assumption::A_plus: return "A_plus";
    case Assumption::A_minus: return "A_minus";
    default: return "undetermined";
  }
}

Polyline initial_curve(const ProfileCurve& p0, double ds, double mollify_radius) {
  if (!(ds > 0.0)) throw ParameterError("graphflow", "ds must be positive");
  if (p0.size() < 3) throw ParameterError("graphflow", "profile has too few samples");
  std::size_t first = p0.size(), last = 0, runs = 0;
  for (std::size_t k = 0; k < p0.size(); ++k) {
    if (p0.u[k] > 0.0) {
      if (k == 0 || p0.u[k - 1] <= 0.0) ++runs;
      first = std::min(first, k);
      last = k;
    }
  }
  if (runs == 0) throw EmptyLobeError("graphflow", "profile has no positive part");
  if (runs > 1) throw ParameterError("graphflow", "profile must consist of a single lobe");
  if (first == 0 || last + 1 == p0.size())
    throw ParameterError("graphflow", "lobe must end on the axis inside the mesh");
  Polyline raw;
  raw.push_back({p0.x[first - 1], 0.0});
  for (std::size_t k = first; k <= last; ++k) raw.push_back({p0.x[k], p0.u[k]});
  raw.push_back({p0.x[last + 1], 0.0});

  const double fine = std::min(ds / 4.0, arclengths(raw).back() / 64.0);
  Polyline c = resample_linear(raw, static_cast<int>(std::ceil(arclengths(raw).back() / fine)));
  const bool cone = p0.gamma < std::numbers::pi / 2.0 - 1e-12;
  if (cone) {
    if (!(p0.gamma > 0.0)) throw ParameterError("graphflow", "cone tip needs gamma > 0");
    const double rad = mollify_radius > 0.0 ? mollify_radius : 6.0 * ds;
    const double tol = 1e-9 + p0.dx();
    if (std::abs(c.front()[0]) <= tol) c = mollify_tip(c, true, rad, p0.gamma);
    if (std::abs(c.back()[0]) <= tol) c = mollify_tip(c, false, rad, p0.gamma);
  }
  const double L = arclengths(c).back();
  const int segs = std::max(16, static_cast<int>(std::lround(L / ds)));
  return resample_linear(c, segs);
}

FreeBoundarySolution evolve_free_boundary(const ProfileCurve& p0, int n, double A, double t_end,
                                          double ds, const GraphflowOptions& opts) {
  if (n < 1) throw ParameterError("graphflow", "n must be >= 1");
  if (!(t_end > 0.0)) throw ParameterError("graphflow", "t_end must be positive");
  if (!(opts.cfl > 0.0) || opts.cfl > 0.5) throw ParameterError("graphflow", "cfl must lie in (0, 0.5]");
  Polyline c = initial_curve(p0, ds, opts.mollify_radius);

  std::vector<double> stops = opts.snapshot_times;
  if (stops.empty())
    for (int q = 1; q <= std::max(1, opts.store_count); ++q) stops.push_back(t_end * q / opts.store_count);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::remove_if(stops.begin(), stops.end(), [&](double s) { return s <= 0.0 || s > t_end; }),
              stops.end());
  if (stops.empty() || stops.back() < t_end) stops.push_back(t_end);

  FreeBoundarySolution sol;
  sol.n = n;
  sol.A = A;
  sol.ds = ds;
  double rho = 0.0;
  for (const auto& q : c) rho = std::max(rho, q[1]);
  auto store = [&](double t) {
    sol.times.push_back(t);
    sol.curves.push_back(c);
    sol.a_star.push_back(c.front()[0]);
    sol.b_star.push_back(c.back()[0]);
    const double s = max_slope_above(c, rho / 4.0);
    sol.max_slope.push_back(s);
    if (s > opts.slope_bound) ++sol.slope_violations;
  };
  store(0.0);

  const double kappa_stop = 1.0 / (5.0 * ds);
  std::vector<Point> vel, shift;
  std::vector<double> kappa;
  double t = 0.0;
  std::size_t next = 0;
  long steps = 0;
  auto stop = [&](const char* why) {
    if (sol.times.back() < t) store(t);
    sol.blowup_time = t;
    sol.stop_reason = why;
  };

  while (next < stops.size()) {
    const std::size_t N = c.size() - 1;
    vel.assign(N + 1, {0.0, 0.0});
    shift.assign(N + 1, {0.0, 0.0});
    kappa.assign(N + 1, 0.0);
    double hmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) hmin = std::min(hmin, dist(c[i], c[i + 1]));
    if (!(hmin > 0.0)) throw TopologyError("graphflow", "coincident nodes");

    for (std::size_t i = 0; i <= N; ++i) {
      const Point P = c[i];
      const Point Pm = i == 0 ? Point{c[1][0], -c[1][1]} : c[i - 1];
      const Point Pp = i == N ? Point{c[N - 1][0], -c[N - 1][1]} : c[i + 1];
      const double hm = dist(P, Pm), hp = dist(Pp, P);
      const double tx0 = Pp[0] - Pm[0], tr0 = Pp[1] - Pm[1];
      const double tl = std::hypot(tx0, tr0);
      const double tx = tx0 / tl, tr = tr0 / tl;
      const double nx = -tr, nr = tx;
      const double f = 2.0 / (hm + hp);
      const double Kx = f * ((Pp[0] - P[0]) / hp - (P[0] - Pm[0]) / hm);
      const double Kr = f * ((Pp[1] - P[1]) / hp - (P[1] - Pm[1]) / hm);
      const double kp = -(Kx * nx + Kr * nr);
      // On the axis the rotational term tends to (n-1) times the planar one.
      const double rot = (i == 0 || i == N) ? (n - 1) * kp : (n - 1) * nr / P[1];
      kappa[i] = kp;
      const double V = -(kp + rot) + A;
      vel[i] = {V * nx, V * nr};
      if (i != 0 && i != N) shift[i] = {0.25 * (hp - hm) * tx, 0.25 * (hp - hm) * tr};
    }

    double kmax = 0.0;
    for (double k : kappa) kmax = std::max(kmax, std::abs(k));
    if (kmax > kappa_stop) {
      stop("curvature");
      break;
    }
    double neck = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i + 2 <= N; ++i)
      if (c[i][1] <= c[i - 1][1] && c[i][1] <= c[i + 1][1]) neck = std::min(neck, c[i][1]);
    if (neck <= 2.0 * ds) {
      stop("neck");
      break;
    }
    if (c.back()[0] - c.front()[0] <= 4.0 * ds) {
      stop("extinction");
      break;
    }

    double dt = opts.cfl * hmin * hmin / (2.0 * n);
    if (A != 0.0) dt = std::min(dt, 0.5 * hmin / std::abs(A));
    bool hit = false;
    if (t + dt >= stops[next]) {
      dt = stops[next] - t;
      hit = true;
    }
    for (std::size_t i = 0; i <= N; ++i) {
      c[i][0] += dt * vel[i][0] + shift[i][0];
      c[i][1] += dt * vel[i][1] + shift[i][1];
    }
    c.front()[1] = 0.0;
    c.back()[1] = 0.0;
    t = hit ? stops[next] : t + dt;
    ++steps;

    for (std::size_t i = 1; i < N; ++i)
      if (!(c[i][1] > 0.0)) throw TopologyError("graphflow", "curve reached the axis between its endpoints");
    if (opts.intersection_check_every > 0 && steps % opts.intersection_check_every == 0 &&
        self_intersects(c))
      throw TopologyError("graphflow", "curve self-intersects");

    const double L = arclengths(c).back();
    const double mean = L / static_cast<double>(N);
    if (mean < 0.75 * ds || mean > 1.33 * ds) {
      const int segs = std::max(16, static_cast<int>(std::lround(L / ds)));
      c = resample_cubic(c, segs);
    }
    if (hit) {
      store(t);
      ++next;
    }
  }
  if (sol.stop_reason.empty()) sol.stop_reason = "t_end";
  return sol;
}

Assumption classify_assumption(const FreeBoundarySolution& sol, double delta) {
  if (!(delta > 0.0)) throw ParameterError("graphflow", "delta must be positive");
  if (sol.horizon() < delta * (1.0 - 1e-12))
    throw HorizonError("graphflow", "solution horizon is shorter than delta");
  const double tol = 2.0 * sol.ds;
  bool all_above = true, all_below = true;
  double last = 0.0;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const double t = sol.times[k];
    if (t <= 0.0 || t > delta * (1.0 + 1e-12)) continue;
    const double a = sol.a_star[k];
    all_above = all_above && a >= -tol;
    all_below = all_below && a <= tol;
    last = a;
  }
  if (all_above && last > tol) return Assumption::A_plus;
  if (all_below && last < -tol) return Assumption::A_minus;
  return Assumption::undetermined;
}

double endpoint_speed(const FreeBoundarySolution& sol, double window) {
  if (!(window > 0.0)) throw InputError("graphflow", "window must be positive");
  return (sol.a_at(window) - sol.a_at(0.0)) / window;
}

double cap_speed_estimate(double gamma, double A, double neck_radius) {
  if (!(gamma >= 0.0) || gamma >= std::numbers::pi / 2.0 - 1e-12)
    throw ParameterError("graphflow", "gamma must lie in [0, pi/2)");
  if (!(neck_radius > 0.0)) throw ParameterError("graphflow", "neck_radius must be positive");
  return 1.0 / (neck_radius * std::cos(std::numbers::pi / 2.0 - gamma)) - A;
}

void write_endpoints_csv(const std::string& path, const FreeBoundarySolution& sol) {
  std::ofstream out(path);
  if (!out) throw InputError("graphflow", "cannot write " + path);
  out.precision(17);
  out << "t,a_star,b_star\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k)
    out << sol.times[k] << ',' << sol.a_star[k] << ',' << sol.b_star[k] << '\n';
}

void write_curves_csv(const std::string& path, const FreeBoundarySolution& sol) {
  std::ofstream out(path);
  if (!out) throw InputError("graphflow", "cannot write " + path);
  out.precision(17);
  out << "t,x,r\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k)
    for (const auto& q : sol.curves[k]) out << sol.times[k] << ',' << q[0] << ',' << q[1] << '\n';
}

}  // namespace pinch
