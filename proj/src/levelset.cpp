#include "pinch/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "pinch/error.hpp"

namespace pinch {

namespace {

constexpr int kGhost = 3;

// First-quadrant stencil directions (a, b), |a|, |b| <= 3, sorted by angle.
constexpr int kNumDirs = 9;
constexpr int kDirs[kNumDirs][2] = {{1, 0}, {3, 1}, {2, 1}, {3, 2}, {1, 1},
                                    {2, 3}, {1, 2}, {1, 3}, {0, 1}};

struct Stencil {
  double ex[kNumDirs], er[kNumDirs], len2[kNumDirs], inv_len2[kNumDirs];
  explicit Stencil(const HalfPlaneGrid& g) {
    for (int k = 0; k < kNumDirs; ++k) {
      const double vx = kDirs[k][0] * g.hx, vr = kDirs[k][1] * g.hr;
      len2[k] = vx * vx + vr * vr;
      inv_len2[k] = 1.0 / len2[k];
      const double l = std::sqrt(len2[k]);
      ex[k] = vx / l;
      er[k] = vr / l;
    }
  }
  // Non-negative weights on the two directions bracketing the unit vector
  // (tx, tr) in the first quadrant, matching the tt and tn moments.
  void weights(double tx, double tr, int& k, double& w1, double& w2) const {
    k = 0;
    while (k < kNumDirs - 2 && tx * er[k + 1] - tr * ex[k + 1] < 0.0) ++k;
    const double s1 = tx * er[k] - tr * ex[k];
    const double c1 = tx * ex[k] + tr * er[k];
    const double s2 = tx * er[k + 1] - tr * ex[k + 1];
    const double c2 = tx * ex[k + 1] + tr * er[k + 1];
    const double inv = 1.0 / ((s1 * c2 - c1 * s2) * c1 * c2);
    w1 = -s2 * c2 * inv;
    w2 = s1 * c1 * inv;
  }
};

double curvature_coefficient_bound(const HalfPlaneGrid& g) {
  const Stencil st(g);
  double worst = 0.0;
  const int samples = 4096;
  for (int q = 0; q <= samples; ++q) {
    const double th = 0.5 * M_PI * q / samples;
    int k;
    double w1, w2;
    st.weights(std::cos(th), std::sin(th), k, w1, w2);
    worst = std::max(worst, 2.0 * (w1 * st.inv_len2[k] + w2 * st.inv_len2[k + 1]));
  }
  return worst;
}

// Copies psi into a buffer with kGhost layers: mirror below the axis,
// constant extension (or periodic wrap) elsewhere.
void fill_padded(const LevelSetField& f, std::vector<double>& P) {
  const HalfPlaneGrid& g = f.grid;
  const int S = g.cols() + 2 * kGhost;
  const int T = g.rows() + 2 * kGhost;
  P.resize(static_cast<std::size_t>(S) * T);
  for (int J = 0; J < T; ++J) {
    int j = J - kGhost;
    if (j < 0) j = -j;
    if (j > g.nr) j = g.nr;
    const double* row = &f.psi[g.index(0, j)];
    double* dst = &P[static_cast<std::size_t>(J) * S];
    std::memcpy(dst + kGhost, row, sizeof(double) * g.cols());
    for (int q = 1; q <= kGhost; ++q) {
      if (g.periodic_x) {
        dst[kGhost - q] = row[g.nx - q];
        dst[kGhost + g.nx + q] = row[q];
      } else {
        dst[kGhost - q] = row[0];
        dst[kGhost + g.nx + q] = row[g.nx];
      }
    }
  }
}

}  // namespace

std::size_t GridSet::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

double stable_dt(const HalfPlaneGrid& g, int n, double A, double cfl) {
  if (n < 1) throw ParameterError("levelset", "n must be >= 1");
  if (!(cfl > 0.0) || cfl > 0.9) throw ParameterError("levelset", "cfl must lie in (0, 0.9]");
  const double curv = curvature_coefficient_bound(g);
  const double adv = std::abs(A) * std::sqrt(1.0 / (g.hx * g.hx) + 1.0 / (g.hr * g.hr));
  return cfl / (curv + adv);
}

namespace {

void advance(const LevelSetField& f, double dt, LevelSetField& out) {
  const HalfPlaneGrid& g = f.grid;

  thread_local std::vector<double> P;
  fill_padded(f, P);
  const int S = g.cols() + 2 * kGhost;
  const Stencil st(g);
  // Offsets for the first-quadrant directions, then their x-mirrors.
  int off[2 * kNumDirs];
  for (int k = 0; k < kNumDirs; ++k) {
    off[k] = kDirs[k][1] * S + kDirs[k][0];
    off[kNumDirs + k] = kDirs[k][1] * S - kDirs[k][0];
  }
  const double eps = 1e-6 * g.h_min();
  const double eps2 = eps * eps;
  const double inv2hx = 0.5 / g.hx, inv2hr = 0.5 / g.hr;
  const double ihx = 1.0 / g.hx, ihr = 1.0 / g.hr;
  const double A = f.A;
  const int nm1 = f.n - 1;

  out.grid = g;
  out.A = f.A;
  out.n = f.n;
  out.clamp = f.clamp;
  out.t = f.t + dt;
  out.psi.resize(g.size());

  for (int j = 0; j <= g.nr; ++j) {
    const double rot = j == 0 ? 2.0 * nm1 * ihr * ihr : nm1 / (j * g.hr) * ihr;
    const double* base = &P[static_cast<std::size_t>(j + kGhost) * S + kGhost];
    double* dst = &out.psi[g.index(0, j)];
    for (int i = 0; i <= g.nx; ++i) {
      const double* p = base + i;
      const double c = p[0];
      const double xp = p[1], xm = p[-1], rp = p[S], rm = p[-S];
      if (xp == c && xm == c && rp == c && rm == c) {
        // Every term of the update vanishes when the 4-neighbourhood is flat.
        dst[i] = c;
        continue;
      }
      const double dxm = (c - xm) * ihx, dxp = (xp - c) * ihx;
      const double drm = (c - rm) * ihr, drp = (rp - c) * ihr;
      // Direction of the level line: central differences, except across a
      // kink where the steeper side is used. A kink along x needs one-sided
      // slopes of opposite sign that both exceed the central r slope, and
      // likewise along r (the mirrored axis row included). Exact ties are
      // resolved by averaging both sides.
      bool tie_x = false, tie_r = false;
      double gx = (xp - xm) * inv2hx;
      double gr = (rp - rm) * inv2hr;
      const bool kink_x = dxm * dxp < 0.0 && std::min(std::abs(dxm), std::abs(dxp)) > std::abs(gr);
      const bool kink_r = drm * drp < 0.0 && std::min(std::abs(drm), std::abs(drp)) > std::abs(gx);
      if (kink_x) {
        const double am = std::abs(dxm), ap = std::abs(dxp);
        gx = am > ap ? dxm : dxp;
        tie_x = am == ap;
      }
      if (kink_r) {
        const double am = std::abs(drm), ap = std::abs(drp);
        gr = am > ap ? drm : drp;
        tie_r = am == ap;
      }
      // A kink along one axis is followed as a straight ridge or valley.
      if (kink_x && !kink_r) gr = 0.0;
      if (kink_r && !kink_x) gx = 0.0;
      double rate = 0.0;
      double wr = 0.0;  // curvature weight on the pure r-neighbours
      auto curvature = [&](double ux, double ur) {
        const double g2 = ux * ux + ur * ur;
        if (!(g2 > 0.0)) return;
        const double inv_gn = 1.0 / std::sqrt(g2);
        int k;
        double w1, w2;
        st.weights(std::abs(ur) * inv_gn, std::abs(ux) * inv_gn, k, w1, w2);
        const int* o = off + (ur * ux > 0.0) * kNumDirs;
        const double sd1 = (p[o[k]] + p[-o[k]] - 2.0 * c) * st.inv_len2[k];
        const double sd2 = (p[o[k + 1]] + p[-o[k + 1]] - 2.0 * c) * st.inv_len2[k + 1];
        const double reg = g2 / (g2 + eps2);
        rate += (w1 * sd1 + w2 * sd2) * reg;
        if (k == kNumDirs - 2) wr += w2 * reg * st.inv_len2[kNumDirs - 1];
      };
      // Opposite kinks meet at a saddle vertex, which stays put.
      const bool saddle = kink_x && kink_r && (dxp > 0.0) != (drp > 0.0);
      if (saddle) {
      } else if (!tie_x && !tie_r) {
        curvature(gx, gr);
      } else {
        const int nxs = tie_x ? 2 : 1, nrs = tie_r ? 2 : 1;
        for (int a = 0; a < nxs; ++a)
          for (int b = 0; b < nrs; ++b) curvature(a ? -gx : gx, b ? -gr : gr);
        const double inv = 1.0 / (nxs * nrs);
        rate *= inv;
        wr *= inv;
      }
      double stiff = 0.0;  // rotational coefficient on the centre, taken implicitly
      if (nm1 > 0) {
        if (j == 0) {
          rate += rot * (rp - c);
          stiff = rot;
        } else {
          // Central difference where the r-diffusion keeps the r-1 weight
          // non-negative, one-sided otherwise.
          const double theta = std::min(1.0, wr / (0.5 * rot));
          rate += rot * ((1.0 - theta) * (rp - c) + 0.5 * theta * (rp - rm));
          stiff = rot * (1.0 - theta);
        }
      }
      if (A != 0.0) {
        double ax, ar;
        if (A > 0.0) {
          ax = std::max(std::max(dxp, 0.0), -std::min(dxm, 0.0));
          ar = std::max(std::max(drp, 0.0), -std::min(drm, 0.0));
        } else {
          ax = std::max(std::max(dxm, 0.0), -std::min(dxp, 0.0));
          ar = std::max(std::max(drm, 0.0), -std::min(drp, 0.0));
        }
        rate += A * std::sqrt(ax * ax + ar * ar);
      }
      dst[i] = c + dt * rate / (1.0 + dt * stiff);
    }
  }
  if (g.periodic_x)
    for (int j = 0; j <= g.nr; ++j) out.psi[g.index(g.nx, j)] = out.psi[g.index(0, j)];
}

}  // namespace

void step_into(const LevelSetField& f, double dt, LevelSetField& out, double cfl) {
  if (f.n < 1) throw ParameterError("levelset", "n must be >= 1");
  const double dt_max = stable_dt(f.grid, f.n, f.A, cfl);
  if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12))
    throw StabilityError("levelset", "dt exceeds the stability bound");
  advance(f, dt, out);
}

LevelSetField step(const LevelSetField& f, double dt, double cfl) {
  LevelSetField out;
  step_into(f, dt, out, cfl);
  return out;
}

std::vector<LevelSetField> evolve(const LevelSetField& f, double t_end,
                                  const std::vector<double>& snapshot_times,
                                  const EvolveOptions& opts) {
  std::vector<LevelSetField> snaps;
  if (snapshot_times.empty() && t_end == f.t) return snaps;
  if (!(t_end > f.t)) throw ParameterError("levelset", "t_end must exceed the field time");
  double prev = f.t;
  for (double s : snapshot_times) {
    if (!(s > prev) || s > t_end)
      throw ParameterError("levelset", "snapshot times must be sorted within (t, t_end]");
    prev = s;
  }
  std::vector<double> stops = snapshot_times;
  if (stops.empty() || stops.back() < t_end) stops.push_back(t_end);

  const double dt_max = stable_dt(f.grid, f.n, f.A, opts.cfl);
  LevelSetField cur = f;
  LevelSetField nxt;
  auto clip = [&](LevelSetField& fld) {
    if (opts.band > 0.0)
      for (double& v : fld.psi) v = std::clamp(v, -opts.band, opts.band);
  };
  clip(cur);
  long steps = 0;
  std::size_t si = 0;
  for (double stop : stops) {
    while (cur.t < stop) {
      const double remaining = stop - cur.t;
      const bool last = remaining <= dt_max * (1.0 + 1e-9);
      advance(cur, last ? remaining : dt_max, nxt);
      if (last) nxt.t = stop;
      clip(nxt);
      std::swap(cur, nxt);
      ++steps;
      if (opts.reinit_every > 0 && steps % opts.reinit_every == 0)
        reinitialize(cur, opts.reinit_iterations);
      if (opts.observer) opts.observer(cur);
    }
    if (si < snapshot_times.size() && stop == snapshot_times[si]) {
      snaps.push_back(cur);
      ++si;
    }
  }
  return snaps;
}

void reinitialize(LevelSetField& f, int iterations) {
  const HalfPlaneGrid& g = f.grid;
  const std::vector<double> psi0 = f.psi;
  const double h = g.h_min();
  const double dtau = 0.3 * h;
  std::vector<double> P;
  const int S = g.cols() + 2 * kGhost;
  for (int it = 0; it < iterations; ++it) {
    fill_padded(f, P);
    for (int j = 0; j <= g.nr; ++j) {
      for (int i = 0; i <= g.nx; ++i) {
        const double* p = &P[static_cast<std::size_t>(j + kGhost) * S + kGhost + i];
        const double s0 = psi0[g.index(i, j)];
        if (std::abs(s0) >= f.clamp) continue;
        const double sgn = s0 / std::sqrt(s0 * s0 + h * h);
        const double dxm = (p[0] - p[-1]) / g.hx, dxp = (p[1] - p[0]) / g.hx;
        const double drm = (p[0] - p[-S]) / g.hr, drp = (p[S] - p[0]) / g.hr;
        double ax, ar;
        if (sgn > 0.0) {
          ax = std::max(std::max(dxm, 0.0), -std::min(dxp, 0.0));
          ar = std::max(std::max(drm, 0.0), -std::min(drp, 0.0));
        } else {
          ax = std::max(std::max(dxp, 0.0), -std::min(dxm, 0.0));
          ar = std::max(std::max(drp, 0.0), -std::min(drm, 0.0));
        }
        const double v = p[0] - dtau * sgn * (std::sqrt(ax * ax + ar * ar) - 1.0);
        f.psi[g.index(i, j)] = std::clamp(v, -f.clamp, f.clamp);
      }
    }
  }
}

GridSet extract_set(const LevelSetField& f, SetKind kind, double theta) {
  GridSet s;
  s.grid = f.grid;
  s.kind = kind;
  s.t = f.t;
  s.n = f.n;
  s.mask.resize(f.psi.size());
  for (std::size_t k = 0; k < f.psi.size(); ++k)
    s.mask[k] = kind == SetKind::open ? (f.psi[k] > theta) : (f.psi[k] >= -theta);
  return s;
}

int count_components(const GridSet& s) {
  const HalfPlaneGrid& g = s.grid;
  std::vector<int> label(g.size(), -1);
  int touching = 0, free = 0;
  std::deque<std::pair<int, int>> queue;
  for (int j0 = 0; j0 <= g.nr; ++j0) {
    for (int i0 = 0; i0 <= g.nx; ++i0) {
      const std::size_t k0 = g.index(i0, j0);
      if (!s.mask[k0] || label[k0] >= 0) continue;
      bool on_axis = false;
      label[k0] = 1;
      queue.emplace_back(i0, j0);
      while (!queue.empty()) {
        auto [i, j] = queue.front();
        queue.pop_front();
        if (j == 0) on_axis = true;
        const int ni[4] = {i + 1, i - 1, i, i};
        const int nj[4] = {j, j, j + 1, j - 1};
        for (int q = 0; q < 4; ++q) {
          int a = ni[q];
          const int b = nj[q];
          if (b < 0 || b > g.nr) continue;
          if (a < 0 || a > g.nx) {
            if (!g.periodic_x) continue;
            a = (a + g.nx) % g.nx;
          }
          const std::size_t k = g.index(a, b);
          if (s.mask[k] && label[k] < 0) {
            label[k] = 1;
            queue.emplace_back(a, b);
          }
        }
      }
      (on_axis ? touching : free) += 1;
    }
  }
  return s.n == 1 ? touching + 2 * free : touching + free;
}

std::vector<Polyline> zero_contour(const LevelSetField& f, double level) {
  const HalfPlaneGrid& g = f.grid;
  // Edge ids: horizontal edge (i,j)-(i+1,j) -> 2*index, vertical (i,j)-(i,j+1) -> 2*index+1.
  auto hkey = [&](int i, int j) { return 2 * static_cast<long>(g.index(i, j)); };
  auto vkey = [&](int i, int j) { return 2 * static_cast<long>(g.index(i, j)) + 1; };
  std::map<long, std::array<double, 2>> point;
  std::map<long, std::vector<long>> adj;
  auto val = [&](int i, int j) { return f.at(i, j) - level; };
  auto edge_point = [&](long key) -> std::array<double, 2> {
    const auto it = point.find(key);
    if (it != point.end()) return it->second;
    const long idx = key / 2;
    const int i = static_cast<int>(idx % g.cols());
    const int j = static_cast<int>(idx / g.cols());
    const int i2 = (key % 2 == 0) ? i + 1 : i;
    const int j2 = (key % 2 == 0) ? j : j + 1;
    const double a = val(i, j), b = val(i2, j2);
    const double s = a / (a - b);
    std::array<double, 2> pt = {g.x(i) + s * (g.x(i2) - g.x(i)), g.r(j) + s * (g.r(j2) - g.r(j))};
    point[key] = pt;
    return pt;
  };
  auto link = [&](long a, long b) {
    edge_point(a);
    edge_point(b);
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int j = 0; j < g.nr; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double v0 = val(i, j), v1 = val(i + 1, j), v2 = val(i + 1, j + 1), v3 = val(i, j + 1);
      const int c = (v0 >= 0) | ((v1 >= 0) << 1) | ((v2 >= 0) << 2) | ((v3 >= 0) << 3);
      if (c == 0 || c == 15) continue;
      const long eb = hkey(i, j), er = vkey(i + 1, j), et = hkey(i, j + 1), el = vkey(i, j);
      switch (c) {
        case 1: case 14: link(el, eb); break;
        case 2: case 13: link(eb, er); break;
        case 3: case 12: link(el, er); break;
        case 4: case 11: link(er, et); break;
        case 6: case 9: link(eb, et); break;
        case 7: case 8: link(el, et); break;
        case 5: case 10: {
          const bool center_in = 0.25 * (v0 + v1 + v2 + v3) >= 0.0;
          if ((c == 5) == center_in) {
            link(el, et);
            link(eb, er);
          } else {
            link(el, eb);
            link(er, et);
          }
          break;
        }
        default: break;
      }
    }
  }
  std::vector<Polyline> lines;
  std::map<long, std::size_t> used;
  auto walk = [&](long start) {
    Polyline line;
    long prev = -1, cur = start;
    while (true) {
      line.push_back(point[cur]);
      used[cur] = 1;
      long next = -1;
      for (long nb : adj[cur])
        if (nb != prev && !used.count(nb)) {
          next = nb;
          break;
        }
      if (next < 0) {
        for (long nb : adj[cur])
          if (nb == start && nb != prev && line.size() > 2) line.push_back(point[start]);
        break;
      }
      prev = cur;
      cur = next;
    }
    lines.push_back(std::move(line));
  };
  for (auto& [key, nbs] : adj)
    if (nbs.size() == 1 && !used.count(key)) walk(key);
  for (auto& [key, nbs] : adj)
    if (!used.count(key)) walk(key);
  return lines;
}

namespace {

double point_segment_distance(const std::array<double, 2>& p, const std::array<double, 2>& a,
                              const std::array<double, 2>& b) {
  const double vx = b[0] - a[0], vr = b[1] - a[1];
  const double wx = p[0] - a[0], wr = p[1] - a[1];
  const double l2 = vx * vx + vr * vr;
  double s = l2 > 0.0 ? (vx * wx + vr * wr) / l2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(wx - s * vx, wr - s * vr);
}

double directed_hausdorff(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
  double worst = 0.0;
  for (const auto& la : a) {
    for (std::size_t q = 0; q < la.size(); ++q) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& lb : b) {
        if (lb.size() == 1) best = std::min(best, point_segment_distance(la[q], lb[0], lb[0]));
        for (std::size_t k = 0; k + 1 < lb.size(); ++k)
          best = std::min(best, point_segment_distance(la[q], lb[k], lb[k + 1]));
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace

double hausdorff(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

std::vector<double> axis_crossings(const LevelSetField& f) {
  std::vector<double> xs;
  const HalfPlaneGrid& g = f.grid;
  for (int i = 0; i < g.nx; ++i) {
    const double a = f.at(i, 0), b = f.at(i + 1, 0);
    if ((a > 0.0) != (b > 0.0)) xs.push_back(g.x(i) + g.hx * a / (a - b));
  }
  return xs;
}

bool relabel_invariance_check(const ProfileCurve& p, const HalfPlaneGrid& g, double t,
                              double A, int n, double tol_cells) {
  LevelSetField f1 = signed_distance(p, g, 1.0);
  f1.A = A;
  f1.n = n;
  LevelSetField f2 = f1;
  for (double& v : f2.psi) v = std::tanh(v);
  std::vector<Polyline> c1, c2;
  if (t > f1.t) {
    c1 = zero_contour(evolve(f1, t, {t}).back());
    c2 = zero_contour(evolve(f2, t, {t}).back());
  } else {
    c1 = zero_contour(f1);
    c2 = zero_contour(f2);
  }
  return hausdorff(c1, c2) <= tol_cells * g.h();
}

namespace {

nlohmann::json grid_json(const HalfPlaneGrid& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"r_max", g.r_max}, {"hx", g.hx},
          {"hr", g.hr},       {"nx", g.nx},       {"nr", g.nr},       {"periodic_x", g.periodic_x}};
}

}  // namespace

void write_grid_dump(const std::string& path_base, const LevelSetField& f) {
  std::ofstream bin(path_base + ".bin", std::ios::binary);
  if (!bin) throw InputError("levelset", "cannot write " + path_base + ".bin");
  bin.write(reinterpret_cast<const char*>(f.psi.data()),
            static_cast<std::streamsize>(f.psi.size() * sizeof(double)));
  nlohmann::json side = {{"grid", grid_json(f.grid)},
                         {"t", f.t},
                         {"A", f.A},
                         {"n", f.n},
                         {"clamp", f.clamp},
                         {"dtype", "float64"},
                         {"layout", "row-major, rows along x, row 0 on the axis"},
                         {"shape", {f.grid.rows(), f.grid.cols()}}};
  std::ofstream js(path_base + ".json");
  js << side.dump(2) << '\n';
}

LevelSetField read_grid_dump(const std::string& path_base) {
  std::ifstream js(path_base + ".json");
  if (!js) throw InputError("levelset", "cannot read " + path_base + ".json");
  const nlohmann::json side = nlohmann::json::parse(js);
  LevelSetField f;
  const auto& gj = side.at("grid");
  f.grid.x_min = gj.at("x_min");
  f.grid.x_max = gj.at("x_max");
  f.grid.r_max = gj.at("r_max");
  f.grid.hx = gj.at("hx");
  f.grid.hr = gj.at("hr");
  f.grid.nx = gj.at("nx");
  f.grid.nr = gj.at("nr");
  f.grid.periodic_x = gj.at("periodic_x");
  f.t = side.at("t");
  f.A = side.at("A");
  f.n = side.at("n");
  f.clamp = side.at("clamp");
  f.psi.resize(f.grid.size());
  std::ifstream bin(path_base + ".bin", std::ios::binary);
  bin.read(reinterpret_cast<char*>(f.psi.data()),
           static_cast<std::streamsize>(f.psi.size() * sizeof(double)));
  if (!bin) throw InputError("levelset", "truncated dump " + path_base + ".bin");
  return f;
}

void write_mask_dump(const std::string& path_base, const GridSet& s) {
  std::ofstream bin(path_base + ".bin", std::ios::binary);
  if (!bin) throw InputError("levelset", "cannot write " + path_base + ".bin");
  bin.write(reinterpret_cast<const char*>(s.mask.data()),
            static_cast<std::streamsize>(s.mask.size()));
  nlohmann::json side = {{"grid", grid_json(s.grid)},
                         {"t", s.t},
                         {"n", s.n},
                         {"kind", s.kind == SetKind::open ? "open" : "closed"},
                         {"dtype", "uint8"},
                         {"shape", {s.grid.rows(), s.grid.cols()}}};
  std::ofstream js(path_base + ".json");
  js << side.dump(2) << '\n';
}

void write_contour_csv(const std::string& path,
                       const std::vector<std::pair<double, std::vector<Polyline>>>& contours) {
  std::ofstream out(path);
  if (!out) throw InputError("levelset", "cannot write " + path);
  out.precision(12);
  out << "t,x,r\n";
  for (const auto& [t, lines] : contours)
    for (const auto& line : lines) {
      for (const auto& pt : line) out << t << ',' << pt[0] << ',' << pt[1] << '\n';
    }
}

}  // namespace pinch
