#include "pinch/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "pinch/error.hpp"

namespace pinch {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

bool is_right_angle(double gamma) { return gamma >= kHalfPi - 1e-12; }

double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// Mirror the x >= 0 half onto x < 0 so evenness holds bit for bit.
ProfileCurve mirrored(const std::vector<double>& xs, const std::vector<double>& us) {
  ProfileCurve p;
  const std::size_t m = xs.size();
  p.x.resize(2 * m - 1);
  p.u.resize(2 * m - 1);
  for (std::size_t k = 0; k < m; ++k) {
    p.x[m - 1 + k] = xs[k];
    p.u[m - 1 + k] = us[k];
    p.x[m - 1 - k] = -xs[k];
    p.u[m - 1 - k] = us[k];
  }
  return p;
}

std::size_t origin_index(const ProfileCurve& p) {
  const double pos = -p.x_lo() / p.dx();
  const auto k = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(k)) > 1e-6 || k >= p.size())
    throw ParameterError("profiles", "mesh does not contain x = 0");
  return k;
}

// Curvature of the rotational surface at sample k by central differences.
double rotational_curvature(const ProfileCurve& p, std::size_t k) {
  const double h = p.dx();
  const double ux = (p.u[k + 1] - p.u[k - 1]) / (2.0 * h);
  const double uxx = (p.u[k + 1] - 2.0 * p.u[k] + p.u[k - 1]) / (h * h);
  const double w = std::sqrt(1.0 + ux * ux);
  return -uxx / (w * w * w) + (p.n - 1) / (p.u[k] * w);
}

}  // namespace

double ProfileCurve::operator()(double xq) const {
  if (x.empty() || xq <= x.front() || xq >= x.back()) return 0.0;
  const double pos = (xq - x.front()) / dx();
  auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= x.size()) k = x.size() - 2;
  const double s = pos - static_cast<double>(k);
  return (1.0 - s) * u[k] + s * u[k + 1];
}

double ProfileCurve::max_height() const {
  return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = bump(s);
  return a / (a + bump(1.0 - s));
}

ProfileCurve make_dumbbell_profile(double gamma, double b0, double neck_scale, int n,
                                   int half_samples) {
  if (!(gamma >= 0.0) || gamma > kHalfPi + 1e-12)
    throw ParameterError("profiles", "gamma must lie in [0, pi/2]");
  if (!(b0 > 0.0)) throw ParameterError("profiles", "b0 must be positive");
  if (!(neck_scale > 0.0)) throw ParameterError("profiles", "neck_scale must be positive");
  if (neck_scale >= 0.5 * b0) throw ParameterError("profiles", "neck_scale must be < b0/2");
  if (n < 1) throw ParameterError("profiles", "n must be >= 1");
  if (half_samples < 64) throw ParameterError("profiles", "half_samples must be >= 64");

  const bool right_angle = is_right_angle(gamma);
  const double dx = b0 / half_samples;
  std::vector<double> xs(half_samples + 1), us(half_samples + 1);
  const double tg = right_angle ? 0.0 : std::tan(gamma);
  for (int k = 0; k <= half_samples; ++k) {
    const double x = k == half_samples ? b0 : k * dx;
    double u;
    if (right_angle) {
      // Circle of radius neck_scale at the pinch, radius b0/2 at the cap.
      const double w = 1.0 - smooth_step((x - 0.5 * neck_scale) / (0.5 * neck_scale));
      const double R = neck_scale * w + 0.5 * b0 * (1.0 - w);
      u = std::sqrt(std::max(0.0, x * (2.0 * R - x)));
    } else {
      const double a = x * tg;
      const double b = x * x / (2.0 * neck_scale);
      const double neck = std::sqrt(std::sqrt(a * a * a * a + b * b * b * b));
      const double band = 0.25 * neck_scale;
      const double w = 1.0 - smooth_step((x - (neck_scale - 0.5 * band)) / band);
      const double cap = std::sqrt(std::max(0.0, x * (b0 - x)));
      u = w * neck + (1.0 - w) * cap;
    }
    xs[k] = x;
    us[k] = k == half_samples ? 0.0 : u;
  }
  ProfileCurve p = mirrored(xs, us);
  p.b0 = b0;
  p.gamma = right_angle ? kHalfPi : gamma;
  p.n = n;
  return p;
}

ProfileCurve make_sphere_profile(double center, double radius, double half_width, int n,
                                 int samples) {
  if (!(radius > 0.0)) throw ParameterError("profiles", "sphere radius must be positive");
  if (std::abs(center) + radius >= half_width)
    throw ParameterError("profiles", "sphere does not fit in the sampled window");
  ProfileCurve p = sample_profile(
      [&](double x) {
        const double d = x - center;
        return std::sqrt(std::max(0.0, radius * radius - d * d));
      },
      half_width, n, samples);
  p.b0 = half_width;
  p.tags.pinch_at_origin = false;
  return p;
}

double curvature_at_origin(const ProfileCurve& p) {
  if (!is_right_angle(p.gamma) && p.n >= 2) return std::numeric_limits<double>::infinity();
  const std::size_t k0 = origin_index(p);
  // Locate the extent of the neck: stop at the first local maximum of u.
  std::size_t k_end = k0 + 1;
  while (k_end + 1 < p.size() && p.u[k_end + 1] > p.u[k_end]) ++k_end;
  const std::size_t span = k_end - k0;
  std::size_t m = 128;
  while (m > 8 && 4 * m > span / 2) m /= 2;
  if (m < 8) throw ResolutionError("profiles", "neck not resolved by the samples");
  const double k1 = rotational_curvature(p, k0 + m);
  const double k2 = rotational_curvature(p, k0 + 2 * m);
  const double k3 = rotational_curvature(p, k0 + 4 * m);
  // kappa(x) is smooth in x along the arc; extrapolate linearly to x = 0.
  const double e1 = 2.0 * k1 - k2;
  const double e2 = 2.0 * k2 - k3;
  if (!std::isfinite(e1) || std::abs(e1 - e2) > 0.02 * std::abs(e1) + 1e-6)
    throw ResolutionError("profiles", "curvature limit at the pinch does not stabilise");
  return e1 + (e1 - e2) / 3.0;
}

ProfileCurve make_outer_approx(const ProfileCurve& p, int j, double alpha) {
  if (j < 1) throw ParameterError("profiles", "j must be >= 1");
  if (!(alpha > 0.0)) throw ParameterError("profiles", "alpha must be positive");
  const std::size_t k0 = origin_index(p);
  // x_alpha: first sample where u reaches alpha; u must increase strictly before.
  std::size_t ka = k0;
  while (ka + 1 < p.size() && p.u[ka] < alpha) {
    if (p.u[ka + 1] <= p.u[ka])
      throw ParameterError("profiles", "alpha is not an alpha-domain height for this profile");
    ++ka;
  }
  if (p.u[ka] < alpha) throw ParameterError("profiles", "alpha exceeds the profile height");

  const double aj = std::ldexp(alpha, -j);
  const double eps = 0.5 * aj;
  // Plateau half-width: where u first reaches aj - eps.
  std::size_t kp = k0;
  while (kp < ka && p.u[kp] < aj - eps) ++kp;
  if (kp - k0 < 2) throw ResolutionError("profiles", "plateau alpha/2^j under-resolved");

  ProfileCurve v = p;
  for (std::size_t k = k0; k <= ka; ++k) {
    const double s = p.u[k] - aj;
    if (s >= eps) {
      v.u[k] = p.u[k];
    } else {
      v.u[k] = aj + (s <= -eps ? 0.0 : (s + eps) * (s + eps) / (4.0 * eps));
    }
    v.u[2 * k0 - k] = v.u[k];
  }
  v.tags.pinch_at_origin = false;
  return v;
}

std::pair<ProfileCurve, ProfileCurve> make_inner_approx(const ProfileCurve& p, int j,
                                                        double unit) {
  if (j < 1) throw ParameterError("profiles", "j must be >= 1");
  if (!(unit > 0.0)) throw ParameterError("profiles", "retraction unit must be positive");
  const std::size_t k0 = origin_index(p);
  const double delta = std::ldexp(unit, -j);
  const double h = p.dx();
  const auto w = static_cast<std::ptrdiff_t>(std::floor(delta / h));
  const auto m = static_cast<std::ptrdiff_t>(p.size());

  ProfileCurve right = p;
  std::fill(right.u.begin(), right.u.end(), 0.0);
  bool any = false;
  for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(k0) + 1; k < m; ++k) {
    if (p.u[k] <= 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t q = k - w; q <= k + w; ++q) {
      const double d = (q - k) * h;
      const double lift = std::sqrt(std::max(0.0, delta * delta - d * d));
      const double uq =
          (q <= static_cast<std::ptrdiff_t>(k0) || q >= m) ? 0.0 : p.u[q];
      best = std::min(best, uq - lift);
    }
    if (best > 0.0) {
      right.u[k] = best;
      any = true;
    }
  }
  if (!any) throw EmptyLobeError("profiles", "retraction radius exceeds the lobe inradius");
  ProfileCurve left = right;
  for (std::size_t k = 0; k < p.size(); ++k) left.u[k] = right.u[2 * k0 - k];
  // The reflection above indexes k0 +- offset; guard meshes that are not centred.
  if (2 * k0 + 1 != p.size()) throw ParameterError("profiles", "mesh must be centred at 0");
  right.tags.pinch_at_origin = left.tags.pinch_at_origin = false;
  return {left, right};
}

ProfileCurve profile_union(const ProfileCurve& a, const ProfileCurve& b) {
  if (a.size() != b.size() || a.x_lo() != b.x_lo() || a.dx() != b.dx())
    throw ParameterError("profiles", "union needs a shared mesh");
  ProfileCurve c = a;
  for (std::size_t k = 0; k < a.size(); ++k) c.u[k] = std::max(a.u[k], b.u[k]);
  return c;
}

ProfileCurve right_lobe(const ProfileCurve& p) {
  ProfileCurve q = p;
  for (std::size_t k = 0; k < q.size(); ++k)
    if (q.x[k] < 0.0) q.u[k] = 0.0;
  return q;
}

LevelSetField signed_distance(const ProfileCurve& p, const HalfPlaneGrid& g, double clamp) {
  if (!(clamp > 0.0)) throw ParameterError("profiles", "clamp must be positive");
  g.validate();
  LevelSetField f;
  f.grid = g;
  f.n = p.n;
  f.clamp = clamp;
  f.psi.assign(g.size(), -clamp);

  const std::size_t m = p.size();
  const double x0 = p.x_lo();
  const double h = p.dx();
  // Segments lying on the axis are not part of the boundary.
  std::vector<char> live(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) live[k] = (p.u[k] > 0.0 || p.u[k + 1] > 0.0);

  auto seg_dist2 = [&](std::size_t k, double X, double R) {
    const double ax = p.x[k], ar = p.u[k];
    const double bx = p.x[k + 1], br = p.u[k + 1];
    const double vx = bx - ax, vr = br - ar;
    const double wx = X - ax, wr = R - ar;
    double s = (vx * wx + vr * wr) / (vx * vx + vr * vr);
    s = std::clamp(s, 0.0, 1.0);
    const double dx = wx - s * vx, dr = wr - s * vr;
    return dx * dx + dr * dr;
  };

  // Even profiles on a symmetric grid are computed on the left half and mirrored.
  bool even = g.x_min == -g.x_max && !g.periodic_x;
  for (std::size_t k = 0; even && k < m; ++k) even = p.x[k] == -p.x[m - 1 - k] && p.u[k] == p.u[m - 1 - k];
  const int i_end = even ? g.nx / 2 : g.nx;

  for (int j = 0; j <= g.nr; ++j) {
    const double R = g.r(j);
    for (int i = 0; i <= i_end; ++i) {
      const double X = g.x(i);
      const double uX = p(X);
      const bool inside = R < uX;
      double best = inside ? (uX - R) : clamp;
      double best2 = best * best;
      const auto kmax = static_cast<std::ptrdiff_t>(m) - 2;
      const auto kc = std::clamp(static_cast<std::ptrdiff_t>(std::floor((X - x0) / h)),
                                 std::ptrdiff_t{0}, kmax);
      auto scan = [&](std::ptrdiff_t k, std::ptrdiff_t step) {
        for (; k >= 0 && k <= kmax; k += step) {
          const double gap = step > 0 ? p.x[k] - X : X - p.x[k + 1];
          if (gap > 0.0 && gap * gap >= best2) break;
          if (!live[k]) continue;
          const double lo = std::min(p.u[k], p.u[k + 1]);
          const double hi = std::max(p.u[k], p.u[k + 1]);
          const double dr = R > hi ? R - hi : (R < lo ? lo - R : 0.0);
          const double gx = std::max(gap, 0.0);
          if (gx * gx + dr * dr >= best2) continue;
          best2 = std::min(best2, seg_dist2(static_cast<std::size_t>(k), X, R));
        }
      };
      scan(kc, 1);
      scan(kc - 1, -1);
      const double d = std::sqrt(best2);
      f.psi[g.index(i, j)] = inside ? d : -std::min(d, clamp);
    }
    for (int i = i_end + 1; i <= g.nx; ++i) f.psi[g.index(i, j)] = f.psi[g.index(g.nx - i, j)];
  }
  return f;
}

void write_profile_csv(const std::string& path, const ProfileCurve& p) {
  std::ofstream out(path);
  if (!out) throw InputError("profiles", "cannot write " + path);
  out.precision(17);
  out << "x,u\n";
  for (std::size_t k = 0; k < p.size(); ++k) out << p.x[k] << ',' << p.u[k] << '\n';
}

ProfileCurve read_profile_csv(const std::string& path, double gamma, int n) {
  std::ifstream in(path);
  if (!in) throw InputError("profiles", "cannot read " + path);
  std::string line;
  std::getline(in, line);
  if (line != "x,u") throw InputError("profiles", "expected header x,u in " + path);
  ProfileCurve p;
  p.gamma = gamma;
  p.n = n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, u;
    char comma;
    if (!(ss >> x >> comma >> u) || comma != ',')
      throw InputError("profiles", "malformed row in " + path + ": " + line);
    p.x.push_back(x);
    p.u.push_back(u);
  }
  if (p.size() < 3) throw InputError("profiles", "too few samples in " + path);
  p.b0 = std::max(-p.x_lo(), p.x_hi());
  return p;
}

}  // namespace pinch
