#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pinch/grid.hpp"

namespace pinch {

struct RegularityTags {
  bool left_cap_vertical = true;
  bool right_cap_vertical = true;
  bool pinch_at_origin = true;
};

// Generating profile r = u(x) of a rotationally symmetric hypersurface in
// R^{n+1}, sampled on a uniform x-mesh. u is extended by zero off the mesh.
struct ProfileCurve {
  std::vector<double> x;
  std::vector<double> u;
  double b0 = 1.0;
  double gamma = 0.0;
  int n = 1;
  RegularityTags tags;

  std::size_t size() const { return x.size(); }
  double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
  double x_lo() const { return x.front(); }
  double x_hi() const { return x.back(); }
  // Piecewise-linear interpolant of the samples.
  double operator()(double xq) const;
  double max_height() const;
};

// Smooth step: 0 for s <= 0, 1 for s >= 1, C-infinity in between.
double smooth_step(double s);

// Even dumbbell with pinch at the origin, contact angle gamma and outer caps
// at +-b0. half_samples mesh cells cover [0, b0].
ProfileCurve make_dumbbell_profile(double gamma, double b0, double neck_scale, int n,
                                   int half_samples = 4096);

// Round sphere of the given radius centred at (center, 0), sampled on
// [-half_width, half_width].
ProfileCurve make_sphere_profile(double center, double radius, double half_width, int n,
                                 int samples = 8192);

// Build a profile by sampling f on [-half_width, half_width]; negative values
// are clipped to zero.
template <class F>
ProfileCurve sample_profile(F&& f, double half_width, int n, int samples = 8192) {
  ProfileCurve p;
  p.b0 = half_width;
  p.gamma = 1.5707963267948966;
  p.n = n;
  p.x.resize(samples + 1);
  p.u.resize(samples + 1);
  const double dx = 2.0 * half_width / samples;
  for (int k = 0; k <= samples; ++k) {
    const double xk = -half_width + k * dx;
    const double v = f(xk);
    p.x[k] = xk;
    p.u[k] = v > 0.0 ? v : 0.0;
  }
  return p;
}

// Mean curvature at the pinch, as a one-sided limit x -> 0+. Returns
// +infinity for gamma < pi/2 and n >= 2.
double curvature_at_origin(const ProfileCurve& p);

// Outer approximation v_j >= u_0 with a plateau of height alpha/2^j over the
// pinch. alpha must be an alpha-domain height: u_0 strictly increasing on
// (0, x_alpha] with u_0(x_alpha) = alpha.
ProfileCurve make_outer_approx(const ProfileCurve& p, int j, double alpha);

// Inner approximation: left and right lobes eroded by a ball of radius
// unit/2^j.
std::pair<ProfileCurve, ProfileCurve> make_inner_approx(const ProfileCurve& p, int j,
                                                        double unit = 1.0);

// Pointwise maximum of profiles on a shared mesh.
ProfileCurve profile_union(const ProfileCurve& a, const ProfileCurve& b);

// Restriction of p to x >= 0 (samples with x < 0 set to zero).
ProfileCurve right_lobe(const ProfileCurve& p);

// Clamped signed distance to the boundary of {r < u(x)}: positive inside.
LevelSetField signed_distance(const ProfileCurve& p, const HalfPlaneGrid& g,
                              double clamp = 1.0);

void write_profile_csv(const std::string& path, const ProfileCurve& p);
ProfileCurve read_profile_csv(const std::string& path, double gamma, int n);

}  // namespace pinch
