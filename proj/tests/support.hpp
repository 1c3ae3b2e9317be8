#pragma once

#include <cmath>
#include <vector>

#include "pinch/levelset.hpp"
#include "pinch/profiles.hpp"

namespace testing {

// Half-distance between the outermost axis crossings of a field.
inline double axis_radius(const pinch::LevelSetField& f) {
  const std::vector<double> xs = pinch::axis_crossings(f);
  if (xs.size() < 2) return 0.0;
  return 0.5 * (xs.back() - xs.front());
}

inline pinch::LevelSetField sphere_field(double R, int n, double A, double half, int nx,
                                         double clamp = 1.0) {
  const pinch::HalfPlaneGrid g = pinch::HalfPlaneGrid::square(-half, half, half, nx);
  pinch::LevelSetField f;
  f.grid = g;
  f.n = n;
  f.A = A;
  f.clamp = clamp;
  f.psi.resize(g.size());
  for (int j = 0; j <= g.nr; ++j)
    for (int i = 0; i <= g.nx; ++i)
      f.at(i, j) = std::max(-clamp, std::min(clamp, R - std::hypot(g.x(i), g.r(j))));
  return f;
}

// Classical RK4 on R' = A - n/R, independent of the library integrator.
inline double rk4_ball(double R0, int n, double A, double t, int steps = 20000) {
  const double h = t / steps;
  double R = R0;
  auto f = [&](double r) { return A - n / r; };
  for (int k = 0; k < steps; ++k) {
    const double k1 = f(R), k2 = f(R + 0.5 * h * k1), k3 = f(R + 0.5 * h * k2), k4 = f(R + h * k3);
    R += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return R;
}

// Composite Simpson rule.
template <class F>
double simpson(F&& f, double a, double b, int m = 20000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace testing
