#include "pinch/grid.hpp"

#include <cmath>

#include "pinch/error.hpp"

namespace pinch {

HalfPlaneGrid HalfPlaneGrid::square(double x_min, double x_max, double r_max, int nx) {
  if (!(x_max > x_min) || !(r_max > 0.0) || nx < 4)
    throw ParameterError("grid", "square grid needs x_max > x_min, r_max > 0, nx >= 4");
  HalfPlaneGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.nx = nx;
  g.hx = (x_max - x_min) / nx;
  g.hr = g.hx;
  g.nr = static_cast<int>(std::ceil(r_max / g.hr - 1e-9));
  g.r_max = g.nr * g.hr;
  return g;
}

void HalfPlaneGrid::validate() const {
  if (!(hx > 0.0) || !(hr > 0.0)) throw ParameterError("grid", "spacings must be positive");
  if (nx < 2 || nr < 2) throw ParameterError("grid", "need at least 2 cells per direction");
  if (std::abs(x_min + nx * hx - x_max) > 1e-9 * (1.0 + std::abs(x_max)))
    throw ParameterError("grid", "x_range inconsistent with nx*hx");
  if (std::abs(nr * hr - r_max) > 1e-9 * (1.0 + r_max))
    throw ParameterError("grid", "r_max inconsistent with nr*hr");
}

bool HalfPlaneGrid::covers(double b0, double margin) const {
  return x_min < -b0 - margin && x_max > b0 + margin;
}

}  // namespace pinch
