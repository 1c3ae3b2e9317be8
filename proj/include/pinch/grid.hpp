#pragma once

#include <cstddef>
#include <vector>

namespace pinch {

// Node-centred grid on the (x, r) half-plane. Nodes sit at
// x_i = ((nx - i)*x_min + i*x_max)/nx (i = 0..nx), which is exactly odd in i
// on a symmetric range, and r_j = j*hr (j = 0..nr); row j = 0 is
// the symmetry axis.
struct HalfPlaneGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  double r_max = 1.0;
  double hx = 0.0;
  double hr = 0.0;
  int nx = 0;
  int nr = 0;
  bool periodic_x = false;

  // Square cells with nx cells across [x_min, x_max]; r_max is rounded up
  // to a whole number of cells.
  static HalfPlaneGrid square(double x_min, double x_max, double r_max, int nx);

  int cols() const { return nx + 1; }
  int rows() const { return nr + 1; }
  std::size_t size() const { return static_cast<std::size_t>(cols()) * rows(); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * cols() + i;
  }
  double x(int i) const { return (x_min * (nx - i) + x_max * i) / nx; }
  double r(int j) const { return j * hr; }
  double h() const { return hx > hr ? hx : hr; }
  double h_min() const { return hx < hr ? hx : hr; }

  // Throws ParameterError when spacings or counts are inconsistent.
  void validate() const;
  // True when [-b0 - margin, b0 + margin] lies strictly inside the x range.
  bool covers(double b0, double margin) const;
};

// Scalar field psi on a HalfPlaneGrid, stored row-major with rows along x.
struct LevelSetField {
  HalfPlaneGrid grid;
  std::vector<double> psi;
  double A = 0.0;
  int n = 1;
  double t = 0.0;
  double clamp = 1.0;

  double& at(int i, int j) { return psi[grid.index(i, j)]; }
  double at(int i, int j) const { return psi[grid.index(i, j)]; }
};

}  // namespace pinch
