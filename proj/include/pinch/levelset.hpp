#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pinch/grid.hpp"
#include "pinch/profiles.hpp"

namespace pinch {

enum class SetKind { open, closed };

struct GridSet {
  HalfPlaneGrid grid;
  std::vector<std::uint8_t> mask;
  SetKind kind = SetKind::open;
  double t = 0.0;
  int n = 1;

  bool at(int i, int j) const { return mask[grid.index(i, j)] != 0; }
  std::size_t count() const;
  // Meridian-plane area: number of cells times hx*hr.
  double area() const { return count() * grid.hx * grid.hr; }
};

// Largest dt for which every update coefficient stays non-negative.
double stable_dt(const HalfPlaneGrid& g, int n, double A, double cfl = 0.9);

// One explicit step of the axisymmetric level-set equation.
LevelSetField step(const LevelSetField& f, double dt, double cfl = 0.9);
// Same as step, writing into out (resized as needed). out must not alias f.
void step_into(const LevelSetField& f, double dt, LevelSetField& out, double cfl = 0.9);

struct EvolveOptions {
  double cfl = 0.9;
  int reinit_every = 0;   // 0 disables redistancing
  int reinit_iterations = 20;
  // When positive, psi is clipped to [-band, band] before and after every
  // step. Clipping is a monotone relabelling, so the zero set is unchanged,
  // and the flat far field is skipped by the step.
  double band = 0.0;
  // Called after every step with the current field.
  std::function<void(const LevelSetField&)> observer;
};

// Advances to t_end, returning a copy of the field at every snapshot time.
std::vector<LevelSetField> evolve(const LevelSetField& f, double t_end,
                                  const std::vector<double>& snapshot_times,
                                  const EvolveOptions& opts = {});

// Iterative redistancing towards |grad psi| = 1 keeping the zero set.
void reinitialize(LevelSetField& f, int iterations);

GridSet extract_set(const LevelSetField& f, SetKind kind, double theta = 0.0);

// 4-connected components; for n = 1 counted after even reflection in r = 0.
int count_components(const GridSet& s);

using Polyline = std::vector<std::array<double, 2>>;

// Marching-squares level curve, chained into polylines.
std::vector<Polyline> zero_contour(const LevelSetField& f, double level = 0.0);

// Symmetric Hausdorff distance between two polyline sets.
double hausdorff(const std::vector<Polyline>& a, const std::vector<Polyline>& b);

// Sign changes of psi along the axis row, as interpolated x positions.
std::vector<double> axis_crossings(const LevelSetField& f);

// Evolves the clamped distance and a tanh reshaping of it; true when the
// zero sets agree within tol_cells grid cells (Hausdorff) at time t.
bool relabel_invariance_check(const ProfileCurve& p, const HalfPlaneGrid& g, double t,
                              double A, int n, double tol_cells = 1.0);

void write_grid_dump(const std::string& path_base, const LevelSetField& f);
LevelSetField read_grid_dump(const std::string& path_base);
void write_mask_dump(const std::string& path_base, const GridSet& s);
void write_contour_csv(const std::string& path,
                       const std::vector<std::pair<double, std::vector<Polyline>>>& contours);

}  // namespace pinch
