#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pinch/levelset.hpp"
#include "pinch/profiles.hpp"

namespace pinch {

// Generating curve of a single lobe tracked in time. Each curve runs from
// (a_star, 0) over the lobe to (b_star, 0).
struct FreeBoundarySolution {
  std::vector<double> times;
  std::vector<Polyline> curves;
  std::vector<double> a_star;
  std::vector<double> b_star;
  std::optional<double> blowup_time;
  std::string stop_reason;
  int n = 1;
  double A = 0.0;
  double ds = 0.0;
  // Gradient diagnostic per stored time: largest |u_x| at heights >= rho/4,
  // where rho is the initial maximal height.
  std::vector<double> max_slope;
  int slope_violations = 0;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  // Linear interpolation of the endpoint series.
  double a_at(double t) const;
  double b_at(double t) const;
};

struct GraphflowOptions {
  // Stored times; when empty, t_end is split into `store_count` intervals.
  std::vector<double> snapshot_times;
  int store_count = 200;
  double cfl = 0.4;
  // Radius of the round cap replacing a cone tip on the axis; 0 picks 6 ds.
  double mollify_radius = 0.0;
  double slope_bound = 50.0;
  int intersection_check_every = 25;
};

enum class Assumption { A_plus, A_minus, undetermined };
const char* to_string(Assumption a);

// Evolves a single-lobe profile by V = -kappa + A with endpoints on the axis.
FreeBoundarySolution evolve_free_boundary(const ProfileCurve& p0, int n, double A, double t_end,
                                          double ds, const GraphflowOptions& opts = {});

// Sign of a_star on (0, delta] relative to the tolerance 2 ds.
Assumption classify_assumption(const FreeBoundarySolution& sol, double delta);

// Difference quotient (a_star(window) - a_star(0)) / window.
double endpoint_speed(const FreeBoundarySolution& sol, double window);

// 1 / (neck_radius cos(pi/2 - gamma)) - A.
double cap_speed_estimate(double gamma, double A, double neck_radius);

// Initial polyline (resampled, tip-mollified) used by evolve_free_boundary.
Polyline initial_curve(const ProfileCurve& p0, double ds, double mollify_radius = 0.0);

void write_endpoints_csv(const std::string& path, const FreeBoundarySolution& sol);
void write_curves_csv(const std::string& path, const FreeBoundarySolution& sol);

}  // namespace pinch
