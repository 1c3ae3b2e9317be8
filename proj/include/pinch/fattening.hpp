#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pinch/barriers.hpp"
#include "pinch/graphflow.hpp"
#include "pinch/intersection.hpp"
#include "pinch/levelset.hpp"
#include "pinch/profiles.hpp"

namespace pinch {

enum class Verdict { fattening, non_fattening, inconclusive };
const char* to_string(Verdict v);

struct Scenario {
  std::string name;
  ProfileCurve profile;
  int n = 2;
  double A = 0.0;
  double t_probe = 0.0;
  int j_levels = 3;
  HalfPlaneGrid grid;
  // Plateau height for the outer family (alpha / 2^j) and erosion unit for
  // the inner family (unit / 2^j).
  double alpha = 0.0;
  double inner_unit = 0.0;
  double clamp = 1.0;
  int snapshots = 4;
  // Front-tracking spacing and window for the (A+-) classification.
  double graph_ds = 0.0;
  double apm_window = 0.0;
  // Barrier used for the default probe time when gamma < pi/2 and n >= 2.
  std::optional<SelfSimilarBarrier> barrier;

  void validate() const;
};

struct LevelEvidence {
  int j = 0;
  double gap_area = 0.0;
  double ball_radius = 0.0;
  double perimeter = 0.0;
  int components_outer_closed = 0;
  int components_inner_open = 0;
};

struct EvolutionReport {
  std::string scenario;
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> gap_area;
  double extrapolated_gap = 0.0;
  double max_ball_radius = 0.0;
  // Same two-level extrapolation applied to the inscribed-ball radius.
  double extrapolated_ball = 0.0;
  double area_floor = 0.0;
  double ball_threshold = 0.0;
  int components_open = 0;
  int components_closed = 0;
  std::optional<Assumption> assumption;
  double t_probe = 0.0;
  // Nodes breaking U_j <= U_{j+1} <= E_{j+1} <= E_j beyond one-cell slack.
  int sandwich_violations = 0;
  // (A-) scenarios: Hausdorff distance between open and closed boundaries
  // at the finest level, and its extrapolation max(0, 2 d_J - d_{J-1}).
  std::optional<double> boundary_gap;
  std::optional<double> extrapolated_boundary_gap;
  std::vector<LevelEvidence> evidence;
  // Intersection monitors: finest outer against finest inner evolution, and
  // for round necks the tracked right lobe against its mirror image.
  MonitorReport level_monitor;
  std::optional<MonitorReport> graph_monitor;
};

struct DetectOptions {
  int threads = 1;
  double cfl = 0.9;
  // When set, receives the finest-level fields at t_probe.
  std::vector<LevelSetField>* finest_fields = nullptr;
};

// Probe time when the scenario leaves it at zero: a quarter of the barrier
// blow-down time for cones, half the classification window for round necks.
double default_probe_time(const Scenario& s);

EvolutionReport detect(const Scenario& s, const DetectOptions& opts = {});

// Largest inscribed-ball radius of a mask, measured by an exact Euclidean
// distance transform to the complement (the axis is not a boundary).
double inscribed_radius(const GridSet& s);

// Length of the zero contour in the meridian half-plane.
double contour_length(const std::vector<Polyline>& c);

struct SuiteCell {
  Scenario scenario;
  Verdict expected = Verdict::inconclusive;
  // Expected component counts at t_probe (0 = not checked).
  int expected_open = 0;
  int expected_closed = 0;
};

struct CellResult {
  std::string name;
  EvolutionReport report;
  Verdict expected = Verdict::inconclusive;
  bool verdict_ok = false;
  bool components_ok = false;
  bool passed() const { return verdict_ok && components_ok; }
};

struct SuiteSettings {
  int nx = 256;
  int j_levels = 3;
};

// The six table cells: round necks in both assumption regimes for n = 1 and
// n = 2, and cone necks for n = 1 and n = 3.
std::vector<SuiteCell> default_suite(const SuiteSettings& settings = {});

std::vector<CellResult> reproduce_tables(const std::vector<SuiteCell>& suite,
                                         const DetectOptions& opts = {});

struct CrosscheckSnapshot {
  double t = 0.0;
  double min_separation = 0.0;  // in cells; negative when the barrier is crossed
  bool origin_outside = false;
};

struct CrosscheckReport {
  double T = 0.0;
  double t_probe = 0.0;
  std::vector<CrosscheckSnapshot> snapshots;
  bool certified = false;
};

// Largest blow-down time with the barrier above the profile, times `safety`.
double admissible_blowdown(const SelfSimilarBarrier& b, const ProfileCurve& p,
                           double safety = 0.9);

// Checks that the barrier |y| = u(x, s) never comes within one cell of the
// closed evolution of the scenario profile and that the origin stays outside.
CrosscheckReport barrier_crosscheck(const Scenario& s, const SelfSimilarBarrier& b,
                                    int snapshots = 8, double cfl = 0.9);

void write_report_json(const std::string& path, const EvolutionReport& r);
void write_verdict_csv(const std::string& path, const std::vector<CellResult>& cells);

}  // namespace pinch
