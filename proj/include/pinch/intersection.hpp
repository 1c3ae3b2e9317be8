#pragma once

#include <string>
#include <vector>

#include "pinch/graphflow.hpp"
#include "pinch/levelset.hpp"
#include "pinch/profiles.hpp"

namespace pinch {

inline constexpr double kContactTolerance = 1e-9;

struct CrossingCount {
  int count = 0;
  std::vector<double> locations;
  bool degenerate = false;
};

// Sign changes of u1 - u2 over the mesh xs. Nodes where both curves vanish
// separate independent stretches.
CrossingCount count_crossings(const std::vector<double>& xs, const std::vector<double>& u1,
                              const std::vector<double>& u2, double tol = kContactTolerance);

// Profiles compared on the union of their sample abscissae inside [lo, hi],
// each extended by zero beyond its support.
CrossingCount intersection_number(const ProfileCurve& u1, const ProfileCurve& u2, double lo,
                                  double hi);

// Generating curves (axis to axis) compared through their upper envelopes.
CrossingCount intersection_number(const Polyline& c1, const Polyline& c2, double lo, double hi);

// Largest r on the polylines above each abscissa; zero where none passes.
std::vector<double> upper_envelope(const std::vector<Polyline>& curves,
                                   const std::vector<double>& xs);

struct MonitorEntry {
  double t = 0.0;
  int Z = 0;
  bool degenerate = false;
  bool violation = false;
};

struct MonitorReport {
  std::vector<MonitorEntry> entries;
  int violations = 0;
  bool passed() const { return violations == 0; }
};

// Intersection number at each shared time of two boundary histories: flags a
// strict increase while Z > 0, and Z > 1 after a snapshot with Z = 0.
MonitorReport monitor_sequence(const std::vector<double>& times,
                               const std::vector<CrossingCount>& counts);

MonitorReport monotonicity_monitor(const FreeBoundarySolution& run1,
                                   const FreeBoundarySolution& run2);

// Same check for two level-set histories sampled at identical times.
MonitorReport monotonicity_monitor(const std::vector<LevelSetField>& run1,
                                   const std::vector<LevelSetField>& run2);

void write_monitor_jsonl(const std::string& path, const MonitorReport& report);

}  // namespace pinch
