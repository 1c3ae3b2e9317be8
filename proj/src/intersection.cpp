#include "pinch/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "pinch/error.hpp"

namespace pinch {

namespace {

int sign_of(double d, double tol) { return d > tol ? 1 : (d < -tol ? -1 : 0); }

std::vector<double> merged_mesh(std::vector<double> xs, double lo, double hi) {
  xs.push_back(lo);
  xs.push_back(hi);
  std::erase_if(xs, [&](double x) { return x < lo || x > hi; });
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

CrossingCount count_crossings(const std::vector<double>& xs, const std::vector<double>& u1,
                              const std::vector<double>& u2, double tol) {
  if (xs.size() != u1.size() || xs.size() != u2.size())
    throw InputError("intersection", "mesh and values differ in length");
  CrossingCount out;
  const std::size_t m = xs.size();
  std::vector<double> d(m);
  std::vector<int> s(m);
  std::vector<bool> empty(m);
  for (std::size_t k = 0; k < m; ++k) {
    d[k] = u1[k] - u2[k];
    s[k] = sign_of(d[k], tol);
    empty[k] = u1[k] <= 0.0 && u2[k] <= 0.0;
  }
  int last = 0;
  std::size_t last_k = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (empty[k]) {
      last = 0;
      continue;
    }
    if (s[k] == 0) {
      const int left = k > 0 && !empty[k - 1] ? s[k - 1] : 0;
      const int right = k + 1 < m && !empty[k + 1] ? s[k + 1] : 0;
      if (left * right >= 0) out.degenerate = true;
      continue;
    }
    if (last != 0 && s[k] != last) {
      ++out.count;
      if (last_k + 1 == k) {
        out.locations.push_back(xs[last_k] + d[last_k] / (d[last_k] - d[k]) * (xs[k] - xs[last_k]));
      } else {
        out.locations.push_back(0.5 * (xs[last_k] + xs[k]));
      }
    }
    last = s[k];
    last_k = k;
  }
  return out;
}

CrossingCount intersection_number(const ProfileCurve& u1, const ProfileCurve& u2, double lo,
                                  double hi) {
  if (!(hi > lo)) throw InputError("intersection", "empty interval");
  std::vector<double> xs = u1.x;
  xs.insert(xs.end(), u2.x.begin(), u2.x.end());
  xs = merged_mesh(std::move(xs), lo, hi);
  std::vector<double> a(xs.size()), b(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    a[k] = u1(xs[k]);
    b[k] = u2(xs[k]);
  }
  return count_crossings(xs, a, b);
}

std::vector<double> upper_envelope(const std::vector<Polyline>& curves,
                                   const std::vector<double>& xs) {
  std::vector<double> out(xs.size(), 0.0);
  for (const auto& c : curves) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      const double x0 = c[i][0], x1 = c[i + 1][0];
      const double lo = std::min(x0, x1), hi = std::max(x0, x1);
      auto it = std::lower_bound(xs.begin(), xs.end(), lo);
      for (; it != xs.end() && *it <= hi; ++it) {
        const double r = x1 == x0 ? std::max(c[i][1], c[i + 1][1])
                                  : c[i][1] + (*it - x0) / (x1 - x0) * (c[i + 1][1] - c[i][1]);
        double& o = out[static_cast<std::size_t>(it - xs.begin())];
        o = std::max(o, r);
      }
    }
  }
  return out;
}

CrossingCount intersection_number(const Polyline& c1, const Polyline& c2, double lo, double hi) {
  if (!(hi > lo)) throw InputError("intersection", "empty interval");
  std::vector<double> xs;
  for (const auto& q : c1) xs.push_back(q[0]);
  for (const auto& q : c2) xs.push_back(q[0]);
  xs = merged_mesh(std::move(xs), lo, hi);
  return count_crossings(xs, upper_envelope({c1}, xs), upper_envelope({c2}, xs));
}

MonitorReport monitor_sequence(const std::vector<double>& times,
                               const std::vector<CrossingCount>& counts) {
  if (times.size() != counts.size()) throw InputError("intersection", "times and counts differ");
  if (times.empty()) throw InputError("intersection", "no shared snapshots");
  MonitorReport rep;
  int prev = -1;
  bool seen_zero = false;
  for (std::size_t k = 0; k < times.size(); ++k) {
    MonitorEntry e{times[k], counts[k].count, counts[k].degenerate, false};
    if (!e.degenerate) {
      if (prev > 0 && e.Z > prev) e.violation = true;
      if (seen_zero && e.Z > 1) e.violation = true;
      prev = e.Z;
      seen_zero = seen_zero || e.Z == 0;
    }
    if (e.violation) ++rep.violations;
    rep.entries.push_back(e);
  }
  return rep;
}

MonitorReport monotonicity_monitor(const FreeBoundarySolution& run1,
                                   const FreeBoundarySolution& run2) {
  if (run1.n != run2.n || run1.A != run2.A)
    throw InputError("intersection", "runs must share n and A");
  std::vector<double> times;
  std::vector<CrossingCount> counts;
  std::size_t j = 0;
  for (std::size_t i = 0; i < run1.times.size(); ++i) {
    const double t = run1.times[i];
    while (j < run2.times.size() && run2.times[j] < t - 1e-12 * std::max(1.0, t)) ++j;
    if (j == run2.times.size()) break;
    if (std::abs(run2.times[j] - t) > 1e-12 * std::max(1.0, t)) continue;
    const Polyline& c1 = run1.curves[i];
    const Polyline& c2 = run2.curves[j];
    const double lo = std::min(c1.front()[0], c2.front()[0]);
    const double hi = std::max(c1.back()[0], c2.back()[0]);
    times.push_back(t);
    counts.push_back(intersection_number(c1, c2, lo, hi));
  }
  if (times.empty()) throw InputError("intersection", "runs have no overlapping snapshots");
  return monitor_sequence(times, counts);
}

MonitorReport monotonicity_monitor(const std::vector<LevelSetField>& run1,
                                   const std::vector<LevelSetField>& run2) {
  std::vector<double> times;
  std::vector<CrossingCount> counts;
  for (std::size_t k = 0; k < std::min(run1.size(), run2.size()); ++k) {
    if (std::abs(run1[k].t - run2[k].t) > 1e-12 * std::max(1.0, run1[k].t)) continue;
    const HalfPlaneGrid& g = run1[k].grid;
    std::vector<double> xs(static_cast<std::size_t>(g.cols()));
    for (int i = 0; i < g.cols(); ++i) xs[static_cast<std::size_t>(i)] = g.x(i);
    times.push_back(run1[k].t);
    counts.push_back(count_crossings(xs, upper_envelope(zero_contour(run1[k]), xs),
                                     upper_envelope(zero_contour(run2[k]), xs)));
  }
  if (times.empty()) throw InputError("intersection", "runs have no overlapping snapshots");
  return monitor_sequence(times, counts);
}

void write_monitor_jsonl(const std::string& path, const MonitorReport& report) {
  std::ofstream out(path);
  if (!out) throw InputError("intersection", "cannot write " + path);
  for (const auto& e : report.entries) {
    nlohmann::json j = {{"t", e.t}, {"Z", e.Z}, {"degenerate", e.degenerate}, {"violation", e.violation}};
    out << j.dump() << '\n';
  }
}

}  // namespace pinch
