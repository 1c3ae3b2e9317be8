#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pinch/barriers.hpp"
#include "pinch/fattening.hpp"
#include "pinch/grid.hpp"
#include "pinch/profiles.hpp"

namespace pinch {

// Flat INI-style configuration: [section] headers, key = value lines, '#'
// or ';' comments. Keys are addressed as "section.key"; unknown sections and
// keys are rejected when the file is read.
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& origin = "<config>");

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers_or(const std::string& key, const std::vector<double>& fallback) const;

  // FNV-1a of the raw text.
  std::uint64_t hash() const { return hash_; }
  const std::string& origin() const { return origin_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
  std::uint64_t hash_ = 0;
};

std::uint64_t fnv1a(const std::string& bytes);

// Required physical parameters: physics.n (integer >= 1), physics.A (>= 0).
int config_n(const Config& c);
double config_A(const Config& c);

ProfileCurve profile_from_config(const Config& c, int n);
HalfPlaneGrid grid_from_config(const Config& c);
SelfSimilarBarrier barrier_from_config(const Config& c, int n, double A);
Scenario scenario_from_config(const Config& c);
SuiteSettings suite_from_config(const Config& c);

// Version string of each library module, recorded in manifests.
const std::map<std::string, std::string>& module_versions();

}  // namespace pinch
