#include "pinch/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pinch/error.hpp"

namespace pinch {

namespace {

enum class Kind { number, integer, text, list };

const std::map<std::string, std::map<std::string, Kind>>& schema() {
  static const std::map<std::string, std::map<std::string, Kind>> s = {
      {"run", {{"seed", Kind::integer}, {"name", Kind::text}}},
      {"physics", {{"n", Kind::integer}, {"A", Kind::number}}},
      {"profile",
       {{"kind", Kind::text},
        {"gamma", Kind::number},
        {"gamma_deg", Kind::number},
        {"b0", Kind::number},
        {"neck_scale", Kind::number},
        {"samples", Kind::integer},
        {"center", Kind::number},
        {"radius", Kind::number},
        {"half_width", Kind::number}}},
      {"grid",
       {{"x_min", Kind::number},
        {"x_max", Kind::number},
        {"r_max", Kind::number},
        {"nx", Kind::integer},
        {"periodic", Kind::integer}}},
      {"levelset",
       {{"t_end", Kind::number},
        {"snapshots", Kind::list},
        {"cfl", Kind::number},
        {"clamp", Kind::number},
        {"reinit_every", Kind::integer},
        {"reinit_iterations", Kind::integer}}},
      {"graphflow",
       {{"ds", Kind::number},
        {"t_end", Kind::number},
        {"store_count", Kind::integer},
        {"cfl", Kind::number},
        {"mollify_radius", Kind::number},
        {"slope_bound", Kind::number},
        {"lobe", Kind::text},
        {"apm_window", Kind::number},
        {"speed_window", Kind::number}}},
      {"fattening",
       {{"j_levels", Kind::integer},
        {"alpha", Kind::number},
        {"inner_unit", Kind::number},
        {"t_probe", Kind::number},
        {"snapshots", Kind::integer},
        {"expect", Kind::text}}},
      {"barrier",
       {{"C", Kind::number},
        {"rho", Kind::number},
        {"theta", Kind::number},
        {"eps0", Kind::number},
        {"T", Kind::number},
        {"snapshots", Kind::integer}}},
      {"subsolution", {{"R0", Kind::number}, {"t_max", Kind::number}, {"samples", Kind::integer}}},
      {"suite", {{"nx", Kind::integer}, {"j_levels", Kind::integer}}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Drops an inline '#' or ';' comment.
std::string strip_comment(const std::string& s) {
  const auto k = s.find_first_of("#;");
  return trim(k == std::string::npos ? s : s.substr(0, k));
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("cli", key + ": expected a finite number, got '" + v + "'");
  return out;
}

int parse_integer(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("cli", key + ": expected an integer, got '" + v + "'");
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) throw ConfigError("cli", key + ": expected a comma-separated list");
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("cli", key + ": " + what);
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cli", "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  c.hash_ = fnv1a(text);
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cli", origin + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto sit = schema().find(section);
    if (sit == schema().end()) {
      if (body.empty()) throw ConfigError("cli", "top-level key '" + section + "' outside any section");
      throw ConfigError("cli", "unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      const std::string path = section + "." + key;
      const auto kit = sit->second.find(key);
      if (kit == sit->second.end()) throw ConfigError("cli", "unknown key '" + path + "'");
      if (!node.empty()) throw ConfigError("cli", path + ": nested keys are not allowed");
      const std::string raw = strip_comment(node.data());
      switch (kit->second) {
        case Kind::number: parse_number(path, raw); break;
        case Kind::integer: parse_integer(path, raw); break;
        case Kind::list: parse_list(path, raw); break;
        case Kind::text:
          require(!raw.empty(), path, "empty value");
          break;
      }
      c.values_[path] = raw;
    }
  }
  return c;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

double Config::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("cli", key + ": required key is missing");
  return parse_number(key, it->second);
}

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int Config::integer(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("cli", key + ": required key is missing");
  return parse_integer(key, it->second);
}

int Config::integer_or(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::vector<double> Config::numbers_or(const std::string& key,
                                       const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_list(key, it->second);
}

int config_n(const Config& c) {
  const int n = c.integer("physics.n");
  require(n >= 1 && n <= 64, "physics.n", "must lie in [1, 64]");
  return n;
}

double config_A(const Config& c) {
  const double A = c.number("physics.A");
  require(A >= 0.0, "physics.A", "must be non-negative");
  return A;
}

ProfileCurve profile_from_config(const Config& c, int n) {
  const std::string kind = c.text_or("profile.kind", "dumbbell");
  if (kind == "sphere") {
    const double radius = c.number("profile.radius");
    require(radius > 0.0, "profile.radius", "must be positive");
    const double center = c.number_or("profile.center", 0.0);
    const double half = c.number_or("profile.half_width", std::abs(center) + 1.2 * radius);
    require(half > std::abs(center) + radius, "profile.half_width", "must exceed |center| + radius");
    const int samples = c.integer_or("profile.samples", 8192);
    require(samples >= 16, "profile.samples", "must be at least 16");
    return make_sphere_profile(center, radius, half, n, samples);
  }
  require(kind == "dumbbell", "profile.kind", "must be 'dumbbell' or 'sphere'");
  require(!(c.has("profile.gamma") && c.has("profile.gamma_deg")), "profile.gamma",
          "give either gamma or gamma_deg, not both");
  const double gamma = c.has("profile.gamma_deg")
                           ? c.number("profile.gamma_deg") * std::numbers::pi / 180.0
                           : c.number("profile.gamma");
  require(gamma >= 0.0 && gamma <= std::numbers::pi / 2.0 + 1e-12, "profile.gamma",
          "must lie in [0, pi/2]");
  const double b0 = c.number_or("profile.b0", 1.0);
  require(b0 > 0.0, "profile.b0", "must be positive");
  const double neck = c.number("profile.neck_scale");
  require(neck > 0.0 && neck < b0 / 2.0, "profile.neck_scale", "must lie in (0, b0/2)");
  const int samples = c.integer_or("profile.samples", 4096);
  require(samples >= 64, "profile.samples", "must be at least 64");
  return make_dumbbell_profile(std::min(gamma, std::numbers::pi / 2.0), b0, neck, n, samples);
}

HalfPlaneGrid grid_from_config(const Config& c) {
  const double x_min = c.number("grid.x_min");
  const double x_max = c.number("grid.x_max");
  const double r_max = c.number("grid.r_max");
  const int nx = c.integer("grid.nx");
  require(x_max > x_min, "grid.x_max", "must exceed grid.x_min");
  require(r_max > 0.0, "grid.r_max", "must be positive");
  require(nx >= 8 && nx <= 8192, "grid.nx", "must lie in [8, 8192]");
  HalfPlaneGrid g = HalfPlaneGrid::square(x_min, x_max, r_max, nx);
  g.periodic_x = c.integer_or("grid.periodic", 0) != 0;
  return g;
}

SelfSimilarBarrier barrier_from_config(const Config& c, int n, double A) {
  SelfSimilarBarrier b;
  b.n = n;
  b.A = A;
  b.C = c.number("barrier.C");
  b.rho = c.number("barrier.rho");
  b.theta = c.number_or("barrier.theta", 0.9);
  b.eps0 = c.number_or("barrier.eps0", 0.1);
  b.T = c.number_or("barrier.T", 0.0);
  require(b.T >= 0.0, "barrier.T", "must be non-negative");
  const ValidationReport rep = validate_supersolution_params(b);
  if (!rep.valid) throw ConfigError("cli", "barrier: " + rep.violations.front());
  return b;
}

Scenario scenario_from_config(const Config& c) {
  Scenario s;
  s.n = config_n(c);
  s.A = config_A(c);
  s.name = c.text_or("run.name", "scenario");
  s.profile = profile_from_config(c, s.n);
  s.grid = grid_from_config(c);
  s.j_levels = c.integer_or("fattening.j_levels", 3);
  require(s.j_levels >= 2 && s.j_levels <= 8, "fattening.j_levels", "must lie in [2, 8]");
  const double neck = c.number_or("profile.neck_scale", 0.25);
  s.alpha = c.number_or("fattening.alpha", s.profile(neck / 2.0));
  require(s.alpha > 0.0, "fattening.alpha", "must be positive");
  s.inner_unit = c.number_or("fattening.inner_unit", 0.1);
  require(s.inner_unit > 0.0, "fattening.inner_unit", "must be positive");
  s.t_probe = c.number_or("fattening.t_probe", 0.0);
  require(s.t_probe >= 0.0, "fattening.t_probe", "must be non-negative");
  s.snapshots = c.integer_or("fattening.snapshots", 4);
  require(s.snapshots >= 1, "fattening.snapshots", "must be positive");
  s.clamp = c.number_or("levelset.clamp", 1.0);
  require(s.clamp > 0.0, "levelset.clamp", "must be positive");
  s.graph_ds = c.number_or("graphflow.ds", 0.004);
  require(s.graph_ds > 0.0, "graphflow.ds", "must be positive");
  s.apm_window = c.number_or("graphflow.apm_window", 0.04);
  require(s.apm_window > 0.0, "graphflow.apm_window", "must be positive");
  if (c.has("barrier.C")) {
    SelfSimilarBarrier b = barrier_from_config(c, s.n, s.A);
    find_tau0(b);
    s.barrier = b;
  }
  return s;
}

SuiteSettings suite_from_config(const Config& c) {
  SuiteSettings st;
  st.nx = c.integer_or("suite.nx", 256);
  require(st.nx >= 64 && st.nx <= 4096, "suite.nx", "must lie in [64, 4096]");
  st.j_levels = c.integer_or("suite.j_levels", 3);
  require(st.j_levels >= 2 && st.j_levels <= 8, "suite.j_levels", "must lie in [2, 8]");
  return st;
}

const std::map<std::string, std::string>& module_versions() {
  static const std::map<std::string, std::string> v = {
      {"profiles", "1.0.0"},  {"levelset", "1.0.0"},     {"graphflow", "1.0.0"},
      {"barriers", "1.0.0"},  {"intersection", "1.0.0"}, {"fattening", "1.0.0"},
      {"cli", "1.0.0"},
  };
  return v;
}

}  // namespace pinch
