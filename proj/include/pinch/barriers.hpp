#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pinch/profiles.hpp"

namespace pinch {

enum class RadiusKind { cylinder, ball_shrink, ball_grow };

// cylinder: a' = A - (n-1)/a;  ball_shrink: e' = -A - n/e;  ball_grow: R' = A - n/R.
struct RadiusODE {
  RadiusKind kind = RadiusKind::cylinder;
  int n = 2;
  double A = 0.0;
  double value0 = 1.0;

  double rate(double v) const;
};

struct RadiusResult {
  bool extinct = false;
  double value = 0.0;            // radius at the requested time (0 when extinct)
  double extinction_time = 0.0;  // meaningful when extinct
  double bracket_lo = 0.0;       // extinction time bracket
  double bracket_hi = 0.0;
};

RadiusResult integrate_radius(const RadiusODE& ode, double t);

// Extinction time of the ODE if it goes extinct, nullopt otherwise.
std::optional<double> extinction_time(const RadiusODE& ode);

// Two balls of radius R0 touching at the origin, lifted into a neck of
// height ~ t^{3/8}: an even sub-solution of the horizontal graph equation.
class SubSolution {
 public:
  struct Piece {
    double value;
    double slope;
  };

  SubSolution(double R0, int n, double A, double t_max = 1.0);

  double R0() const { return R0_; }
  int n() const { return n_; }
  double A() const { return A_; }
  double valid_until() const { return valid_until_; }

  // r(t) = t^{3/4} and the growing ball radius R(t).
  static double r_of(double t);
  double R_of(double t) const;
  double matching_point(double t) const;
  // Upper bound for the inner-piece residual independent of x.
  double residual_bound(double t) const;

  Piece inner_piece(double x, double t) const;
  Piece cap_piece(double x, double t) const;
  double value(double x, double t) const;
  double residual(double x, double t) const;

  // True when both balls of radius R0 at (+-R0, 0) lie below the profile.
  bool fits_below(const ProfileCurve& p) const;

 private:
  void check_time(double t) const;
  double R0_;
  int n_;
  double A_;
  double valid_until_ = 0.0;
};

struct SelfSimilarBarrier {
  double C = 0.0;
  double rho = 0.0;
  int n = 3;
  double A = 0.0;
  double theta = 0.9;
  double eps0 = 0.1;
  double tau0 = 0.0;
  double T = 0.0;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> violations;
};

ValidationReport validate_supersolution_params(const SelfSimilarBarrier& b);

// Residual of the similarity-variable equation for w = C - sqrt(rho^2 - z^2).
double supersolution_residual(const SelfSimilarBarrier& b, double z, double tau);

// Closed-form n = 2 lower bound (2 theta eps0 - 9 eps0^2)/(1 + theta eps0).
double n2_lower_bound(double theta, double eps0);
// The expression -(C^2+rho^2-2)^2/(4C) + (rho^2-1)C bounded by n2_lower_bound.
double n2_quadratic_minimum(double C, double rho);

// Chebyshev points in (-rho + dz, rho - dz), dz = 1e-3 rho.
std::vector<double> chebyshev_samples(double rho, int count);

// Smallest tau with positive residual at all samples, plus 5% margin.
// Stores the result in b.tau0.
double find_tau0(SelfSimilarBarrier& b, int z_samples = 257);

double selfsimilar_barrier_value(const SelfSimilarBarrier& b, double x, double t);

double envelope_slope(double C, double rho);
// Similarity coordinate of tangency between w and the envelope cone.
double tangency_z(double C, double rho);

double critical_angle(int n, double eps0 = 0.1);

// True when the barrier with blow-down time T lies strictly above u_0 at
// s = 0 on its whole support (checked on the profile samples).
bool barrier_above_profile(const SelfSimilarBarrier& b, const ProfileCurve& p, double T);

}  // namespace pinch
