#pragma once

#include <array>
#include <string>
#include <vector>

#include "chemo/config.hpp"
#include "chemo/grid.hpp"
#include "chemo/mass_system.hpp"
#include "chemo/model.hpp"

namespace chemo {

struct Exponents {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Lower end of the admissible beta interval, 1 + 2/n - sigma + alpha sigma.
double beta_lower_bound(int n, double sigma, double alpha);

/// alpha = (sigma - 4/n)/(2 sigma); beta = midpoint of the admissible interval.
Exponents select_exponents(int n, double sigma);

/// Strict check of  1 + 2/n - sigma + alpha sigma < beta < 1 - 2/n, alpha, beta in (0,1).
bool exponents_admissible(int n, double sigma, const Exponents& ex);

/// Additive slack for strict inequalities.
inline constexpr double kStrictSlack = 1e-6;

struct SubsolutionSpec {
  // Model echo needed to evaluate the operators.
  int n = 3;
  double R = 1.0;
  double sigma = 2.0;
  double K_big = 0.0;
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  double T_star = 1.0;

  Exponents ex;
  double a = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double y0 = 0.0;
  double T = 0.0;
  double s0 = 0.0;

  double delta_star = 0.0;
  double delta_2star = 0.0;
  double gamma_star = 0.0;
  double y_star = 0.0;
  double L_big = 0.0;
  std::array<double, 3> s_star_caps{};  ///< the three upper bounds on s*, before clipping
  double s_star = 0.0;
  double s_2star = 0.0;
  double theta_star = 0.0;
  /// Candidates for theta**: exponent -n/2 or -2/n, each with and without the factor a.
  std::array<double, 4> theta_2star_forms{};
  double theta_2star = 0.0;
};

struct InequalityCheck {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string relation;  ///< "<", "<=", ">", ">="
  bool holds = false;
};

/// Re-evaluates every inequality the construction relies on.
std::vector<InequalityCheck> verify_spec(const SubsolutionSpec& spec);

SubsolutionSpec select_parameters(const ModelParams& p, const DerivedConstants& dc, const Exponents& ex,
                                  double T_star);

/// y(t) = y0 (1 - t/T)^{-1/delta}, the solution of y' = gamma y^{1+delta}.
double y_of_t(const SubsolutionSpec& spec, double t);
double y_prime(const SubsolutionSpec& spec, double t);

enum class Profile { U, W };

struct ProfileEval {
  ProfileSample sample;  ///< d_ss is NaN at the kink unless a side was requested
  double d_ss_left = 0.0;
  double d_ss_right = 0.0;
  double kink = 0.0;     ///< 1 / y(t)
  Side side = Side::Interior;
};

/// Closed-form hat profile (U uses alpha, W uses beta). At s = 1/y(t) pass
/// Side::Left or Side::Right to select the one-sided second derivative.
ProfileEval eval_hat(const SubsolutionSpec& spec, Profile which, double s, double t, Side side = Side::Interior);

struct SubEval {
  ProfileEval U;
  ProfileEval W;
};

/// Damped pair e^{-theta t} (hat U, hat W) with d_t including -theta.
SubEval eval_sub(const SubsolutionSpec& spec, double s, double t, Side side = Side::Interior);

struct InitialData {
  std::vector<double> u0, w0;
  double c = 1.0;
  double mass_u = 0.0;
  double mass_w = 0.0;
  double w_sup = 0.0;
  double w_sup_bound = 0.0;  ///< M_hi / |Omega|
  bool w_sup_within_bound = false;
};

/// Cell averages of c n hat U_s(., 0) and c n hat W_s(., 0) with the smallest
/// c >= 1 putting both masses in [M_lo, M_hi].
InitialData initial_data(const SubsolutionSpec& spec, const ModelParams& p, const RadialGrid& g);

std::string serialize_spec(const SubsolutionSpec& spec);
SubsolutionSpec parse_spec(const KeyValueConfig& cfg);

void write_profile_csv(const SubsolutionSpec& spec, double t, std::size_t samples, const std::string& path);

}  // namespace chemo
