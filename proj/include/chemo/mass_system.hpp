#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chemo/grid.hpp"
#include "chemo/model.hpp"
#include "chemo/radial_solver.hpp"

namespace chemo {

/// Cumulated densities on the nodes s_i = r_i^n of a radial grid.
struct MassState {
  double t = 0.0;
  std::vector<double> s;
  std::vector<double> U, W;
  std::vector<double> U_s, W_s;
  std::vector<double> U_ss, W_ss;

  std::size_t size() const { return s.size(); }
};

std::vector<double> s_nodes(const RadialGrid& g);

/// U(s) = int_0^{s^{1/n}} rho^{n-1} u drho with u piecewise constant on the
/// grid's shells; U_s = u/n at nodes, U_ss by differencing U_s.
MassState cumulate(const RadialState& state, const RadialGrid& g);

/// Value and derivatives of a profile at one (s,t). At a kink the caller
/// picks the one-sided d_ss; NaN marks a derivative that is not available.
struct ProfileSample {
  double value = 0.0;
  double d_t = 0.0;
  double d_s = 0.0;
  double d_ss = 0.0;
};

enum class Side { Interior, Left, Right };
std::string to_string(Side s);

/// Operator value plus the largest absolute term entering it.
struct Residual {
  double value = 0.0;
  double scale = 0.0;
};

/// phi_t - n^2 s^{2-2/n} phi_ss - n phi_s (psi - mu_hi s/n)
Residual p_residual(const ProfileSample& phi, const ProfileSample& psi, double mu_hi, int n, double s);

/// psi_t - n^2 s^{2-2/n} psi_ss + psi - K s^{1-sigma} phi^sigma, with s^{1-sigma} 0^sigma = 0
Residual q_residual(const ProfileSample& phi, const ProfileSample& psi, double K_big, double sigma, int n,
                    double s);

struct OperatorResidual {
  double s = 0.0;
  double t = 0.0;
  double p_value = 0.0;
  double q_value = 0.0;
  Side side = Side::Interior;
};

/// Time series for mu_w(t): piecewise linear, constant beyond the ends.
class MuwSeries {
 public:
  static MuwSeries constant(double value) { return MuwSeries({0.0}, {value}); }
  MuwSeries(std::vector<double> times, std::vector<double> values);
  double operator()(double t) const;

 private:
  std::vector<double> t_, v_;
};

inline constexpr double kMonotonicityTol = 1e-10;

/// Largest explicit transport step for the mass system (CFL 1 on the upwind term).
double mass_stable_dt(const MassState& ms, const MuwSeries& muw, const ModelParams& p);

/// One IMEX step of the transformed system: degenerate diffusion implicit,
/// transport and the nonlocal production explicit. U(0) = W(0) = 0,
/// U(R^n) held fixed, W(R^n) = mu_w(t+dt) R^n / n.
MassState step_mass(const MassState& ms, const MuwSeries& muw, const ModelParams& p, double dt);

/// Discrete residuals of a simulated pair between two recorded states. phi_t
/// and psi_t are backward differences; space derivatives come from `cur`.
std::vector<OperatorResidual> sweep_residuals(const MassState& prev, const MassState& cur, double mu_hi,
                                              double K_big, double sigma, int n);

void write_mass_csv(const MassState& ms, const std::string& path);
void write_residual_csv(const std::vector<OperatorResidual>& rows, const std::string& path);

}  // namespace chemo
