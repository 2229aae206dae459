#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chemo/grid.hpp"
#include "chemo/model.hpp"

namespace chemo {

struct RadialState {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;       ///< zero weighted mean
  std::vector<double> w;
  std::vector<double> v_r;     ///< at nodes
  std::vector<double> v_r_face;
  double mu_w = 0.0;
};

struct SignalField {
  std::vector<double> v;
  std::vector<double> v_r;
  std::vector<double> v_r_face;
};

inline constexpr double kMeanTol = 1e-9;

double mean_value(const RadialGrid& g, const std::vector<double>& f);

/// Radial Poisson solve of  v_rr + (n-1)/r v_r = muw - w  with v_r(0) = v_r(R) = 0
/// and zero mean, by Gauss's law on the finite-volume shells.
SignalField solve_v(const RadialGrid& g, const std::vector<double>& w, double muw);

/// Assembles a consistent state (mean of w, signal) from densities.
RadialState make_state(const RadialGrid& g, std::vector<double> u, std::vector<double> w, double t = 0.0);

enum class Trigger { None, SupThreshold, StepCollapse };
std::string to_string(Trigger t);

struct RunControls {
  double t_end = 1.0;
  double dt_init = 1e-6;
  double dt_min = 1e-300;
  double blowup_factor = 1e6;
  std::size_t record_every = 1;
  std::size_t max_steps = 20'000'000;
  std::vector<double> checkpoints;  ///< times at which the step is clipped and on_checkpoint fires
  double mu_lo = 0.0;               ///< band for the first-exit flag of mu_w
  double mu_hi = 1e308;
};

struct RunReport {
  std::vector<double> times;
  std::vector<double> sup_u_history;
  std::vector<double> sup_w_history;
  std::vector<double> mass_history;
  std::vector<double> muw_history;
  std::vector<double> dt_history;
  std::vector<double> u_center_history;
  double final_time = 0.0;
  std::size_t step_count = 0;
  double mass_drift = 0.0;
  bool blowup_flag = false;
  std::optional<double> blowup_time_estimate;
  Trigger trigger = Trigger::None;
  std::optional<double> T0_estimate;     ///< first time sup w > 2 sup w0
  std::optional<double> muw_exit_time;   ///< first time mu_w leaves [mu_lo, mu_hi]
  bool step_limit_hit = false;
  RadialState final_state;
};

class RadialSolver {
 public:
  using Observer = std::function<void(const RadialState&)>;

  RadialSolver(RadialGrid grid, ModelParams p, double c_adv = 0.5);

  const RadialGrid& grid() const { return grid_; }
  const ModelParams& params() const { return p_; }

  /// Largest dt keeping the explicit upwind update positive, times c_adv.
  double stable_dt(const RadialState& s) const;
  /// 0.1 * min(1, min_i max(w_i, mean w) / f(u_i)).
  double reaction_dt(const RadialState& s) const;

  RadialState step(const RadialState& s, double dt) const;

  /// on_record fires at t = 0, every record_every steps, and at the end.
  RunReport run(RadialState s0, const RunControls& c, const Observer& on_record = {},
                const Observer& on_checkpoint = {}) const;

 private:
  std::vector<double> implicit_diffusion(const std::vector<double>& rhs, double dt) const;

  RadialGrid grid_;
  ModelParams p_;
  double c_adv_;
  std::vector<double> coupling_;  ///< area_j / (r_j - r_{j-1}) for interior faces, 0 at ends
};

void write_run_csv(const RunReport& rep, const std::string& path);
void write_checkpoint_csv(const RadialGrid& g, const RadialState& s, const std::string& path);

}  // namespace chemo
