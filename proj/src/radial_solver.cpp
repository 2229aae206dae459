#include "chemo/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemo/error.hpp"
#include "chemo/io.hpp"
#include "chemo/simd/kernels.hpp"
#include "chemo/tridiag.hpp"

namespace chemo {

double mean_value(const RadialGrid& g, const std::vector<double>& f) {
  return integrate(g, f) / g.total_volume();
}

SignalField solve_v(const RadialGrid& g, const std::vector<double>& w, double muw) {
  const std::size_t N = g.size();
  const double mean = mean_value(g, w);
  const double ref = std::max(std::abs(mean), std::numeric_limits<double>::min());
  if (!(std::abs(muw - mean) <= kMeanTol * ref)) {
    throw Error(Errc::MeanMismatch, "mu_w = " + fmt_num(muw) + " but weighted mean of w is " + fmt_num(mean));
  }

  SignalField out;
  out.v_r_face.assign(N + 1, 0.0);
  out.v_r.assign(N, 0.0);
  out.v.assign(N, 0.0);

  // Net source inside face j: sum over shells below it of (muw - w) * volume.
  double enclosed = 0.0;
  for (std::size_t j = 1; j < N; ++j) {
    enclosed += (muw - w[j - 1]) * g.volume[j - 1];
    out.v_r_face[j] = enclosed / g.area[j];
  }

  // Node values use the part of the own shell lying below r_i.
  enclosed = 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    enclosed += (muw - w[i - 1]) * g.volume[i - 1];
    const double partial = g.sphere / g.n * power_difference(g.r[i], g.face[i], g.n);
    out.v_r[i] = (enclosed + (muw - w[i]) * partial) / (g.sphere * std::pow(g.r[i], g.n - 1));
  }
  out.v_r[N - 1] = 0.0;

  for (std::size_t i = 1; i < N; ++i) out.v[i] = out.v[i - 1] + out.v_r_face[i] * (g.r[i] - g.r[i - 1]);
  const double shift = mean_value(g, out.v);
  for (auto& x : out.v) x -= shift;
  return out;
}

RadialState make_state(const RadialGrid& g, std::vector<double> u, std::vector<double> w, double t) {
  RadialState s;
  s.t = t;
  s.u = std::move(u);
  s.w = std::move(w);
  s.mu_w = mean_value(g, s.w);
  SignalField sig = solve_v(g, s.w, s.mu_w);
  s.v = std::move(sig.v);
  s.v_r = std::move(sig.v_r);
  s.v_r_face = std::move(sig.v_r_face);
  return s;
}

std::string to_string(Trigger t) {
  switch (t) {
    case Trigger::None: return "none";
    case Trigger::SupThreshold: return "sup_threshold";
    case Trigger::StepCollapse: return "step_collapse";
  }
  return "none";
}

RadialSolver::RadialSolver(RadialGrid grid, ModelParams p, double c_adv)
    : grid_(std::move(grid)), p_(std::move(p)), c_adv_(c_adv) {
  if (!(c_adv_ > 0.0 && c_adv_ <= 1.0)) throw Error(Errc::NonpositiveParameter, "c_adv must lie in (0,1]");
  const std::size_t N = grid_.size();
  coupling_.assign(N + 1, 0.0);
  for (std::size_t j = 1; j < N; ++j) coupling_[j] = grid_.area[j] / (grid_.r[j] - grid_.r[j - 1]);
}

double RadialSolver::stable_dt(const RadialState& s) const {
  const std::size_t N = grid_.size();
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    const double out = grid_.area[i + 1] * std::max(s.v_r_face[i + 1], 0.0) +
                       grid_.area[i] * std::max(-s.v_r_face[i], 0.0);
    if (out > 0.0) dt = std::min(dt, grid_.volume[i] / out);
  }
  return c_adv_ * dt;
}

double RadialSolver::reaction_dt(const RadialState& s) const {
  // w takes the production explicitly, so cap its relative change per step
  // at 10%. Floor at the mean so nodes with tiny w do not stall the run.
  const double floor_w = std::max(s.mu_w, std::numeric_limits<double>::min());
  double ratio = 1.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double f = production_rate(p_, std::max(s.u[i], 0.0));
    if (f > 0.0) ratio = std::min(ratio, std::max(s.w[i], floor_w) / f);
  }
  return 0.1 * ratio;
}

std::vector<double> RadialSolver::implicit_diffusion(const std::vector<double>& x, double dt) const {
  const std::size_t N = grid_.size();
  std::vector<double> lo(N), di(N), up(N), rhs(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double dl = coupling_[i];
    const double dr = coupling_[i + 1];
    lo[i] = -dt * dl;
    up[i] = -dt * dr;
    di[i] = grid_.volume[i] + dt * (dl + dr);
    rhs[i] = grid_.volume[i] * x[i];
  }
  return solve_tridiagonal(std::move(lo), std::move(di), std::move(up), std::move(rhs));
}

namespace {

void clip_negative(std::vector<double>& f, const char* name) {
  const auto& k = simd::active_kernels();
  const double hi = k.max_value(f.data(), f.size());
  const double lo = k.min_value(f.data(), f.size());
  if (!std::isfinite(hi) || !std::isfinite(lo)) {
    throw Error(Errc::StabilityViolated, std::string("non-finite ") + name + " after step");
  }
  if (lo >= 0.0) return;
  if (lo < -1e-12 * std::max(hi, 0.0)) {
    throw Error(Errc::NegativeDensityProduced, std::string(name) + " reached " + fmt_num(lo));
  }
  for (auto& x : f) x = std::max(x, 0.0);
}

}  // namespace

RadialState RadialSolver::step(const RadialState& s, double dt) const {
  const std::size_t N = grid_.size();
  if (!(dt > 0.0)) throw Error(Errc::NonpositiveParameter, "dt must be positive");
  const double limit = stable_dt(s);
  if (dt > limit * (1.0 + 1e-12)) {
    throw Error(Errc::StabilityViolated, "dt = " + fmt_num(dt) + " exceeds advective bound " + fmt_num(limit));
  }
  const auto& k = simd::active_kernels();

  // Chemotactic transport: upwind flux of u * v_r through interior faces.
  std::vector<double> flux(N + 1, 0.0);
  k.upwind_flux(grid_.area.data() + 1, s.v_r_face.data() + 1, s.u.data(), s.u.data() + 1, flux.data() + 1,
                N - 1);
  std::vector<double> u_adv(N);
  k.flux_update(s.u.data(), flux.data(), grid_.inv_volume.data(), dt, u_adv.data(), N);

  std::vector<double> prod(N);
  for (std::size_t i = 0; i < N; ++i) prod[i] = production_rate(p_, s.u[i]);
  std::vector<double> w_react(N);
  k.relax_update(s.w.data(), prod.data(), dt, w_react.data(), N);

  RadialState next;
  next.t = s.t + dt;
  next.u = implicit_diffusion(u_adv, dt);
  next.w = implicit_diffusion(w_react, dt);
  clip_negative(next.u, "u");
  clip_negative(next.w, "w");

  next.mu_w = mean_value(grid_, next.w);
  SignalField sig = solve_v(grid_, next.w, next.mu_w);
  next.v = std::move(sig.v);
  next.v_r = std::move(sig.v_r);
  next.v_r_face = std::move(sig.v_r_face);
  return next;
}

RunReport RadialSolver::run(RadialState s, const RunControls& c, const Observer& on_record,
                            const Observer& on_checkpoint) const {
  const auto& k = simd::active_kernels();
  RunReport rep;
  const double sup_u0 = k.max_value(s.u.data(), s.u.size());
  const double sup_w0 = k.max_value(s.w.data(), s.w.size());
  const double mass0 = integrate(grid_, s.u);

  std::vector<double> checkpoints = c.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_cp = 0;
  while (next_cp < checkpoints.size() && checkpoints[next_cp] < s.t) ++next_cp;

  auto record = [&](const RadialState& st, double dt, double sup_u, double sup_w, double mass) {
    rep.times.push_back(st.t);
    rep.sup_u_history.push_back(sup_u);
    rep.sup_w_history.push_back(sup_w);
    rep.mass_history.push_back(mass);
    rep.muw_history.push_back(st.mu_w);
    rep.dt_history.push_back(dt);
    rep.u_center_history.push_back(st.u.front());
    if (on_record) on_record(st);
  };

  auto fire_checkpoints = [&](const RadialState& st) {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] <= st.t) {
      if (on_checkpoint) on_checkpoint(st);
      ++next_cp;
    }
  };

  record(s, 0.0, sup_u0, sup_w0, mass0);
  fire_checkpoints(s);

  double dt_prev = c.dt_init / 1.2;
  bool recorded_last = true;
  double last_dt = 0.0;
  while (s.t < c.t_end) {
    if (rep.step_count >= c.max_steps) {
      rep.step_limit_hit = true;
      break;
    }
    double dt = std::min({1.2 * dt_prev, stable_dt(s), reaction_dt(s)});
    if (dt < c.dt_min) {
      rep.blowup_flag = true;
      rep.trigger = Trigger::StepCollapse;
      rep.blowup_time_estimate = s.t;
      break;
    }
    dt_prev = dt;

    double t_target = s.t + dt;
    bool snap = false;
    if (next_cp < checkpoints.size() && checkpoints[next_cp] < c.t_end && t_target >= checkpoints[next_cp]) {
      t_target = checkpoints[next_cp];
      snap = true;
    }
    if (t_target >= c.t_end) {
      t_target = c.t_end;
      snap = true;
    }
    if (snap) dt = t_target - s.t;
    if (!(dt > 0.0)) break;

    s = step(s, dt);
    if (snap) s.t = t_target;
    ++rep.step_count;
    last_dt = dt;

    const double sup_u = k.max_value(s.u.data(), s.u.size());
    const double sup_w = k.max_value(s.w.data(), s.w.size());
    const double mass = integrate(grid_, s.u);
    rep.mass_drift = std::max(rep.mass_drift, std::abs(mass - mass0) / mass0);
    if (!rep.T0_estimate && sup_w > 2.0 * sup_w0) rep.T0_estimate = s.t;
    if (!rep.muw_exit_time && (s.mu_w < c.mu_lo || s.mu_w > c.mu_hi)) rep.muw_exit_time = s.t;

    const bool triggered = sup_u >= c.blowup_factor * sup_u0;
    recorded_last = triggered || rep.step_count % std::max<std::size_t>(c.record_every, 1) == 0;
    if (recorded_last) record(s, dt, sup_u, sup_w, mass);
    fire_checkpoints(s);
    if (triggered) {
      rep.blowup_flag = true;
      rep.trigger = Trigger::SupThreshold;
      rep.blowup_time_estimate = s.t;
      break;
    }
  }
  if (!recorded_last) {
    record(s, last_dt, k.max_value(s.u.data(), s.u.size()), k.max_value(s.w.data(), s.w.size()),
           integrate(grid_, s.u));
  }
  rep.final_time = s.t;
  rep.final_state = std::move(s);
  return rep;
}

void write_run_csv(const RunReport& rep, const std::string& path) {
  CsvWriter csv({"t", "sup_u", "sup_w", "mass_u", "mu_w", "dt"});
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    csv.row(std::vector<double>{rep.times[i], rep.sup_u_history[i], rep.sup_w_history[i], rep.mass_history[i],
                                rep.muw_history[i], rep.dt_history[i]});
  }
  csv.save(path);
}

void write_checkpoint_csv(const RadialGrid& g, const RadialState& s, const std::string& path) {
  CsvWriter csv({"r", "u", "v", "w"});
  for (std::size_t i = 0; i < g.size(); ++i) csv.row(std::vector<double>{g.r[i], s.u[i], s.v[i], s.w[i]});
  csv.save(path);
}

}  // namespace chemo
