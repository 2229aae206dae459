// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "chemo/error.hpp"
#include "chemo/experiment.hpp"
#include "chemo/io.hpp"

using namespace chemo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ModelParams params(int n, double sigma, double M_lo, Mode mode) {
  ModelParams p;
  p.n = n;
  p.R = 1.0;
  p.k = 1.0;
  p.sigma = sigma;
  p.M_lo = M_lo;
  p.M_hi = 1.5 * M_lo;
  return validate_params(p, mode);
}

struct Case {
  int n;
  double sigma;
};
const std::vector<Case> kCases = {{3, 1.5}, {3, 2.0}, {3, 3.0}, {4, 1.5}, {4, 2.0}, {4, 3.0}};
constexpr double kMassLo = 1e4;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "chemo_acceptance" / name;
  fs::remove_all(d);
  return d;
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

SubsolutionSpec selected(const Case& c) {
  const ModelParams p = params(c.n, c.sigma, kMassLo, Mode::Blowup);
  return select_parameters(p, derived_constants(p), select_exponents(c.n, c.sigma), 1.0);
}

Outcome c1_feasibility() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t checks = 0;
  for (const Case& c : kCases) {
    if (!(c.sigma > 4.0 / c.n)) continue;
    const SubsolutionSpec sp = selected(c);
    for (const auto& ic : verify_spec(sp)) {
      ++checks;
      if (!ic.holds) return {false, "n=" + std::to_string(c.n) + " sigma=" + fmt(c.sigma) + ": " + ic.label};
    }
  }
  const double dt = seconds_since(t0);
  return {dt < 1.0, std::to_string(kCases.size()) + " specs, " + std::to_string(checks) + " inequalities hold, " +
                        fmt(dt) + " s (limit 1 s)"};
}

Outcome c2_certification() {
  double worst = -INFINITY, slowest = 0.0;
  bool ok = true;
  std::string where;
  for (const Case& c : kCases) {
    const auto t0 = std::chrono::steady_clock::now();
    const Certificate cert = certify_subsolution(selected(c), Lattice{512, 256});
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    ok = ok && cert.pass && dt < 30.0;
    for (const auto& r : cert.regions) {
      for (double v : {r.max_p, r.max_q}) {
        if (std::isnan(v)) continue;
        if (v > worst) {
          worst = v;
          where = "n=" + std::to_string(c.n) + " sigma=" + fmt(c.sigma) + " " + to_string(r.kind);
        }
        ok = ok && v <= kCertTol;
      }
    }
  }
  return {ok, "largest residual/scale " + fmt(worst) + " (" + where + "), tol 1e-9, slowest " + fmt(slowest) +
                  " s (limit 30 s)"};
}

double rk4_to(double y, double gamma, double delta, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  auto f = [&](double x) { return gamma * std::pow(x, 1.0 + delta); };
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

double ode_worst(const SubsolutionSpec& sp) {
  double y = sp.y0, t = 0.0, worst = 0.0;
  for (int k = 1; k <= 90; ++k) {
    const double t1 = 0.9 * sp.T * k / 90.0;
    y = rk4_to(y, sp.gamma, sp.delta, t, t1, 2000);
    t = t1;
    worst = std::max(worst, std::abs(y_of_t(sp, t) - y) / y);
  }
  return worst;
}

Outcome c3_ode() {
  SubsolutionSpec ex;
  ex.y0 = 10.0;
  ex.gamma = 0.1;
  ex.delta = 0.5;
  ex.T = 1.0 / (ex.gamma * ex.delta * std::sqrt(ex.y0));
  double worst = ode_worst(ex);
  for (const Case& c : kCases) worst = std::max(worst, ode_worst(selected(c)));
  const double y_late = y_of_t(ex, (1.0 - 1e-7) * ex.T);
  // closed-form first time y reaches 1e6
  const double t_cross = ex.T * (1.0 - std::pow(ex.y0 / 1e6, ex.delta));
  const bool ok = worst <= 1e-8 && y_late > 1e6 && y_of_t(ex, t_cross * (1 + 1e-12)) >= 1e6 * (1 - 1e-12);
  return {ok, "max rel. deviation from RK4 on [0, 0.9T] " + fmt(worst) + " (tol 1e-8, 7 specs); y((1-1e-7)T) = " +
                  fmt(y_late) + ", crosses 1e6 at t/T = " + fmt(t_cross / ex.T)};
}

Outcome c4_mass() {
  const ModelParams p = params(3, 1.0, kMassLo, Mode::Simulate);
  RunControls rc;
  rc.t_end = 1.0;
  rc.dt_init = 1e308;
  const ProbeReport pr = boundedness_probe(p, 256, 10.0, ProbeData::Bump, rc);
  const bool ok = pr.run.mass_drift <= 1e-7 && !pr.run.blowup_flag && pr.run.final_time == 1.0;
  return {ok, "n=3 sigma=1 M=256 t_end=1: relative mass drift " + fmt(pr.run.mass_drift) + " (tol 1e-7), " +
                  std::to_string(pr.run.step_count) + " steps"};
}

struct DualGap {
  double gap, bound;
};

DualGap dual_gap(std::size_t M, double dt) {
  const ModelParams p = params(3, 2.0, kMassLo, Mode::Simulate);
  const RadialGrid g = build_grid(p, M);
  std::vector<double> u(g.size()), w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    u[i] = 2.0 * std::exp(-std::pow(g.r[i] / 0.4, 2)) + 0.5;
    w[i] = std::exp(-std::pow(g.r[i] / 0.5, 2)) + 0.3;
  }
  const RadialState s = make_state(g, u, w);
  const RadialSolver solver(g, p);
  const MassState a = cumulate(solver.step(s, dt), g);
  // mu_w moves by the mean of the explicit relaxation; diffusion keeps means.
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = production_rate(p, u[i]);
  const double mu1 = s.mu_w + dt * (mean_value(g, f) - s.mu_w);
  const MassState b = step_mass(cumulate(s, g), MuwSeries({0.0, dt}, {s.mu_w, mu1}), p, dt);
  double gap = 0.0, scale = 0.0, ds = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    gap = std::max(gap, std::abs(a.U[i] - b.U[i]));
    scale = std::max(scale, std::abs(a.U[i]));
    if (i) ds = std::max(ds, a.s[i] - a.s[i - 1]);
  }
  return {gap, 5.0 * (dt * dt + ds * ds) * scale};
}

Outcome c5_dual_path() {
  const DualGap coarse = dual_gap(128, 5e-3);
  const DualGap fine = dual_gap(256, 2.5e-3);
  const double ratio = coarse.gap / fine.gap;
  const bool ok = coarse.gap <= coarse.bound && fine.gap <= fine.bound && ratio >= 3.0;
  return {ok, "gap " + fmt(coarse.gap) + " (bound " + fmt(coarse.bound) + ") -> " + fmt(fine.gap) + " (bound " +
                  fmt(fine.bound) + "), reduction " + fmt(ratio) + "x (need 3x)"};
}

ExperimentConfig blowup_config(int n, double sigma) {
  ExperimentConfig c;
  c.p = params(n, sigma, kMassLo, Mode::Blowup);
  c.M = 512;
  return c;
}

Outcome c6_ordering(const BlowupOutcome& o, double secs) {
  if (!o.ordering) return {false, "no ordering report: " + o.ordering_error};
  const OrderingReport& r = *o.ordering;
  const bool ok = r.min_margin_rel >= -1e-4 && !r.first_violation_t && !r.after_first_violation_t && r.initial_ok &&
                  r.boundary_ok && secs < 300.0;
  return {ok, "n=3 sigma=2 M=512: min (U - uU)/max U = " + fmt(r.min_margin_rel) + " over " +
                  std::to_string(r.in_window) + " in-window snapshots, " + std::to_string(r.after_window) +
                  " later snapshots before the trigger without violation, " + fmt(secs) + " s"};
}

Outcome c7_dichotomy() {
  struct Row {
    int n;
    std::string sigmas;
    double blow, calm;
  };
  const std::vector<Row> rows = {{3, "1, 2", 2.0, 1.0}, {4, "0.9, 1.5", 1.5, 0.9}};
  std::string detail;
  bool ok = true;
  for (const Row& r : rows) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c;
    c.p = params(r.n, r.blow, kMassLo, Mode::Blowup);
    c.scenario = Scenario::Sweep;
    c.sigma_list = KeyValueConfig::parse("x = " + r.sigmas).number_list("x");
    c.out = workdir("sweep_n" + std::to_string(r.n));
    const ExperimentResult res = run_experiment(c);
    const double secs = seconds_since(t0);
    const std::string csv = slurp(c.out / "sweep.csv");
    const bool blew = csv.find(fmt_num(r.blow) + "," + std::to_string(r.n) + ",blow-up,0") != std::string::npos;
    const bool calm = csv.find(fmt_num(r.calm) + "," + std::to_string(r.n) + ",bounded,0") != std::string::npos;
    ok = ok && blew && calm && res.exit_code == 0 && secs < 600.0;
    detail += "n=" + std::to_string(r.n) + ": sigma=" + fmt(r.blow) + (blew ? " blow-up" : " NO blow-up") +
              ", sigma=" + fmt(r.calm) + (calm ? " bounded" : " NOT bounded") + " (" + fmt(secs) + " s); ";
  }
  return {ok, detail};
}

Outcome c8_envelope(const BlowupOutcome& o) {
  const bool ok = o.verdict.lower_envelope_check && o.verdict.envelope_points > 0;
  return {ok, std::to_string(o.verdict.envelope_points) + " recorded times in the window, worst (u(0,t) - env)/scale = " +
                  fmt(o.verdict.envelope_worst) + " (floor -1e-4)"};
}

Outcome c9_determinism() {
  ExperimentConfig a = blowup_config(3, 2.0), b = blowup_config(3, 2.0);
  a.out = workdir("det_a");
  b.out = workdir("det_b");
  run_experiment(a);
  run_experiment(b);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a.out)) {
    const std::string name = e.path().filename().string();
    if (name == "experiment.cfg") continue;  // echoes the differing output path
    ++files;
    if (slurp(e.path()) != slurp(b.out / name)) return {false, name + " differs"};
  }
  return {files >= 12, std::to_string(files) + " artifacts byte-identical across two runs"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int k, const std::string& title, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d [%s] %s: %s\n", k, o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "parameter pipeline feasibility", c1_feasibility);
  report(2, "subsolution certification", c2_certification);
  report(3, "closed-form ODE", c3_ode);
  report(4, "mass conservation", c4_mass);
  report(5, "transform consistency", c5_dual_path);

  BlowupOutcome run;
  double run_secs = 0.0;
  std::string run_error;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    run = run_blowup_pipeline(blowup_config(3, 2.0));
    run_secs = seconds_since(t0);
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  report(6, "comparison ordering", [&] {
    return run_error.empty() ? c6_ordering(run, run_secs) : Outcome{false, "pipeline threw: " + run_error};
  });
  report(7, "blow-up dichotomy", c7_dichotomy);
  report(8, "envelope lower bound", [&] {
    return run_error.empty() ? c8_envelope(run) : Outcome{false, "pipeline threw: " + run_error};
  });
  report(9, "determinism", c9_determinism);

  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
