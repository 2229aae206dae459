#include "chemo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>

#include "chemo/error.hpp"
#include "chemo/io.hpp"
#include "chemo/mass_system.hpp"

namespace chemo {
namespace fs = std::filesystem;

Scenario parse_scenario(const std::string& s) {
  if (s == "blowup") return Scenario::Blowup;
  if (s == "subcritical-probe") return Scenario::SubcriticalProbe;
  if (s == "certify-only") return Scenario::CertifyOnly;
  if (s == "sweep") return Scenario::Sweep;
  throw Error(Errc::ConfigError, "unknown scenario '" + s + "'");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Blowup: return "blowup";
    case Scenario::SubcriticalProbe: return "subcritical-probe";
    case Scenario::CertifyOnly: return "certify-only";
    case Scenario::Sweep: return "sweep";
  }
  return "blowup";
}

const std::vector<std::string>& experiment_keys() {
  static const std::vector<std::string> keys = {
      "n",     "R",         "k",        "sigma",       "M_lo",    "M_hi",         "mode",       "M",
      "Ns",    "Nt",        "t_end",    "dt_init",     "dt_min",  "blowup_factor", "T_star",    "out",
      "scenario", "sigma_list", "grid", "grid_h0",     "c_adv",   "record_every", "max_steps",  "probe_horizon",
      "probe_mass", "checkpoints"};
  return keys;
}

namespace {

std::size_t positive_count(const KeyValueConfig& kv, const std::string& key, std::size_t fallback) {
  const long long v = kv.integer(key, static_cast<long long>(fallback));
  if (v <= 0) throw Error(Errc::ConfigError, "key '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

double positive_number(const KeyValueConfig& kv, const std::string& key, double fallback) {
  const double v = kv.number(key, fallback);
  if (!(v > 0.0)) throw Error(Errc::ConfigError, "key '" + key + "' must be positive");
  return v;
}

void log(const ExperimentConfig& cfg, const std::string& msg) {
  if (cfg.verbose) std::cerr << "[chemo] " << msg << "\n";
}

std::string sigma_dir(double sigma) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "sigma_%.6g", sigma);
  return buf;
}

}  // namespace

ExperimentConfig parse_experiment(const KeyValueConfig& kv) {
  const auto& keys = experiment_keys();
  kv.require_known(std::set<std::string>(keys.begin(), keys.end()));

  ExperimentConfig cfg;
  cfg.scenario = parse_scenario(kv.text("scenario", "blowup"));
  cfg.p.n = static_cast<int>(kv.integer("n"));
  cfg.p.R = kv.number("R");
  cfg.p.k = kv.number("k");
  cfg.p.sigma = kv.number("sigma", 0.0);
  cfg.p.M_lo = kv.number("M_lo");
  cfg.p.M_hi = kv.number("M_hi");
  const std::string default_mode = cfg.scenario == Scenario::SubcriticalProbe ? "simulate" : "blowup";
  cfg.mode = parse_mode(kv.text("mode", default_mode));

  cfg.M = positive_count(kv, "M", cfg.M);
  cfg.Ns = positive_count(kv, "Ns", cfg.Ns);
  cfg.Nt = positive_count(kv, "Nt", cfg.Nt);
  if (kv.has("t_end")) {
    cfg.t_end = kv.number("t_end");
    if (!(*cfg.t_end >= 0.0)) throw Error(Errc::ConfigError, "t_end must be nonnegative");
  }
  cfg.dt_init = positive_number(kv, "dt_init", cfg.dt_init);
  cfg.dt_min = positive_number(kv, "dt_min", cfg.dt_min);
  cfg.blowup_factor = positive_number(kv, "blowup_factor", cfg.blowup_factor);
  cfg.T_star = positive_number(kv, "T_star", cfg.T_star);
  cfg.out = kv.text("out", cfg.out.string());
  if (kv.has("sigma_list")) cfg.sigma_list = kv.number_list("sigma_list");
  const std::string grid = kv.text("grid", "auto");
  if (grid == "auto") cfg.grid = GridKind::Auto;
  else if (grid == "uniform") cfg.grid = GridKind::Uniform;
  else if (grid == "graded") cfg.grid = GridKind::Graded;
  else throw Error(Errc::ConfigError, "grid must be auto, uniform or graded");
  if (kv.has("grid_h0")) cfg.grid_h0 = positive_number(kv, "grid_h0", 1.0);
  cfg.c_adv = positive_number(kv, "c_adv", cfg.c_adv);
  if (cfg.c_adv > 1.0) throw Error(Errc::ConfigError, "c_adv must not exceed 1");
  cfg.record_every = positive_count(kv, "record_every", cfg.record_every);
  cfg.max_steps = positive_count(kv, "max_steps", cfg.max_steps);
  cfg.probe_horizon = positive_number(kv, "probe_horizon", cfg.probe_horizon);
  cfg.probe_mass = positive_number(kv, "probe_mass", cfg.probe_mass);
  if (kv.has("checkpoints")) cfg.checkpoints = kv.number_list("checkpoints");

  if (cfg.scenario == Scenario::Sweep) {
    if (cfg.sigma_list.empty()) throw Error(Errc::ConfigError, "sweep needs sigma_list");
    for (double s : cfg.sigma_list) {
      ModelParams q = cfg.p;
      q.sigma = s;
      const bool super = s * q.n > 4.0 && !is_critical_exponent(q.n, s);
      validate_params(q, super ? Mode::Blowup : Mode::Simulate);
    }
  } else {
    if (!kv.has("sigma")) throw Error(Errc::ConfigError, "missing key 'sigma'");
    Mode need = cfg.mode;
    if (cfg.scenario != Scenario::SubcriticalProbe) need = Mode::Blowup;
    cfg.p = validate_params(cfg.p, need);
  }
  return cfg;
}

std::string serialize_experiment(const ExperimentConfig& cfg) {
  std::string out;
  auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto list = [](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt_num(xs[i]);
    return s;
  };
  put("scenario", to_string(cfg.scenario));
  put("mode", to_string(cfg.mode));
  put("n", std::to_string(cfg.p.n));
  put("R", fmt_num(cfg.p.R));
  put("k", fmt_num(cfg.p.k));
  put("sigma", fmt_num(cfg.p.sigma));
  put("M_lo", fmt_num(cfg.p.M_lo));
  put("M_hi", fmt_num(cfg.p.M_hi));
  put("M", std::to_string(cfg.M));
  put("Ns", std::to_string(cfg.Ns));
  put("Nt", std::to_string(cfg.Nt));
  if (cfg.t_end) put("t_end", fmt_num(*cfg.t_end));
  put("dt_init", fmt_num(cfg.dt_init));
  put("dt_min", fmt_num(cfg.dt_min));
  put("blowup_factor", fmt_num(cfg.blowup_factor));
  put("T_star", fmt_num(cfg.T_star));
  if (!cfg.sigma_list.empty()) put("sigma_list", list(cfg.sigma_list));
  put("grid", cfg.grid == GridKind::Auto ? "auto" : cfg.grid == GridKind::Uniform ? "uniform" : "graded");
  if (cfg.grid_h0) put("grid_h0", fmt_num(*cfg.grid_h0));
  put("c_adv", fmt_num(cfg.c_adv));
  put("record_every", std::to_string(cfg.record_every));
  put("max_steps", std::to_string(cfg.max_steps));
  put("probe_horizon", fmt_num(cfg.probe_horizon));
  put("probe_mass", fmt_num(cfg.probe_mass));
  if (!cfg.checkpoints.empty()) put("checkpoints", list(cfg.checkpoints));
  return out;
}

BlowupOutcome run_blowup_pipeline(const ExperimentConfig& cfg) {
  BlowupOutcome res;
  const ModelParams p = validate_params(cfg.p, Mode::Blowup);
  const DerivedConstants dc = derived_constants(p);
  res.spec = select_parameters(p, dc, select_exponents(p.n, p.sigma), cfg.T_star);
  log(cfg, "spec: T=" + fmt_num(res.spec.T) + " theta=" + fmt_num(res.spec.theta) + " y0=" + fmt_num(res.spec.y0));
  res.certificate = certify_subsolution(res.spec, Lattice{cfg.Ns, cfg.Nt});
  log(cfg, std::string("certificate: ") + (res.certificate.pass ? "pass" : "fail"));

  const double kink_r = std::pow(res.spec.y0, -1.0 / p.n);
  const bool graded = cfg.grid != GridKind::Uniform;
  // A centre cell of width h caps sup u near mass / h^n, so reaching the
  // trigger factor F from kink scale needs h ~ kink * F^(-1/n).
  res.grid_h0 = cfg.grid_h0.value_or(kink_r * std::pow(cfg.blowup_factor, -1.0 / p.n) / 8.0);
  res.grid = graded ? build_graded_grid(p, cfg.M, res.grid_h0) : build_grid(p, cfg.M);
  res.data = initial_data(res.spec, p, res.grid);
  log(cfg, "initial data: c=" + fmt_num(res.data.c) + " mass_u=" + fmt_num(res.data.mass_u));

  RunControls rc;
  rc.t_end = cfg.t_end.value_or(res.spec.T);
  rc.dt_init = cfg.dt_init;
  rc.dt_min = cfg.dt_min;
  rc.blowup_factor = cfg.blowup_factor;
  rc.record_every = cfg.record_every;
  rc.max_steps = cfg.max_steps;
  rc.checkpoints = cfg.checkpoints;
  rc.mu_lo = dc.mu_lo;
  rc.mu_hi = dc.mu_hi;

  const double sup_w0 = *std::max_element(res.data.w0.begin(), res.data.w0.end());
  OrderingMonitor monitor(res.spec, sup_w0);
  RadialSolver solver(res.grid, p, cfg.c_adv);
  const RadialGrid& g = res.grid;
  auto on_record = [&](const RadialState& st) {
    SimSnapshot snap;
    snap.ms = cumulate(st, g);
    snap.mu_w = st.mu_w;
    snap.sup_w = *std::max_element(st.w.begin(), st.w.end());
    snap.u_center = st.u.front();
    monitor.observe(snap);
  };
  auto on_checkpoint = [&](const RadialState& st) { res.checkpoint_states.push_back(st); };
  res.run = solver.run(make_state(g, res.data.u0, res.data.w0), rc, on_record, on_checkpoint);
  log(cfg, "run: steps=" + std::to_string(res.run.step_count) + " final_t=" + fmt_num(res.run.final_time) +
               " trigger=" + to_string(res.run.trigger));

  double window_end = res.spec.T;
  try {
    res.ordering = monitor.report();
    if (res.ordering->window_closed_at) window_end = *res.ordering->window_closed_at;
  } catch (const Error& e) {
    res.ordering_error = e.what();
    window_end = -1.0;
  }
  // The envelope is asserted only at times the window still held.
  if (res.ordering && res.ordering->window_closed_at) window_end = std::nextafter(window_end, -1.0);
  res.verdict = detect_blowup(res.run, res.spec, window_end);
  return res;
}

namespace {

std::string summary_line(const std::string& scenario, double sigma, int n, const std::string& result,
                         std::optional<double> t_trigger) {
  return "scenario=" + scenario + " sigma=" + fmt_num(sigma) + " n=" + std::to_string(n) + " result=" + result +
         " t_trigger=" + (t_trigger ? fmt_num(*t_trigger) : std::string("none"));
}

std::string ordering_text(const BlowupOutcome& r) {
  std::string out = "# comparison ordering\n";
  if (!r.ordering) return out + "error = " + r.ordering_error + "\n";
  const OrderingReport& o = *r.ordering;
  auto opt = [](const std::optional<double>& x) { return x ? fmt_num(*x) : std::string("none"); };
  out += "pass = " + std::string(o.pass ? "true" : "false") + "\n";
  out += "snapshots = " + std::to_string(o.snapshots) + "\n";
  out += "in_window = " + std::to_string(o.in_window) + "\n";
  out += "window_closed_at = " + opt(o.window_closed_at) + "\n";
  out += "window_close_reason = " + (o.window_close_reason.empty() ? std::string("none") : o.window_close_reason) + "\n";
  out += "initial_ordering = " + std::string(o.initial_ok ? "ok" : "violated") + "\n";
  out += "boundary_hypotheses = " + std::string(o.boundary_ok ? "ok" : "violated") + "\n";
  out += "tol_rel = " + fmt_num(o.tol_rel) + "\n";
  out += "min_margin = " + fmt_num(o.min_margin) + "\n";
  out += "min_margin_rel = " + fmt_num(o.min_margin_rel) + "\n";
  out += "t_min_margin = " + fmt_num(o.t_min_margin) + "\n";
  out += "s_min_margin = " + fmt_num(o.s_min_margin) + "\n";
  out += "first_violation_t = " + opt(o.first_violation_t) + "\n";
  out += "first_violation_s = " + opt(o.first_violation_s) + "\n";
  out += "w_min_margin_rel = " + fmt_num(o.w_min_margin_rel) + " (informational)\n";
  out += "after_window_snapshots = " + std::to_string(o.after_window) + "\n";
  out += "after_window_min_margin_rel = " + fmt_num(o.after_min_margin_rel) + " (informational)\n";
  out += "after_window_first_violation_t = " + opt(o.after_first_violation_t) + "\n";
  out += "\n# blow-up verdict\n";
  out += "blew_up_before_T = " + std::string(r.verdict.blew_up_before ? "true" : "false") + "\n";
  out += "trigger = " + to_string(r.run.trigger) + "\n";
  out += "t_trigger = " + opt(r.verdict.t_trigger) + "\n";
  out += "T = " + fmt_num(r.spec.T) + "\n";
  out += "lower_envelope_check = " + std::string(r.verdict.lower_envelope_check ? "true" : "false") + "\n";
  out += "envelope_points = " + std::to_string(r.verdict.envelope_points) + "\n";
  out += "envelope_worst_rel = " + fmt_num(r.verdict.envelope_worst) + "\n";
  out += "\n# initial data\n";
  out += "c = " + fmt_num(r.data.c) + "\n";
  out += "mass_u = " + fmt_num(r.data.mass_u) + "\n";
  out += "mass_w = " + fmt_num(r.data.mass_w) + "\n";
  out += "sup_w0 = " + fmt_num(r.data.w_sup) + "\n";
  out += "sup_w0_bound = " + fmt_num(r.data.w_sup_bound) + "\n";
  out += "sup_w0_within_bound = " + std::string(r.data.w_sup_within_bound ? "true" : "false") +
         " (informational: incompatible with the initial ordering for any admissible spec)\n";
  out += "grid_h0 = " + fmt_num(r.grid_h0) + "\n";
  out += "mass_drift = " + fmt_num(r.run.mass_drift) + "\n";
  out += "steps = " + std::to_string(r.run.step_count) + "\n";
  out += "T0_estimate = " + opt(r.run.T0_estimate) + "\n";
  out += "muw_exit_time = " + opt(r.run.muw_exit_time) + "\n";
  return out;
}

void write_spec_files(const fs::path& dir, const SubsolutionSpec& spec, const Certificate& cert,
                      const std::vector<OperatorResidual>& rows) {
  write_text_file(dir / "spec.cfg", serialize_spec(spec));
  write_text_file(dir / "certificate.txt", certificate_text(cert));
  write_text_file(dir / "certificate.csv", certificate_csv(cert));
  write_residual_csv(rows, (dir / "residuals.csv").string());
  write_profile_csv(spec, 0.0, 257, (dir / "profile.csv").string());
}

ExperimentResult run_certify_only(const ExperimentConfig& cfg, const fs::path& dir) {
  const ModelParams p = cfg.p;
  const DerivedConstants dc = derived_constants(p);
  const SubsolutionSpec spec = select_parameters(p, dc, select_exponents(p.n, p.sigma), cfg.T_star);
  std::vector<OperatorResidual> rows;
  const Certificate cert = certify_subsolution(spec, Lattice{cfg.Ns, cfg.Nt}, &rows);
  write_spec_files(dir, spec, cert, rows);
  ExperimentResult r;
  r.exit_code = cert.pass ? 0 : 2;
  r.summary = summary_line("certify-only", p.sigma, p.n, cert.pass ? "pass" : "fail", std::nullopt);
  write_text_file(dir / "summary.txt", r.summary + "\n");
  emit_plot_script(dir);
  return r;
}

ExperimentResult run_blowup(const ExperimentConfig& cfg, const fs::path& dir, double* T_out = nullptr) {
  BlowupOutcome res = run_blowup_pipeline(cfg);
  if (T_out) *T_out = res.spec.T;

  std::vector<OperatorResidual> rows;
  certify_subsolution(res.spec, Lattice{cfg.Ns, cfg.Nt}, &rows);
  write_spec_files(dir, res.spec, res.certificate, rows);
  write_run_csv(res.run, (dir / "run.csv").string());

  const RadialState s0 = make_state(res.grid, res.data.u0, res.data.w0);
  write_checkpoint_csv(res.grid, s0, (dir / "checkpoint_initial.csv").string());
  write_checkpoint_csv(res.grid, res.run.final_state, (dir / "checkpoint_final.csv").string());
  for (std::size_t k = 0; k < res.checkpoint_states.size(); ++k) {
    write_checkpoint_csv(res.grid, res.checkpoint_states[k], (dir / ("checkpoint_" + std::to_string(k) + ".csv")).string());
  }
  write_mass_csv(cumulate(s0, res.grid), (dir / "mass_initial.csv").string());
  const MassState ms_final = cumulate(res.run.final_state, res.grid);
  write_mass_csv(ms_final, (dir / "mass_final.csv").string());

  CsvWriter overlay({"t", "s", "U", "uU"});
  for (const RadialState* st : {&s0, static_cast<const RadialState*>(&res.run.final_state)}) {
    if (!(st->t < res.spec.T)) continue;
    const MassState ms = cumulate(*st, res.grid);
    for (std::size_t i = 0; i < ms.s.size(); ++i) {
      const double uU = eval_sub(res.spec, ms.s[i], st->t, Side::Left).U.sample.value;
      overlay.row(std::vector<double>{st->t, ms.s[i], ms.U[i], uU});
    }
  }
  overlay.save(dir / "overlay.csv");
  write_text_file(dir / "ordering.txt", ordering_text(res));

  const bool ordering_ok = res.ordering && res.ordering->pass;
  const bool verdict_ok = res.verdict.blew_up_before && res.verdict.lower_envelope_check;
  ExperimentResult r;
  if (!res.certificate.pass) r.exit_code = 2;
  else if (!ordering_ok || !verdict_ok) r.exit_code = 3;
  const std::string result = r.exit_code == 0 ? "pass" : "fail";
  r.summary = summary_line("blowup", cfg.p.sigma, cfg.p.n, result + " blew_up=" + (res.verdict.blew_up_before ? "true" : "false"),
                           res.verdict.t_trigger);
  write_text_file(dir / "summary.txt", r.summary + "\n");
  emit_plot_script(dir);
  return r;
}

ExperimentResult run_probe(const ExperimentConfig& cfg, const fs::path& dir, double horizon) {
  RunControls rc;
  rc.t_end = horizon;
  rc.dt_init = cfg.dt_init;
  rc.dt_min = cfg.dt_min;
  rc.blowup_factor = cfg.blowup_factor;
  rc.record_every = cfg.record_every;
  rc.max_steps = cfg.max_steps;
  const ProbeReport pr = boundedness_probe(cfg.p, cfg.M, cfg.probe_mass, ProbeData::Bump, rc, cfg.c_adv);
  write_run_csv(pr.run, (dir / "run.csv").string());
  const RadialGrid g = build_grid(cfg.p, cfg.M);
  write_checkpoint_csv(g, pr.run.final_state, (dir / "checkpoint_final.csv").string());
  std::string txt = "# boundedness probe\n";
  txt += "bounded = " + std::string(pr.bounded ? "true" : "false") + "\n";
  txt += "horizon = " + fmt_num(pr.horizon) + "\n";
  txt += "sup_initial = " + fmt_num(pr.sup_initial) + "\n";
  txt += "sup_max = " + fmt_num(pr.sup_max) + "\n";
  txt += "mass = " + fmt_num(cfg.probe_mass) + "\n";
  txt += "mass_drift = " + fmt_num(pr.run.mass_drift) + "\n";
  txt += "steps = " + std::to_string(pr.run.step_count) + "\n";
  write_text_file(dir / "probe.txt", txt);
  ExperimentResult r;
  r.exit_code = pr.bounded ? 0 : 3;
  r.summary = summary_line("subcritical-probe", cfg.p.sigma, cfg.p.n, pr.bounded ? "bounded" : "unbounded",
                           pr.run.blowup_time_estimate);
  write_text_file(dir / "summary.txt", r.summary + "\n");
  emit_plot_script(dir);
  return r;
}

ExperimentResult run_sweep(const ExperimentConfig& cfg, const fs::path& dir) {
  std::vector<double> sigmas = cfg.sigma_list;
  std::vector<std::string> lines(sigmas.size());
  std::vector<std::string> verdicts(sigmas.size());
  std::vector<int> codes(sigmas.size(), 0);
  std::vector<std::optional<double>> triggers(sigmas.size());
  ExperimentResult total;

  // Supercritical runs first: their horizons set the probe horizon.
  double maxT = 0.0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double s = sigmas[i];
    if (is_critical_exponent(cfg.p.n, s) || !(s * cfg.p.n > 4.0)) continue;
    ExperimentConfig c = cfg;
    c.p.sigma = s;
    c.scenario = Scenario::Blowup;
    double T = 0.0;
    const ExperimentResult r = run_blowup(c, dir / sigma_dir(s), &T);
    maxT = std::max(maxT, T);
    lines[i] = r.summary;
    codes[i] = r.exit_code;
    verdicts[i] = r.exit_code == 0 ? "blow-up" : "blow-up-unconfirmed";
  }
  const double horizon = std::max(10.0 * maxT, cfg.probe_horizon);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double s = sigmas[i];
    const fs::path sub = dir / sigma_dir(s);
    if (is_critical_exponent(cfg.p.n, s)) {
      lines[i] = summary_line("sweep", s, cfg.p.n, "inconclusive", std::nullopt);
      verdicts[i] = "inconclusive";
      write_text_file(sub / "summary.txt", lines[i] + "\n");
      continue;
    }
    if (s * cfg.p.n > 4.0) continue;
    ExperimentConfig c = cfg;
    c.p.sigma = s;
    c.mode = Mode::Simulate;
    const ExperimentResult r = run_probe(c, sub, horizon);
    lines[i] = r.summary;
    codes[i] = r.exit_code;
    verdicts[i] = r.exit_code == 0 ? "bounded" : "unbounded";
  }

  CsvWriter csv({"sigma", "n", "verdict", "exit"});
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    csv.row(std::vector<std::string>{fmt_num(sigmas[i]), std::to_string(cfg.p.n), verdicts[i],
                                     std::to_string(codes[i])});
    total.exit_code = std::max(total.exit_code, codes[i]);
    total.summary += (i ? "\n" : "") + lines[i];
  }
  csv.save(dir / "sweep.csv");
  write_text_file(dir / "summary.txt", total.summary + "\n");
  return total;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_text_file(dir / "experiment.cfg", serialize_experiment(cfg));
  switch (cfg.scenario) {
    case Scenario::CertifyOnly: return run_certify_only(cfg, dir);
    case Scenario::Blowup: return run_blowup(cfg, dir);
    case Scenario::SubcriticalProbe: return run_probe(cfg, dir, cfg.t_end.value_or(cfg.probe_horizon));
    case Scenario::Sweep: return run_sweep(cfg, dir);
  }
  return {};
}

void emit_plot_script(const fs::path& dir) {
  static const char* script = R"PY(#!/usr/bin/env python3
"""Plots for one run directory: sup u over time, U against the subsolution,
and the sampled residuals. Missing CSVs are skipped."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(name):
    path = os.path.join(here, name)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return rows


def col(rows, key):
    out = []
    for r in rows:
        try:
            out.append(float(r[key]))
        except ValueError:
            out.append(float("nan"))
    return out


run = load("run.csv")
if run:
    fig, ax = plt.subplots()
    ax.semilogy(col(run, "t"), col(run, "sup_u"), label="sup u")
    ax.semilogy(col(run, "t"), col(run, "sup_w"), label="sup w")
    ax.set_xlabel("t")
    ax.legend()
    fig.savefig(os.path.join(here, "sup_u.png"), dpi=120)

ov = load("overlay.csv")
if ov:
    fig, ax = plt.subplots()
    for t in sorted(set(col(ov, "t"))):
        rows = [r for r in ov if float(r["t"]) == t]
        ax.loglog(col(rows, "s"), col(rows, "U"), label="U t=%g" % t)
        ax.loglog(col(rows, "s"), col(rows, "uU"), "--", label="uU t=%g" % t)
    ax.set_xlabel("s")
    ax.legend()
    fig.savefig(os.path.join(here, "overlay.png"), dpi=120)

res = load("residuals.csv")
if res:
    fig, ax = plt.subplots()
    s = col(res, "s")
    t = col(res, "t")
    p = col(res, "p_value")
    pts = [(a, b, c) for a, b, c in zip(s, t, p) if c == c and a > 0]
    if pts:
        sc = ax.scatter([x[0] for x in pts], [x[1] for x in pts],
                        c=[1 if x[2] > 0 else -1 for x in pts], s=4, cmap="coolwarm")
        ax.set_xscale("log")
        fig.colorbar(sc, label="sign of P")
    ax.set_xlabel("s")
    ax.set_ylabel("t")
    fig.savefig(os.path.join(here, "residuals.png"), dpi=120)

sys.exit(0)
)PY";
  write_text_file(dir / "plot.py", script);
}

}  // namespace chemo
