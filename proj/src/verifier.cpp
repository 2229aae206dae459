#include "chemo/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemo/error.hpp"
#include "chemo/io.hpp"

namespace chemo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Point {
  double s;
  Side side;
};

// Samples of (lo, hi) clustering at both ends: offsets (hi-lo)*eps with eps
// from 1/2 down to 1e-12, mirrored.
void two_sided(double lo, double hi, std::size_t m, std::vector<Point>& out) {
  if (!(hi > lo)) return;
  const std::size_t half = std::max<std::size_t>(m / 2, 2);
  const double w = hi - lo;
  for (std::size_t j = 0; j < half; ++j) {
    const double eps = 0.5 * std::pow(2e-12, static_cast<double>(j) / static_cast<double>(half - 1));
    const double a = lo + w * eps;
    const double b = hi - w * eps;
    if (a > lo && a < hi) out.push_back({a, Side::Interior});
    if (b > lo && b < hi && b != a) out.push_back({b, Side::Interior});
  }
}

std::vector<double> time_lattice(double T, std::size_t Nt) {
  std::vector<double> ts;
  const std::size_t half = Nt / 2;
  ts.push_back(1e-9 * T);
  for (std::size_t j = 0; j < half; ++j) ts.push_back(T * static_cast<double>(j + 1) / static_cast<double>(half + 1));
  for (std::size_t j = 0; j < Nt - half; ++j) {
    const double e = 1.0 + 11.0 * static_cast<double>(j) / static_cast<double>(std::max<std::size_t>(Nt - half - 1, 1));
    ts.push_back(T * (1.0 - std::pow(10.0, -e)));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  while (!ts.empty() && !(ts.back() < T)) ts.pop_back();
  return ts;
}

double normalized(const Residual& r) {
  if (r.scale > 0.0) return r.value / r.scale;
  return r.value > 0.0 ? kInf : 0.0;
}

}  // namespace

std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Inner: return "inner";
    case RegionKind::IntermediateP: return "intermediate-P";
    case RegionKind::IntermediateQ: return "intermediate-Q";
    case RegionKind::OuterP: return "outer-P";
    case RegionKind::OuterQ: return "outer-Q";
  }
  return "inner";
}

Certificate certify_subsolution(const SubsolutionSpec& sp, const Lattice& lat, std::vector<OperatorResidual>* rows) {
  if (lat.Ns < kMinNs || lat.Nt < kMinNt) {
    throw Error(Errc::LatticeTooCoarse, "need Ns >= " + std::to_string(kMinNs) + " and Nt >= " + std::to_string(kMinNt));
  }
  Certificate cert;
  cert.spec = sp;
  cert.lattice = lat;
  cert.checks = verify_spec(sp);

  const double Rn = std::pow(sp.R, sp.n);
  const RegionKind kinds[5] = {RegionKind::Inner, RegionKind::IntermediateP, RegionKind::IntermediateQ,
                               RegionKind::OuterP, RegionKind::OuterQ};
  for (RegionKind k : kinds) {
    RegionReport r;
    r.kind = k;
    r.checks_p = k == RegionKind::Inner || k == RegionKind::IntermediateP || k == RegionKind::OuterP;
    r.checks_q = k == RegionKind::Inner || k == RegionKind::IntermediateQ || k == RegionKind::OuterQ;
    r.max_p = r.checks_p ? -kInf : kNaN;
    r.max_q = r.checks_q ? -kInf : kNaN;
    r.raw_p = r.checks_p ? 0.0 : kNaN;
    r.raw_q = r.checks_q ? 0.0 : kNaN;
    cert.regions.push_back(r);
  }

  // With s0 <= s*, s** the three s-ranges tile (0, R^n) minus the kink.
  cert.coverage_ok = sp.s0 <= sp.s_star && sp.s0 <= sp.s_2star && sp.s0 > 0.0;

  std::vector<double> worst(cert.regions.size(), -kInf);
  auto note_worst = [&](RegionReport& r, double v, double s, double t) {
    double& w = worst[static_cast<std::size_t>(&r - cert.regions.data())];
    if (v > w) {
      w = v;
      r.s_worst = s;
      r.t_worst = t;
    }
  };

  const auto times = time_lattice(sp.T, lat.Nt);
  const std::size_t t_stride = std::max<std::size_t>(1, times.size() / 16);
  std::vector<Point> pts;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const double kink = 1.0 / y_of_t(sp, t);
    for (auto& region : cert.regions) {
      pts.clear();
      switch (region.kind) {
        case RegionKind::Inner:
          two_sided(0.0, std::min(kink, Rn), lat.Ns, pts);
          if (kink < Rn) pts.push_back({kink, Side::Left});
          break;
        case RegionKind::IntermediateP:
        case RegionKind::IntermediateQ: {
          const double cap = region.kind == RegionKind::IntermediateP ? sp.s_star : sp.s_2star;
          const double hi = std::min(cap, Rn);
          two_sided(kink, hi, lat.Ns, pts);
          if (kink < hi) pts.push_back({kink, Side::Right});
          break;
        }
        case RegionKind::OuterP:
        case RegionKind::OuterQ: {
          const double lo = std::max(sp.s0, kink);
          two_sided(lo, Rn, lat.Ns, pts);
          if (lo < Rn) pts.push_back({lo, lo == kink ? Side::Right : Side::Interior});
          break;
        }
      }
      const std::size_t s_stride = std::max<std::size_t>(1, pts.size() / 32);
      for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        const Point& pt = pts[pi];
        const SubEval e = eval_sub(sp, pt.s, t, pt.side);
        double pv = kNaN, qv = kNaN;
        if (region.checks_p) {
          const Residual res = p_residual(e.U.sample, e.W.sample, sp.mu_hi, sp.n, pt.s);
          const double v = normalized(res);
          pv = res.value;
          if (v > region.max_p) {
            region.max_p = v;
            region.raw_p = res.value;
          }
          note_worst(region, v, pt.s, t);
        }
        if (region.checks_q) {
          const Residual res = q_residual(e.U.sample, e.W.sample, sp.K_big, sp.sigma, sp.n, pt.s);
          const double v = normalized(res);
          qv = res.value;
          if (v > region.max_q) {
            region.max_q = v;
            region.raw_q = res.value;
          }
          note_worst(region, v, pt.s, t);
        }
        ++region.samples;
        if (rows && ti % t_stride == 0 && (pi % s_stride == 0 || pt.side != Side::Interior)) {
          rows->push_back({pt.s, t, pv, qv, pt.side});
        }
      }
    }
  }

  cert.pass = cert.coverage_ok;
  for (auto& r : cert.regions) {
    if (r.checks_p && r.samples > 0 && !(r.max_p <= cert.tol)) r.pass = false;
    if (r.checks_q && r.samples > 0 && !(r.max_q <= cert.tol)) r.pass = false;
    if (r.samples == 0) {
      // Region empty on every sampled time (e.g. s* above R^n is impossible); report as vacuous.
      if (r.checks_p) r.max_p = kNaN;
      if (r.checks_q) r.max_q = kNaN;
    }
    cert.pass = cert.pass && r.pass;
  }
  for (const auto& c : cert.checks) cert.pass = cert.pass && c.holds;

  const auto& f = sp.theta_2star_forms;
  cert.notes.push_back(
      "theta_2star: the stated bound uses s0^(-n/2) without a factor a, while the closing estimate of the same step "
      "carries a * s0^(-2/n); all four readings are enforced. values: " +
      fmt_num(f[0]) + " (s0^(-n/2)), " + fmt_num(f[1]) + " (s0^(-2/n)), " + fmt_num(f[2]) + " (a s0^(-n/2)), " +
      fmt_num(f[3]) + " (a s0^(-2/n))");
  cert.notes.push_back(
      "time windows: inner, intermediate and outer-P regions are stated on (0,T) intersected with (0,1/theta); outer-Q "
      "on (0,T). theta*T = " +
      fmt_num(sp.theta * sp.T) + " < 1, so every region is sampled on (0,T)");
  return cert;
}

std::string certificate_text(const Certificate& c) {
  std::string out;
  out += "# subsolution certificate\n";
  out += "pass = " + std::string(c.pass ? "true" : "false") + "\n";
  out += "tolerance = " + fmt_num(c.tol) + " (residual / largest term)\n";
  out += "lattice_Ns = " + std::to_string(c.lattice.Ns) + "\n";
  out += "lattice_Nt = " + std::to_string(c.lattice.Nt) + "\n";
  out += "coverage = " + std::string(c.coverage_ok ? "ok" : "gap") + "\n";
  out += "\n[regions]\n";
  for (const auto& r : c.regions) {
    out += to_string(r.kind) + ": samples=" + std::to_string(r.samples) + " max_p=" + fmt_num(r.max_p) +
           " max_q=" + fmt_num(r.max_q) + " raw_p=" + fmt_num(r.raw_p) + " raw_q=" + fmt_num(r.raw_q) +
           " s_worst=" + fmt_num(r.s_worst) + " t_worst=" + fmt_num(r.t_worst) + " pass=" + (r.pass ? "true" : "false") +
           "\n";
  }
  out += "\n[inequalities]\n";
  for (const auto& ck : c.checks) {
    out += (ck.holds ? "ok   " : "FAIL ") + ck.label + " : " + fmt_num(ck.lhs) + " " + ck.relation + " " +
           fmt_num(ck.rhs) + "\n";
  }
  out += "\n[notes]\n";
  for (const auto& n : c.notes) out += "- " + n + "\n";
  out += "\n[spec]\n" + serialize_spec(c.spec);
  return out;
}

std::string certificate_csv(const Certificate& c) {
  CsvWriter csv({"region", "max_p", "max_q", "s_worst", "t_worst"});
  for (const auto& r : c.regions) {
    csv.row(std::vector<std::string>{to_string(r.kind), fmt_num(r.max_p), fmt_num(r.max_q), fmt_num(r.s_worst),
                                     fmt_num(r.t_worst)});
  }
  return csv.text();
}

double envelope(const SubsolutionSpec& sp, double t) {
  return std::exp(-sp.theta * t) * sp.a * std::pow(y_of_t(sp, t), 1.0 - sp.ex.alpha);
}

OrderingMonitor::OrderingMonitor(const SubsolutionSpec& spec, double sup_w0, double tol_rel)
    : spec_(spec), sup_w0_(sup_w0) {
  rep_.tol_rel = tol_rel;
  rep_.min_margin = kInf;
  rep_.min_margin_rel = kInf;
  rep_.w_min_margin_rel = kInf;
}

void OrderingMonitor::observe(const SimSnapshot& snap) {
  const MassState& ms = snap.ms;
  const double t = ms.t;
  ++rep_.snapshots;
  const bool first = first_;
  first_ = false;
  if (!(t < spec_.T)) {
    if (open_) {
      open_ = false;
      rep_.window_closed_at = t;
      rep_.window_close_reason = "t >= T";
    }
    return;
  }

  const std::size_t N = ms.size();
  const double maxU = *std::max_element(ms.U.begin(), ms.U.end());
  const double maxW = *std::max_element(ms.W.begin(), ms.W.end());
  const double tol = rep_.tol_rel * maxU;
  double margin = kInf, s_at = 0.0, wmargin = kInf;
  double uU_end = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const SubEval e = eval_sub(spec_, ms.s[i], t, Side::Left);
    const double m = ms.U[i] - e.U.sample.value;
    if (m < margin) {
      margin = m;
      s_at = ms.s[i];
    }
    wmargin = std::min(wmargin, ms.W[i] - e.W.sample.value);
    if (i + 1 == N) uU_end = e.U.sample.value;
  }

  if (first) {
    rep_.initial_ok = margin >= -tol;
    // A broken initial ordering is a violation whether or not the window opens.
    if (!rep_.initial_ok) {
      rep_.first_violation_t = t;
      rep_.first_violation_s = s_at;
    }
  }
  auto record_after = [&] {
    ++rep_.after_window;
    rep_.after_min_margin_rel = std::min(rep_.after_min_margin_rel, margin / maxU);
    if (margin < -tol && !rep_.after_first_violation_t) rep_.after_first_violation_t = t;
  };
  if (!open_) {
    record_after();
    return;
  }

  std::string reason;
  if (snap.mu_w < spec_.mu_lo) reason = "mu_w below mu_lo";
  else if (snap.mu_w > spec_.mu_hi) reason = "mu_w above mu_hi";
  else if (snap.sup_w > 2.0 * sup_w0_) reason = "sup w above twice its initial value";
  if (!reason.empty()) {
    open_ = false;
    rep_.window_closed_at = t;
    rep_.window_close_reason = reason;
    record_after();
    return;
  }

  ++rep_.in_window;
  const double Rn = ms.s.back();
  const double edge = spec_.mu_lo * Rn / spec_.n;
  if (!(ms.U.front() >= 0.0 && uU_end <= edge && ms.U.back() >= edge * (1.0 - 1e-12))) rep_.boundary_ok = false;

  if (margin < rep_.min_margin) {
    rep_.min_margin = margin;
    rep_.t_min_margin = t;
    rep_.s_min_margin = s_at;
  }
  rep_.min_margin_rel = std::min(rep_.min_margin_rel, margin / maxU);
  rep_.w_min_margin_rel = std::min(rep_.w_min_margin_rel, wmargin / maxW);
  if (margin < -tol && !rep_.first_violation_t) {
    rep_.first_violation_t = t;
    rep_.first_violation_s = s_at;
  }
}

OrderingReport OrderingMonitor::report() const {
  if (rep_.in_window == 0) {
    throw Error(Errc::HypothesisWindowEmpty, "no recorded time satisfied the mu_w and sup w hypotheses");
  }
  OrderingReport out = rep_;
  out.pass = out.initial_ok && out.boundary_ok && !out.first_violation_t;
  return out;
}

OrderingReport compare_orderings(const std::vector<SimSnapshot>& sim, const SubsolutionSpec& spec, double sup_w0) {
  OrderingMonitor mon(spec, sup_w0);
  for (const auto& s : sim) mon.observe(s);
  return mon.report();
}

BlowupVerdict detect_blowup(const RunReport& rep, const SubsolutionSpec& spec, double window_end) {
  BlowupVerdict v;
  v.t_trigger = rep.blowup_time_estimate;
  v.blew_up_before = rep.blowup_flag && rep.blowup_time_estimate && *rep.blowup_time_estimate < spec.T;
  v.envelope_worst = kInf;
  bool ok = true;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double t = rep.times[i];
    if (!(t < spec.T) || t > window_end) break;
    const double env = envelope(spec, t);
    const double uc = rep.u_center_history[i];
    const double scale = std::max(uc, env);
    const double rel = (uc - env) / scale;
    v.envelope_worst = std::min(v.envelope_worst, rel);
    if (uc < env - 1e-4 * scale) ok = false;
    ++v.envelope_points;
  }
  v.lower_envelope_check = ok && v.envelope_points > 0;
  return v;
}

ProbeReport boundedness_probe(const ModelParams& p_in, std::size_t M, double mass, ProbeData data,
                              const RunControls& controls, double c_adv) {
  const ModelParams p = validate_params(p_in, Mode::Simulate);
  const RadialGrid g = build_grid(p, M);
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.r[i] / (0.25 * p.R);
    u[i] = data == ProbeData::Bump ? std::exp(-x * x) + 0.05 : 1.0;
  }
  const double scale = mass / integrate(g, u);
  for (auto& x : u) x *= scale;

  return boundedness_probe(p, g, u, u, controls, c_adv);
}

ProbeReport boundedness_probe(const ModelParams& p_in, const RadialGrid& g, const std::vector<double>& u0,
                              const std::vector<double>& w0, const RunControls& controls, double c_adv) {
  const ModelParams p = validate_params(p_in, Mode::Simulate);
  RadialSolver solver(g, p, c_adv);
  ProbeReport out;
  out.horizon = controls.t_end;
  out.run = solver.run(make_state(g, u0, w0), controls);
  out.sup_initial = out.run.sup_u_history.front();
  out.sup_max = *std::max_element(out.run.sup_u_history.begin(), out.run.sup_u_history.end());
  out.bounded = !out.run.blowup_flag && !out.run.step_limit_hit && out.sup_max < 10.0 * out.sup_initial &&
                out.run.final_time >= controls.t_end;
  return out;
}

}  // namespace chemo
