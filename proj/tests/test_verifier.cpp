#include <doctest.h>

#include <cmath>
#include <cstring>

#include "chemo/error.hpp"
#include "chemo/verifier.hpp"

using namespace chemo;

namespace {

ModelParams blowup_params(int n, double sigma, double M_lo) {
  ModelParams p;
  p.n = n;
  p.R = 1.0;
  p.k = 1.0;
  p.sigma = sigma;
  p.M_lo = M_lo;
  p.M_hi = 1.5 * M_lo;
  return validate_params(p, Mode::Blowup);
}

SubsolutionSpec make_spec(int n, double sigma, double M_lo) {
  const ModelParams p = blowup_params(n, sigma, M_lo);
  return select_parameters(p, derived_constants(p), select_exponents(n, sigma), 1.0);
}

const RegionReport& region(const Certificate& c, RegionKind k) {
  for (const auto& r : c.regions)
    if (r.kind == k) return r;
  FAIL("region missing");
  return c.regions.front();
}

// Mass snapshot of a state built from the generated data, scaled by `factor`.
SimSnapshot snapshot(const RadialGrid& g, const InitialData& d, double factor, double t) {
  std::vector<double> u = d.u0, w = d.w0;
  for (auto& x : u) x *= factor;
  for (auto& x : w) x *= factor;
  const RadialState st = make_state(g, u, w, t);
  SimSnapshot s;
  s.ms = cumulate(st, g);
  s.mu_w = st.mu_w;
  s.sup_w = *std::max_element(w.begin(), w.end());
  s.u_center = u.front();
  return s;
}

}  // namespace

TEST_CASE("certificate for a selected spec passes in every region") {
  const SubsolutionSpec sp = make_spec(3, 2.0, 1e4);
  const Certificate c = certify_subsolution(sp, Lattice{});
  CHECK(c.pass);
  CHECK(c.coverage_ok);
  REQUIRE(c.regions.size() == 5);
  for (const auto& r : c.regions) {
    INFO(to_string(r.kind));
    CHECK(r.pass);
    CHECK(r.samples > 0);
    if (r.checks_p) CHECK(r.max_p <= kCertTol);
    if (r.checks_q) CHECK(r.max_q <= kCertTol);
    if (!r.checks_p) CHECK(std::isnan(r.max_p));
    if (!r.checks_q) CHECK(std::isnan(r.max_q));
  }
}

TEST_CASE("theta below theta* breaks the outer P estimate") {
  SubsolutionSpec sp = make_spec(3, 2.0, 1e4);
  sp.theta = 1.0;
  const Certificate c = certify_subsolution(sp, Lattice{});
  CHECK_FALSE(c.pass);
  CHECK(region(c, RegionKind::OuterP).max_p > 0.0);
  CHECK_FALSE(region(c, RegionKind::OuterP).pass);
}

TEST_CASE("inadmissible exponents never reach certification") {
  const ModelParams p = blowup_params(3, 2.0, 1e4);
  try {
    select_parameters(p, derived_constants(p), Exponents{1.0 / 6.0, 0.4}, 1.0);
    FAIL("expected SelectionInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SelectionInfeasible);
  }
}

TEST_CASE("lattice minimums") {
  const SubsolutionSpec sp = make_spec(3, 2.0, 1e4);
  try {
    certify_subsolution(sp, Lattice{64, 256});
    FAIL("expected LatticeTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LatticeTooCoarse);
  }
  CHECK_THROWS_AS(certify_subsolution(sp, Lattice{512, 16}), Error);
}

TEST_CASE("certificates are deterministic") {
  const SubsolutionSpec sp = make_spec(4, 2.0, 1e4);
  std::vector<OperatorResidual> r1, r2;
  const Certificate a = certify_subsolution(sp, Lattice{}, &r1);
  const Certificate b = certify_subsolution(sp, Lattice{}, &r2);
  CHECK(certificate_text(a) == certificate_text(b));
  CHECK(certificate_csv(a) == certificate_csv(b));
  REQUIRE(r1.size() == r2.size());
  CHECK(!r1.empty());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(std::memcmp(&r1[i].p_value, &r2[i].p_value, sizeof(double)) == 0);
    CHECK(std::memcmp(&r1[i].q_value, &r2[i].q_value, sizeof(double)) == 0);
  }
}

TEST_CASE("certificate csv schema") {
  const Certificate c = certify_subsolution(make_spec(3, 2.0, 1e4), Lattice{});
  const std::string csv = certificate_csv(c);
  CHECK(csv.rfind("region,max_p,max_q,s_worst,t_worst\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("property: envelope increases after t_mono") {
  for (int n : {3, 4}) {
    for (double sigma : {1.5, 2.0, 3.0}) {
      if (!(sigma > 4.0 / n)) continue;
      const SubsolutionSpec sp = make_spec(n, sigma, 1e4);
      // d/dt log env = -theta + (1-alpha) gamma y^delta, y^delta = y0^delta / (1 - t/T)
      const double t_mono =
          std::max(0.0, sp.T * (1.0 - (1.0 - sp.ex.alpha) * sp.gamma * std::pow(sp.y0, sp.delta) / sp.theta));
      double prev = envelope(sp, t_mono);
      for (int k = 1; k <= 60; ++k) {
        const double t = t_mono + (sp.T - t_mono) * (1.0 - std::pow(0.7, k));
        if (!(t < sp.T)) break;
        const double e = envelope(sp, t);
        CHECK(e > prev);
        prev = e;
      }
      CHECK(envelope(sp, 0.0) == doctest::Approx(sp.a * std::pow(sp.y0, 1.0 - sp.ex.alpha)).epsilon(1e-14));
    }
  }
}

TEST_CASE("ordering: generated data satisfy it, halved data violate it at t = 0") {
  const ModelParams p = blowup_params(3, 2.0, 1e4);
  const SubsolutionSpec sp = select_parameters(p, derived_constants(p), select_exponents(3, 2.0), 1.0);
  const RadialGrid g = build_graded_grid(p, 256, std::pow(sp.y0, -1.0 / 3.0) / 16.0);
  const InitialData d = initial_data(sp, p, g);

  OrderingMonitor ok(sp, d.w_sup);
  ok.observe(snapshot(g, d, 1.0, 0.0));
  const OrderingReport r1 = ok.report();
  CHECK(r1.initial_ok);
  CHECK(r1.boundary_ok);
  CHECK(r1.pass);
  CHECK_FALSE(r1.first_violation_t.has_value());
  CHECK(r1.min_margin_rel >= -1e-12);

  // The generator scales by c > 1, so scale by 0.5 / c to get U = 0.5 hat U
  // at t = 0, which breaks the initial ordering everywhere s > 0.
  OrderingMonitor bad(sp, d.w_sup);
  bad.observe(snapshot(g, d, 0.5 / d.c, 0.0));
  CHECK_THROWS_AS(bad.report(), Error);  // mu_w drops out of band as well
  OrderingMonitor bad2(sp, d.w_sup);
  SimSnapshot s = snapshot(g, d, 0.5 / d.c, 0.0);
  s.mu_w = 0.5 * (sp.mu_lo + sp.mu_hi);  // keep the window open to reach report()
  bad2.observe(s);
  const OrderingReport r2 = bad2.report();
  CHECK_FALSE(r2.initial_ok);
  REQUIRE(r2.first_violation_t.has_value());
  CHECK(*r2.first_violation_t == 0.0);
  CHECK_FALSE(r2.pass);
}

TEST_CASE("ordering: no snapshot in the window") {
  const ModelParams p = blowup_params(3, 2.0, 1e4);
  const SubsolutionSpec sp = select_parameters(p, derived_constants(p), select_exponents(3, 2.0), 1.0);
  const RadialGrid g = build_graded_grid(p, 128, 1e-8);
  const InitialData d = initial_data(sp, p, g);
  OrderingMonitor mon(sp, d.w_sup);
  SimSnapshot s = snapshot(g, d, 1.0, 0.0);
  s.mu_w = 10.0 * sp.mu_hi;
  mon.observe(s);
  try {
    mon.report();
    FAIL("expected HypothesisWindowEmpty");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::HypothesisWindowEmpty);
  }
}

TEST_CASE("verdict on a synthetic report") {
  const SubsolutionSpec sp = make_spec(3, 2.0, 1e4);
  RunReport rep;
  for (int k = 0; k < 5; ++k) {
    const double t = sp.T * k / 10.0;
    rep.times.push_back(t);
    rep.u_center_history.push_back(3.0 * envelope(sp, t));
  }
  rep.blowup_flag = true;
  rep.blowup_time_estimate = 0.45 * sp.T;
  BlowupVerdict v = detect_blowup(rep, sp, sp.T);
  CHECK(v.blew_up_before);
  CHECK(v.lower_envelope_check);
  CHECK(v.envelope_points == 5);
  // a dip below the envelope is caught, unless it lies past the window
  rep.u_center_history[3] = 0.5 * envelope(sp, rep.times[3]);
  CHECK_FALSE(detect_blowup(rep, sp, sp.T).lower_envelope_check);
  CHECK(detect_blowup(rep, sp, rep.times[2]).lower_envelope_check);
  rep.blowup_time_estimate = 2.0 * sp.T;
  CHECK_FALSE(detect_blowup(rep, sp, sp.T).blew_up_before);
  rep.blowup_flag = false;
  rep.blowup_time_estimate.reset();
  CHECK_FALSE(detect_blowup(rep, sp, sp.T).blew_up_before);
}

TEST_CASE("envelope at t = 0 holds for generated data") {
  const ModelParams p = blowup_params(4, 2.0, 1e4);
  const SubsolutionSpec sp = select_parameters(p, derived_constants(p), select_exponents(4, 2.0), 1.0);
  const RadialGrid g = build_graded_grid(p, 256, std::pow(sp.y0, -0.25) / 16.0);
  const InitialData d = initial_data(sp, p, g);
  CHECK(d.u0.front() >= envelope(sp, 0.0));
  CHECK(d.u0.front() == doctest::Approx(d.c * 4.0 * envelope(sp, 0.0)).epsilon(1e-10));
}

TEST_CASE("boundedness probes below the critical exponent") {
  RunControls c;
  c.t_end = 1.0;
  c.dt_init = 1e-3;
  ModelParams p;
  p.n = 3;
  p.sigma = 1.0;
  const ProbeReport b3 = boundedness_probe(p, 256, 10.0, ProbeData::Bump, c);
  CHECK(b3.bounded);
  CHECK(b3.sup_max < 10.0 * b3.sup_initial);
  CHECK(b3.run.final_time == 1.0);

  const ProbeReport flat = boundedness_probe(p, 64, 10.0, ProbeData::Constant, c);
  CHECK(flat.bounded);
  for (double x : flat.run.final_state.u) CHECK(x == doctest::Approx(flat.run.final_state.u.front()).epsilon(1e-12));
  CHECK(flat.sup_max == doctest::Approx(flat.sup_initial).epsilon(1e-12));

  p.n = 4;
  p.sigma = 0.9;
  const ProbeReport b4 = boundedness_probe(p, 256, 10.0, ProbeData::Bump, c);
  CHECK(b4.bounded);
}
