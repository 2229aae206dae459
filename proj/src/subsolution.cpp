#include "chemo/subsolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chemo/error.hpp"
#include "chemo/io.hpp"

namespace chemo {
namespace {

constexpr double kE = std::numbers::e;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shrinks x geometrically until ok(x) holds in floating point.
template <class Pred>
double shrink_until(double x, Pred ok) {
  for (int i = 0; i < 10000 && !ok(x); ++i) x *= 1.0 - 1e-12 * (1 << std::min(i, 30));
  return x;
}

InequalityCheck check(std::string label, double lhs, const char* rel, double rhs) {
  InequalityCheck c{std::move(label), lhs, rhs, rel, false};
  const std::string r = rel;
  if (r == "<") c.holds = lhs < rhs;
  else if (r == "<=") c.holds = lhs <= rhs;
  else if (r == ">") c.holds = lhs > rhs;
  else c.holds = lhs >= rhs;
  return c;
}

double y_star_floor(const SubsolutionSpec& sp) {
  return std::pow(2.0 * kE * sp.mu_hi / (sp.n * sp.a), 1.0 / (1.0 - sp.ex.beta));
}

double cap_drift(const SubsolutionSpec& sp) {
  return std::pow(sp.n * sp.a / (2.0 * kE * sp.mu_hi), 1.0 / (1.0 - sp.ex.beta));
}

double lhs_diffusion(const SubsolutionSpec& sp, double s) {
  const double al = sp.ex.alpha;
  return 2.0 * sp.n * (1.0 - al) * kE / (sp.a * al) * std::pow(s, 1.0 - 2.0 / sp.n - sp.ex.beta);
}

double lhs_motion(const SubsolutionSpec& sp, double s) {
  return 2.0 * (1.0 - sp.ex.alpha) * kE / (sp.n * sp.a) * std::pow(s, 1.0 - sp.ex.beta - sp.delta_2star);
}

double production_exponent(const SubsolutionSpec& sp) {
  const double al = sp.ex.alpha, be = sp.ex.beta;
  return be - 2.0 / sp.n - 1.0 + sp.sigma - al * sp.sigma;
}

double lhs_production(const SubsolutionSpec& sp, double s) {
  const double n2 = static_cast<double>(sp.n * sp.n);
  return sp.a * (1.0 + n2 / sp.ex.beta) * std::pow(s, production_exponent(sp));
}

double rhs_production(const SubsolutionSpec& sp) {
  return sp.K_big * std::pow(sp.a, sp.sigma) * std::exp(-(sp.sigma - 1.0));
}

double theta_star_bound(const SubsolutionSpec& sp) {
  const double Rn = std::pow(sp.R, sp.n);
  const double al = sp.ex.alpha;
  return (1.0 + sp.mu_hi * Rn) / std::pow(sp.s0, 1.0 + al) +
         sp.n * sp.n * std::pow(sp.R, 2.0 * sp.n - 2.0) / (al * std::pow(sp.s0, 2.0 + al));
}

std::array<double, 4> theta_2star_candidates(const SubsolutionSpec& sp) {
  const double be = sp.ex.beta;
  const double base = 2.0 * (1.0 - be) * (1.0 + sp.n * sp.n / be);
  const double e1 = std::pow(sp.s0, -0.5 * sp.n);
  const double e2 = std::pow(sp.s0, -2.0 / sp.n);
  return {base * e1, base * e2, base * sp.a * e1, base * sp.a * e2};
}

double horizon(const SubsolutionSpec& sp, double y0) { return 1.0 / (sp.gamma * sp.delta * std::pow(y0, sp.delta)); }

}  // namespace

double beta_lower_bound(int n, double sigma, double alpha) { return 1.0 + 2.0 / n - sigma + alpha * sigma; }

Exponents select_exponents(int n, double sigma) {
  if (n != 3 && n != 4) throw Error(Errc::DimensionOutOfRange, "exponent selection needs n in {3,4}");
  if (!(sigma * n > 4.0)) throw Error(Errc::SubcriticalExponent, "sigma must exceed 4/n");
  const double g = sigma - 4.0 / n;
  Exponents ex;
  ex.alpha = g / (2.0 * sigma);
  const double lo = std::max(0.0, beta_lower_bound(n, sigma, ex.alpha));
  ex.beta = 0.5 * (lo + (1.0 - 2.0 / n));
  return ex;
}

bool exponents_admissible(int n, double sigma, const Exponents& ex) {
  return ex.alpha > 0.0 && ex.alpha < 1.0 && ex.beta > 0.0 && ex.beta < 1.0 &&
         beta_lower_bound(n, sigma, ex.alpha) < ex.beta && ex.beta < 1.0 - 2.0 / n;
}

std::vector<InequalityCheck> verify_spec(const SubsolutionSpec& sp) {
  const double al = sp.ex.alpha, be = sp.ex.beta;
  const double Rn = std::pow(sp.R, sp.n);
  std::vector<InequalityCheck> out;
  out.push_back(check("beta > 1 + 2/n - sigma + alpha sigma", be, ">", beta_lower_bound(sp.n, sp.sigma, al)));
  out.push_back(check("beta < 1 - 2/n", be, "<", 1.0 - 2.0 / sp.n));
  out.push_back(check("alpha > 0", al, ">", 0.0));
  out.push_back(check("alpha < 1", al, "<", 1.0));
  out.push_back(check("beta + (1-alpha) sigma > 1 + 2/n", be + (1.0 - al) * sp.sigma, ">", 1.0 + 2.0 / sp.n));

  out.push_back(check("y_star >= 1", sp.y_star, ">=", 1.0));
  out.push_back(check("y_star >= (2e mu_hi/(n a))^(1/(1-beta))", sp.y_star, ">=", y_star_floor(sp)));
  out.push_back(check("y_star > 1/R^n", sp.y_star, ">", 1.0 / Rn));
  out.push_back(check("delta_2star > 0", sp.delta_2star, ">", 0.0));
  out.push_back(check("delta_2star < 1 - beta", sp.delta_2star, "<", 1.0 - be));

  out.push_back(check("s_star <= 1", sp.s_star, "<=", 1.0));
  out.push_back(check("s_star > 0", sp.s_star, ">", 0.0));
  out.push_back(check("s_star <= (n a/(2e mu_hi))^(1/(1-beta))", sp.s_star, "<=", cap_drift(sp)));
  out.push_back(check("2n(1-alpha)e/(a alpha) s_star^(1-2/n-beta) <= 1/2", lhs_diffusion(sp, sp.s_star), "<=", 0.5));
  out.push_back(check("2(1-alpha)e/(n a) s_star^(1-beta-delta_2star) <= 1/2", lhs_motion(sp, sp.s_star), "<=", 0.5));
  out.push_back(check("s_2star <= 1", sp.s_2star, "<=", 1.0));
  out.push_back(check("s_2star > 0", sp.s_2star, ">", 0.0));
  out.push_back(check("a(1+n^2/beta) s_2star^(beta-2/n-1+sigma-alpha sigma) <= K a^sigma e^-(sigma-1)",
                      lhs_production(sp, sp.s_2star), "<=", rhs_production(sp)));
  out.push_back(check("s0 <= s_star", sp.s0, "<=", sp.s_star));
  out.push_back(check("s0 <= s_2star", sp.s0, "<=", sp.s_2star));

  out.push_back(check("theta_star > (1+mu_hi R^n)/s0^(1+alpha) + n^2 R^(2n-2)/(alpha s0^(2+alpha))", sp.theta_star,
                      ">", theta_star_bound(sp)));
  out.push_back(check("theta_2star >= 2", sp.theta_2star, ">=", 2.0));
  const auto forms = theta_2star_candidates(sp);
  const char* names[4] = {"theta_2star >= 2(1-beta)(1+n^2/beta) s0^(-n/2)",
                          "theta_2star >= 2(1-beta)(1+n^2/beta) s0^(-2/n)",
                          "theta_2star >= 2(1-beta)(1+n^2/beta) a s0^(-n/2)",
                          "theta_2star >= 2(1-beta)(1+n^2/beta) a s0^(-2/n)"};
  for (int i = 0; i < 4; ++i) out.push_back(check(names[i], sp.theta_2star, ">=", forms[i]));

  out.push_back(check("delta <= delta_star", sp.delta, "<=", sp.delta_star));
  out.push_back(check("delta <= delta_2star", sp.delta, "<=", sp.delta_2star));
  out.push_back(check("delta <= 2/n", sp.delta, "<=", 2.0 / sp.n));
  out.push_back(check("delta > 0", sp.delta, ">", 0.0));
  out.push_back(check("theta >= theta_star", sp.theta, ">=", sp.theta_star));
  out.push_back(check("theta >= theta_2star", sp.theta, ">=", sp.theta_2star));
  out.push_back(check("theta >= 2", sp.theta, ">=", 2.0));
  out.push_back(check("gamma <= gamma_star", sp.gamma, "<=", sp.gamma_star));
  out.push_back(check("gamma <= L", sp.gamma, "<=", sp.L_big));
  out.push_back(check("gamma <= 1", sp.gamma, "<=", 1.0));
  out.push_back(check("gamma > 0", sp.gamma, ">", 0.0));

  out.push_back(check("y0 > 1", sp.y0, ">", 1.0));
  out.push_back(check("y0 > 1/R^n", sp.y0, ">", 1.0 / Rn));
  out.push_back(check("y0 >= y_star", sp.y0, ">=", sp.y_star));
  out.push_back(check("T == 1/(gamma delta y0^delta)", sp.T, "<=", horizon(sp, sp.y0)));
  out.push_back(check("T >= 1/(gamma delta y0^delta)", sp.T, ">=", horizon(sp, sp.y0)));
  out.push_back(check("T < 1/theta", sp.T, "<", 1.0 / sp.theta));
  out.push_back(check("T < T_star", sp.T, "<", sp.T_star));
  return out;
}

SubsolutionSpec select_parameters(const ModelParams& p, const DerivedConstants& dc, const Exponents& ex,
                                  double T_star) {
  if (!exponents_admissible(p.n, p.sigma, ex)) {
    throw Error(Errc::SelectionInfeasible, "exponents (alpha, beta) violate the admissible interval");
  }
  if (!(T_star > 0.0)) throw Error(Errc::NonpositiveParameter, "T_star must be positive");
  SubsolutionSpec sp;
  sp.n = p.n;
  sp.R = p.R;
  sp.sigma = p.sigma;
  sp.K_big = dc.K_big;
  sp.mu_lo = dc.mu_lo;
  sp.mu_hi = dc.mu_hi;
  sp.T_star = T_star;
  sp.ex = ex;
  sp.a = dc.a;
  sp.L_big = dc.L_big;

  const int n = p.n;
  const double al = ex.alpha, be = ex.beta;
  const double Rn = std::pow(p.R, n);

  sp.delta_star = 1.0 - be;
  sp.delta_2star = 0.5 * (1.0 - be);
  sp.gamma_star = n * sp.a / kE / (2.0 * (1.0 - al));
  sp.y_star = std::max({1.0, y_star_floor(sp), 1.0 / Rn + kStrictSlack});

  sp.s_star_caps[0] = cap_drift(sp);
  sp.s_star_caps[1] = std::pow(0.5 * sp.a * al / (2.0 * n * (1.0 - al) * kE), 1.0 / (1.0 - 2.0 / n - be));
  sp.s_star_caps[2] = std::pow(0.5 * n * sp.a / (2.0 * (1.0 - al) * kE), 1.0 / (1.0 - be - sp.delta_2star));
  sp.s_star = shrink_until(std::min({sp.s_star_caps[0], sp.s_star_caps[1], sp.s_star_caps[2], 1.0}), [&](double s) {
    return s <= cap_drift(sp) && lhs_diffusion(sp, s) <= 0.5 && lhs_motion(sp, s) <= 0.5;
  });

  const double ratio = rhs_production(sp) / (sp.a * (1.0 + n * n / be));
  sp.s_2star = shrink_until(std::min(1.0, std::pow(ratio, 1.0 / production_exponent(sp))),
                            [&](double s) { return lhs_production(sp, s) <= rhs_production(sp); });

  sp.s0 = std::min(sp.s_star, sp.s_2star);
  const double tb = theta_star_bound(sp);
  sp.theta_star = tb * (1.0 + 1e-9);
  sp.theta_2star_forms = theta_2star_candidates(sp);
  sp.theta_2star = std::max(2.0, *std::max_element(sp.theta_2star_forms.begin(), sp.theta_2star_forms.end()));

  sp.delta = std::min({sp.delta_star, sp.delta_2star, 2.0 / n});
  sp.theta = std::max({sp.theta_star, sp.theta_2star, 2.0});
  sp.gamma = std::min({sp.gamma_star, sp.L_big, 1.0});

  // Doubling search for y0, started from the predicted exponent.
  const double base = std::max({sp.y_star, 1.0, 1.0 / Rn}) + 1.0;
  const double target = std::min(1.0 / sp.theta, T_star);
  const double log2_needed = -std::log2(sp.gamma * sp.delta * target) / sp.delta - std::log2(base);
  int k = std::max(0, static_cast<int>(std::floor(log2_needed)) - 1);
  double y0 = std::ldexp(base, k);
  while (std::isfinite(y0) && !(horizon(sp, y0) < target)) y0 *= 2.0;
  if (!std::isfinite(y0) || !std::isfinite(horizon(sp, y0)) || horizon(sp, y0) <= 0.0) {
    throw Error(Errc::SelectionInfeasible, "initial kink scale y0 exceeds double range; raise M_lo or k");
  }
  sp.y0 = y0;
  sp.T = horizon(sp, y0);

  for (const auto& c : verify_spec(sp)) {
    if (!c.holds) {
      throw Error(Errc::SelectionInfeasible, "re-verification failed: " + c.label + " (lhs " + fmt_num(c.lhs) +
                                                 ", rhs " + fmt_num(c.rhs) + ")");
    }
  }
  return sp;
}

double y_of_t(const SubsolutionSpec& sp, double t) {
  if (!(t >= 0.0 && t < sp.T)) throw Error(Errc::HorizonExceeded, "t = " + fmt_num(t) + " outside [0, T)");
  return sp.y0 * std::pow(1.0 - t / sp.T, -1.0 / sp.delta);
}

double y_prime(const SubsolutionSpec& sp, double t) {
  const double y = y_of_t(sp, t);
  return sp.gamma * std::pow(y, 1.0 + sp.delta);
}

ProfileEval eval_hat(const SubsolutionSpec& sp, Profile which, double s, double t, Side side) {
  const double y = y_of_t(sp, t);
  const double yp = sp.gamma * std::pow(y, 1.0 + sp.delta);
  const double e = which == Profile::U ? sp.ex.alpha : sp.ex.beta;
  const double a = sp.a;
  ProfileEval out;
  out.kink = 1.0 / y;
  out.d_ss_left = 0.0;
  out.d_ss_right = -(1.0 - e) * a * std::pow(y, 2.0 - e) / e;

  if (s < out.kink || (s == out.kink && side == Side::Left)) {
    out.sample.value = a * std::pow(y, 1.0 - e) * s;
    out.sample.d_s = a * std::pow(y, 1.0 - e);
    out.sample.d_t = (1.0 - e) * a * std::pow(y, -e) * yp * s;
    out.sample.d_ss = 0.0;
  } else {
    const double z = s - (1.0 - e) / y;
    const double ze1 = std::pow(z, e - 1.0);
    out.sample.value = std::pow(e, -e) * a * std::pow(z, e);
    out.sample.d_s = std::pow(e, 1.0 - e) * a * ze1;
    out.sample.d_t = std::pow(e, 1.0 - e) * (1.0 - e) * a * ze1 * yp / (y * y);
    out.sample.d_ss = -std::pow(e, 1.0 - e) * (1.0 - e) * a * std::pow(z, e - 2.0);
  }
  if (s == out.kink) {
    out.side = side;
    if (side == Side::Interior) out.sample.d_ss = kNaN;
  }
  return out;
}

SubEval eval_sub(const SubsolutionSpec& sp, double s, double t, Side side) {
  const double damp = std::exp(-sp.theta * t);
  SubEval out{eval_hat(sp, Profile::U, s, t, side), eval_hat(sp, Profile::W, s, t, side)};
  for (ProfileEval* pe : {&out.U, &out.W}) {
    ProfileSample& x = pe->sample;
    x.d_t = damp * (x.d_t - sp.theta * x.value);
    x.value *= damp;
    x.d_s *= damp;
    x.d_ss *= damp;
    pe->d_ss_left *= damp;
    pe->d_ss_right *= damp;
  }
  return out;
}

InitialData initial_data(const SubsolutionSpec& sp, const ModelParams& p, const RadialGrid& g) {
  const std::size_t N = g.size();
  const int n = g.n;
  const double Rn = std::pow(p.R, n);
  auto hatU = [&](double s) { return eval_hat(sp, Profile::U, s, 0.0, Side::Left).sample.value; };
  auto hatW = [&](double s) { return eval_hat(sp, Profile::W, s, 0.0, Side::Left).sample.value; };

  const double m_u1 = g.sphere * hatU(Rn);
  const double m_w1 = g.sphere * hatW(Rn);
  InitialData out;
  out.c = std::max(1.0, p.M_lo / std::min(m_u1, m_w1));
  while (out.c * std::min(m_u1, m_w1) < p.M_lo) out.c = std::nextafter(out.c, 2.0 * out.c);
  out.mass_u = out.c * m_u1;
  out.mass_w = out.c * m_w1;
  if (out.c * std::max(m_u1, m_w1) > p.M_hi) {
    throw Error(Errc::InfeasibleInitialData, "scaled masses (" + fmt_num(out.mass_u) + ", " + fmt_num(out.mass_w) +
                                                 ") exceed M_hi = " + fmt_num(p.M_hi) + "; enlarge M_hi");
  }

  // Exact shell averages of c n hat_s: differences of the closed form at the faces.
  out.u0.resize(N);
  out.w0.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double s_lo = std::pow(g.face[i], n);
    const double s_hi = i + 1 == N ? Rn : std::pow(g.face[i + 1], n);
    const double ds = power_difference(g.face[i + 1], g.face[i], n);
    out.u0[i] = out.c * n * (hatU(s_hi) - hatU(s_lo)) / ds;
    out.w0[i] = out.c * n * (hatW(s_hi) - hatW(s_lo)) / ds;
  }

  out.w_sup = *std::max_element(out.w0.begin(), out.w0.end());
  out.w_sup_bound = p.M_hi / ball_volume(n, p.R);
  out.w_sup_within_bound = out.w_sup <= out.w_sup_bound;

  RadialState st;
  st.u = out.u0;
  st.w = out.w0;
  const MassState ms = cumulate(st, g);
  for (std::size_t i = 0; i < N; ++i) {
    const SubEval sub = eval_sub(sp, ms.s[i], 0.0, Side::Left);
    if (ms.U[i] < sub.U.sample.value || ms.W[i] < sub.W.sample.value) {
      throw Error(Errc::InfeasibleInitialData, "generated data fall below the subsolution at s = " + fmt_num(ms.s[i]));
    }
  }
  return out;
}

std::string serialize_spec(const SubsolutionSpec& sp) {
  std::string out;
  auto put = [&](const std::string& k, double v) { out += k + " = " + fmt_num(v) + "\n"; };
  out += "n = " + std::to_string(sp.n) + "\n";
  put("R", sp.R);
  put("sigma", sp.sigma);
  put("K_big", sp.K_big);
  put("mu_lo", sp.mu_lo);
  put("mu_hi", sp.mu_hi);
  put("T_star", sp.T_star);
  put("alpha", sp.ex.alpha);
  put("beta", sp.ex.beta);
  put("a", sp.a);
  put("theta", sp.theta);
  put("gamma", sp.gamma);
  put("delta", sp.delta);
  put("y0", sp.y0);
  put("T", sp.T);
  put("s0", sp.s0);
  put("delta_star", sp.delta_star);
  put("delta_2star", sp.delta_2star);
  put("gamma_star", sp.gamma_star);
  put("y_star", sp.y_star);
  put("L_big", sp.L_big);
  for (int i = 0; i < 3; ++i) put("s_star_cap" + std::to_string(i + 1), sp.s_star_caps[i]);
  put("s_star", sp.s_star);
  put("s_2star", sp.s_2star);
  put("theta_star", sp.theta_star);
  for (int i = 0; i < 4; ++i) put("theta_2star_form" + std::to_string(i + 1), sp.theta_2star_forms[i]);
  put("theta_2star", sp.theta_2star);
  return out;
}

SubsolutionSpec parse_spec(const KeyValueConfig& cfg) {
  SubsolutionSpec sp;
  sp.n = static_cast<int>(cfg.integer("n"));
  sp.R = cfg.number("R");
  sp.sigma = cfg.number("sigma");
  sp.K_big = cfg.number("K_big");
  sp.mu_lo = cfg.number("mu_lo");
  sp.mu_hi = cfg.number("mu_hi");
  sp.T_star = cfg.number("T_star");
  sp.ex.alpha = cfg.number("alpha");
  sp.ex.beta = cfg.number("beta");
  sp.a = cfg.number("a");
  sp.theta = cfg.number("theta");
  sp.gamma = cfg.number("gamma");
  sp.delta = cfg.number("delta");
  sp.y0 = cfg.number("y0");
  sp.T = cfg.number("T");
  sp.s0 = cfg.number("s0");
  sp.delta_star = cfg.number("delta_star");
  sp.delta_2star = cfg.number("delta_2star");
  sp.gamma_star = cfg.number("gamma_star");
  sp.y_star = cfg.number("y_star");
  sp.L_big = cfg.number("L_big");
  for (int i = 0; i < 3; ++i) sp.s_star_caps[i] = cfg.number("s_star_cap" + std::to_string(i + 1));
  sp.s_star = cfg.number("s_star");
  sp.s_2star = cfg.number("s_2star");
  sp.theta_star = cfg.number("theta_star");
  for (int i = 0; i < 4; ++i) sp.theta_2star_forms[i] = cfg.number("theta_2star_form" + std::to_string(i + 1));
  sp.theta_2star = cfg.number("theta_2star");
  return sp;
}

void write_profile_csv(const SubsolutionSpec& sp, double t, std::size_t samples, const std::string& path) {
  CsvWriter csv({"s", "uU", "uW", "uU_s", "uW_s", "uU_ss", "uW_ss", "side"});
  const double Rn = std::pow(sp.R, sp.n);
  const double kink = 1.0 / y_of_t(sp, t);
  // Log-spaced in s from well inside the kink to R^n, plus both kink sides.
  const double lo = std::log(kink * 1e-3);
  const double hi = std::log(Rn);
  std::vector<std::pair<double, Side>> pts;
  for (std::size_t i = 0; i < samples; ++i) {
    pts.emplace_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1)),
                     Side::Interior);
  }
  pts.back().first = Rn;
  pts.emplace_back(kink, Side::Left);
  pts.emplace_back(kink, Side::Right);
  std::stable_sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [s, side] : pts) {
    const bool at_kink = s == kink;
    const Side use = at_kink && side == Side::Interior ? Side::Left : side;
    const SubEval e = eval_sub(sp, s, t, use);
    csv.row(std::vector<std::string>{fmt_num(s), fmt_num(e.U.sample.value), fmt_num(e.W.sample.value),
                                     fmt_num(e.U.sample.d_s), fmt_num(e.W.sample.d_s), fmt_num(e.U.sample.d_ss),
                                     fmt_num(e.W.sample.d_ss), to_string(at_kink ? use : Side::Interior)});
  }
  csv.save(path);
}

}  // namespace chemo
