#include "chemo/mass_system.hpp"

#include <algorithm>
#include <cmath>

#include "chemo/error.hpp"
#include "chemo/io.hpp"
#include "chemo/tridiag.hpp"

namespace chemo {
namespace {

// Second derivative from nodal first derivatives; one-sided at both ends.
std::vector<double> diff_nodes(const std::vector<double>& s, const std::vector<double>& f) {
  const std::size_t N = s.size();
  std::vector<double> out(N, 0.0);
  for (std::size_t i = 1; i + 1 < N; ++i) out[i] = (f[i + 1] - f[i - 1]) / (s[i + 1] - s[i - 1]);
  out[0] = (f[1] - f[0]) / (s[1] - s[0]);
  out[N - 1] = (f[N - 1] - f[N - 2]) / (s[N - 1] - s[N - 2]);
  return out;
}

std::vector<double> cell_slopes(const std::vector<double>& s, const std::vector<double>& F) {
  std::vector<double> q(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) q[i] = (F[i + 1] - F[i]) / (s[i + 1] - s[i]);
  return q;
}

// Nodal first and second derivatives from values on a nonuniform grid.
void derivatives_from_values(const std::vector<double>& s, const std::vector<double>& F, std::vector<double>& d1,
                             std::vector<double>& d2) {
  const std::size_t N = s.size();
  const auto q = cell_slopes(s, F);
  d1.assign(N, 0.0);
  d2.assign(N, 0.0);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double hl = s[i] - s[i - 1];
    const double hr = s[i + 1] - s[i];
    d1[i] = (hl * q[i] + hr * q[i - 1]) / (hl + hr);
    d2[i] = 2.0 * (q[i] - q[i - 1]) / (hl + hr);
  }
  d1[0] = q[0];
  d1[N - 1] = q[N - 2];
  d2[0] = N > 2 ? d2[1] : 0.0;
  d2[N - 1] = N > 2 ? d2[N - 2] : 0.0;
}

void check_defined(const ProfileSample& x, const char* name) {
  if (std::isnan(x.value) || std::isnan(x.d_t) || std::isnan(x.d_s) || std::isnan(x.d_ss)) {
    throw Error(Errc::UndefinedDerivative, std::string(name) + " has no derivative at this point");
  }
}

double degenerate_coeff(int n, double s) { return n * n * std::pow(s, 2.0 - 2.0 / n); }

}  // namespace

std::vector<double> s_nodes(const RadialGrid& g) {
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s[i] = std::pow(g.r[i], g.n);
  return s;
}

MassState cumulate(const RadialState& state, const RadialGrid& g) {
  const std::size_t N = g.size();
  const int n = g.n;
  MassState ms;
  ms.t = state.t;
  ms.s = s_nodes(g);
  ms.U.assign(N, 0.0);
  ms.W.assign(N, 0.0);
  double cu = 0.0, cw = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double part = power_difference(g.r[i], g.face[i], n) / n;
    ms.U[i] = cu + state.u[i] * part;
    ms.W[i] = cw + state.w[i] * part;
    const double shell = power_difference(g.face[i + 1], g.face[i], n) / n;
    cu += state.u[i] * shell;
    cw += state.w[i] * shell;
  }
  ms.U_s.resize(N);
  ms.W_s.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    ms.U_s[i] = state.u[i] / n;
    ms.W_s[i] = state.w[i] / n;
  }
  ms.U_ss = diff_nodes(ms.s, ms.U_s);
  ms.W_ss = diff_nodes(ms.s, ms.W_s);
  return ms;
}

std::string to_string(Side s) {
  switch (s) {
    case Side::Interior: return "interior";
    case Side::Left: return "left";
    case Side::Right: return "right";
  }
  return "interior";
}

Residual p_residual(const ProfileSample& phi, const ProfileSample& psi, double mu_hi, int n, double s) {
  check_defined(phi, "phi");
  check_defined(psi, "psi");
  const double diff = degenerate_coeff(n, s) * phi.d_ss;
  const double drift = n * phi.d_s * (psi.value - mu_hi * s / n);
  Residual r;
  r.value = phi.d_t - diff - drift;
  r.scale = std::max({std::abs(phi.d_t), std::abs(diff), std::abs(n * phi.d_s * psi.value),
                      std::abs(phi.d_s * mu_hi * s)});
  return r;
}

Residual q_residual(const ProfileSample& phi, const ProfileSample& psi, double K_big, double sigma, int n,
                    double s) {
  check_defined(phi, "phi");
  check_defined(psi, "psi");
  if (phi.value < 0.0) throw Error(Errc::NegativePhi, "phi = " + fmt_num(phi.value) + " < 0");
  double source = 0.0;
  if (phi.value > 0.0) {
    if (!(s > 0.0)) throw Error(Errc::UndefinedDerivative, "s^{1-sigma} phi^sigma undefined at s = 0");
    // s^{1-sigma} phi^sigma written as s (phi/s)^sigma to keep both factors in range.
    source = K_big * s * std::pow(phi.value / s, sigma);
  }
  const double diff = degenerate_coeff(n, s) * psi.d_ss;
  Residual r;
  r.value = psi.d_t - diff + psi.value - source;
  r.scale = std::max({std::abs(psi.d_t), std::abs(diff), std::abs(psi.value), std::abs(source)});
  return r;
}

MuwSeries::MuwSeries(std::vector<double> times, std::vector<double> values) : t_(std::move(times)), v_(std::move(values)) {
  if (t_.empty() || t_.size() != v_.size()) throw Error(Errc::NonpositiveParameter, "mu_w series is empty or ragged");
}

double MuwSeries::operator()(double t) const {
  if (t <= t_.front()) return v_.front();
  if (t >= t_.back()) return v_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - t_.begin());
  const double w = (t - t_[j - 1]) / (t_[j] - t_[j - 1]);
  return (1.0 - w) * v_[j - 1] + w * v_[j];
}

double mass_stable_dt(const MassState& ms, const MuwSeries& muw, const ModelParams& p) {
  const double mu = muw(ms.t);
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < ms.size(); ++i) {
    const double c = p.n * ms.W[i] - mu * ms.s[i];
    const double h = c > 0.0 ? ms.s[i + 1] - ms.s[i] : ms.s[i] - ms.s[i - 1];
    if (c != 0.0) dt = std::min(dt, h / std::abs(c));
  }
  return std::min(dt, 1.0);
}

MassState step_mass(const MassState& ms, const MuwSeries& muw, const ModelParams& p, double dt) {
  if (dt == 0.0) return ms;
  if (!(dt > 0.0)) throw Error(Errc::NonpositiveParameter, "dt must be nonnegative");
  const std::size_t N = ms.size();
  const int n = p.n;
  const auto& s = ms.s;
  const double mu = muw(ms.t);

  const auto qU = cell_slopes(s, ms.U);

  // (1/n) int_0^s f(n U_xi) dxi with U_xi constant on each cell.
  std::vector<double> prod(N, 0.0);
  for (std::size_t i = 1; i < N; ++i) {
    prod[i] = prod[i - 1] + production_rate(p, std::max(n * qU[i - 1], 0.0)) * (s[i] - s[i - 1]) / n;
  }

  std::vector<double> U_star(N), W_star(N);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double c = n * ms.W[i] - mu * s[i];
    const double slope = c > 0.0 ? qU[i] : qU[i - 1];
    U_star[i] = ms.U[i] + dt * c * slope;
    W_star[i] = ms.W[i] + dt * (prod[i] - ms.W[i]);
  }

  const double UN = ms.U[N - 1];
  const double WN = muw(ms.t + dt) * s[N - 1] / n;

  // Implicit degenerate diffusion on interior nodes with Dirichlet ends.
  auto diffuse = [&](const std::vector<double>& rhs_in, double left, double right) {
    const std::size_t m = N - 2;
    std::vector<double> lo(m), di(m), up(m), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const double hl = s[i] - s[i - 1];
      const double hr = s[i + 1] - s[i];
      const double a = dt * degenerate_coeff(n, s[i]) * 2.0 / (hl + hr);
      lo[k] = -a / hl;
      up[k] = -a / hr;
      di[k] = 1.0 + a / hl + a / hr;
      rhs[k] = rhs_in[i];
    }
    rhs[0] -= lo[0] * left;
    rhs[m - 1] -= up[m - 1] * right;
    auto x = solve_tridiagonal(std::move(lo), std::move(di), std::move(up), std::move(rhs));
    std::vector<double> out(N);
    out[0] = left;
    for (std::size_t k = 0; k < m; ++k) out[k + 1] = x[k];
    out[N - 1] = right;
    return out;
  };

  MassState next;
  next.t = ms.t + dt;
  next.s = s;
  next.U = diffuse(U_star, 0.0, UN);
  next.W = diffuse(W_star, 0.0, WN);

  const auto q = cell_slopes(s, next.U);
  const double qmax = *std::max_element(q.begin(), q.end());
  const double qmin = *std::min_element(q.begin(), q.end());
  if (qmin < -kMonotonicityTol * std::max(qmax, 0.0)) {
    throw Error(Errc::MonotonicityLost, "min U_s = " + fmt_num(qmin) + " against max " + fmt_num(qmax));
  }
  derivatives_from_values(s, next.U, next.U_s, next.U_ss);
  derivatives_from_values(s, next.W, next.W_s, next.W_ss);
  return next;
}

std::vector<OperatorResidual> sweep_residuals(const MassState& prev, const MassState& cur, double mu_hi,
                                              double K_big, double sigma, int n) {
  std::vector<OperatorResidual> rows;
  const double dt = cur.t - prev.t;
  if (!(dt > 0.0)) throw Error(Errc::NonpositiveParameter, "residual sweep needs increasing times");
  for (std::size_t i = 1; i + 1 < cur.size(); ++i) {
    const ProfileSample phi{cur.U[i], (cur.U[i] - prev.U[i]) / dt, cur.U_s[i], cur.U_ss[i]};
    const ProfileSample psi{cur.W[i], (cur.W[i] - prev.W[i]) / dt, cur.W_s[i], cur.W_ss[i]};
    OperatorResidual r;
    r.s = cur.s[i];
    r.t = cur.t;
    r.p_value = p_residual(phi, psi, mu_hi, n, cur.s[i]).value;
    r.q_value = q_residual(phi, psi, K_big, sigma, n, cur.s[i]).value;
    rows.push_back(r);
  }
  return rows;
}

void write_mass_csv(const MassState& ms, const std::string& path) {
  CsvWriter csv({"s", "U", "W", "U_s", "W_s"});
  for (std::size_t i = 0; i < ms.size(); ++i) {
    csv.row(std::vector<double>{ms.s[i], ms.U[i], ms.W[i], ms.U_s[i], ms.W_s[i]});
  }
  csv.save(path);
}

void write_residual_csv(const std::vector<OperatorResidual>& rows, const std::string& path) {
  CsvWriter csv({"s", "t", "p_value", "q_value", "side"});
  for (const auto& r : rows) {
    csv.row(std::vector<std::string>{fmt_num(r.s), fmt_num(r.t), fmt_num(r.p_value), fmt_num(r.q_value),
                                     to_string(r.side)});
  }
  csv.save(path);
}

}  // namespace chemo
