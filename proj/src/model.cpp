#include "chemo/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "chemo/error.hpp"

namespace chemo {

double unit_sphere_area(int n) {
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double ball_volume(int n, double R) {
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) * std::pow(R, n) / std::tgamma(half + 1.0);
}

ModelParams validate_params(ModelParams p, Mode mode) {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(Errc::NonpositiveParameter, std::string(name) + " must be a positive finite number");
    }
  };
  positive(p.R, "R");
  positive(p.k, "k");
  positive(p.sigma, "sigma");
  positive(p.M_lo, "M_lo");
  positive(p.M_hi, "M_hi");
  if (!(p.M_lo < p.M_hi)) {
    throw Error(Errc::MassBoundsInverted, "require M_lo < M_hi");
  }
  if (p.f.kind == Production::Kind::Closure && !p.f.closure) {
    throw Error(Errc::NonpositiveParameter, "closure production law without a function");
  }

  if (mode == Mode::Blowup) {
    if (p.n != 3 && p.n != 4) {
      throw Error(Errc::DimensionOutOfRange, "blow-up construction needs n in {3,4}, got " + std::to_string(p.n));
    }
    if (!(p.sigma * p.n > 4.0)) {
      throw Error(Errc::SubcriticalExponent, "blow-up construction needs sigma > 4/n");
    }
  } else if (p.n < 1 || p.n > 4) {
    throw Error(Errc::DimensionOutOfRange, "simulation supports n in {1,..,4}, got " + std::to_string(p.n));
  }
  return p;
}

DerivedConstants derived_constants(const ModelParams& p) {
  DerivedConstants dc{};
  dc.omega_vol = ball_volume(p.n, p.R);
  dc.sphere_area = unit_sphere_area(p.n);
  dc.mu_lo = p.M_lo / (2.0 * dc.omega_vol);
  dc.mu_hi = 2.0 * p.M_hi / dc.omega_vol;
  const double Rn = std::pow(p.R, p.n);
  dc.a = dc.mu_lo * Rn / (p.n * std::exp(1.0 / std::numbers::e) * (Rn + 1.0));
  dc.K_big = p.k * std::pow(static_cast<double>(p.n), p.sigma - 1.0);
  dc.L_big = dc.K_big * std::pow(dc.a / std::numbers::e, p.sigma - 1.0);
  return dc;
}

double production_rate(const ModelParams& p, double u) {
  if (!(u >= 0.0)) {
    throw Error(Errc::NegativeDensity, "production evaluated at u = " + std::to_string(u));
  }
  const double bound = p.k * std::pow(u, p.sigma);
  if (p.f.kind == Production::Kind::Power) return bound;

  const double value = p.f.closure(u);
  if (!(value >= bound - kProductionBoundTol * bound)) {
    throw Error(Errc::LowerBoundViolated,
                "f(" + std::to_string(u) + ") = " + std::to_string(value) + " < k u^sigma = " + std::to_string(bound));
  }
  return value;
}

double production_slope(const ModelParams& p, double u) {
  const double h = 1e-6 * std::max(u, 1.0);
  return (production_rate(p, u + h) - production_rate(p, u)) / h;
}

bool is_critical_exponent(int n, double sigma) {
  return std::abs(sigma - 4.0 / n) <= 1e-12;
}

}  // namespace chemo
