#pragma once

#include <functional>

namespace chemo {

enum class Mode {
  Blowup,    ///< n in {3,4}, sigma > 4/n
  Simulate,  ///< n in {1,..,4}, any sigma > 0
};

/// Signal production law f. The power law is f(u) = k u^sigma. A closure is
/// any user function; its declared lower-bound witness (k, sigma) in
/// ModelParams is asserted at every evaluation.
struct Production {
  enum class Kind { Power, Closure };

  Kind kind = Kind::Power;
  std::function<double(double)> closure;

  static Production power() { return {}; }
  static Production user(std::function<double(double)> fn) {
    return {Kind::Closure, std::move(fn)};
  }
};

struct ModelParams {
  int n = 3;           ///< spatial dimension
  double R = 1.0;      ///< ball radius
  double k = 1.0;      ///< production coefficient
  double sigma = 2.0;  ///< production exponent
  double M_lo = 1.0;   ///< lower mass bound
  double M_hi = 2.0;   ///< upper mass bound
  Production f;
};

struct DerivedConstants {
  double omega_vol;    ///< |B_R|
  double sphere_area;  ///< |S^{n-1}|, surface of the unit sphere
  double mu_lo;        ///< M_lo / (2|B_R|)
  double mu_hi;        ///< 2 M_hi / |B_R|
  double a;            ///< subsolution amplitude
  double K_big;        ///< k n^{sigma-1}
  double L_big;        ///< K (a/e)^{sigma-1}
};

/// Relative tolerance applied to the closure lower-bound assertion.
inline constexpr double kProductionBoundTol = 1e-12;

double unit_sphere_area(int n);
double ball_volume(int n, double R);

/// Returns p unchanged when every invariant for the mode holds, throws otherwise.
ModelParams validate_params(ModelParams p, Mode mode);

DerivedConstants derived_constants(const ModelParams& p);

double production_rate(const ModelParams& p, double u);

/// Forward-difference estimate of f'(u), used only for step-size control.
double production_slope(const ModelParams& p, double u);

/// True when sigma sits exactly on the critical value 4/n (to 1e-12).
bool is_critical_exponent(int n, double sigma);

}  // namespace chemo
