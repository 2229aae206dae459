#include <algorithm>
#include <limits>

#include "chemo/simd/kernels.hpp"

namespace chemo::simd {
namespace {

double weighted_sum(const double* w, const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i];
  return acc;
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double min_value(const double* x, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, x[i]);
  return m;
}

void upwind_flux(const double* area, const double* vel, const double* left, const double* right, double* flux,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double vp = std::max(vel[i], 0.0);
    const double vm = std::min(vel[i], 0.0);
    flux[i] = area[i] * (vp * left[i] + vm * right[i]);
  }
}

void flux_update(const double* u, const double* flux, const double* inv_vol, double dt, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = u[i] - dt * inv_vol[i] * (flux[i + 1] - flux[i]);
}

void relax_update(const double* w, const double* prod, double dt, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = w[i] + dt * (prod[i] - w[i]);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", weighted_sum, max_value, min_value, upwind_flux, flux_update, relax_update};
  return k;
}

}  // namespace chemo::simd
