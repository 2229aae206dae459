#pragma once

#include <cstddef>
#include <string_view>

namespace chemo::simd {

// Elementwise and reduction loops of the radial solver. Each table entry has a
// scalar reference and, on x86-64 hosts with AVX2, a vectorized twin. The
// elementwise kernels round identically in both paths (no FMA contraction);
// reductions differ only by summation order.
struct Kernels {
  std::string_view name;

  /// sum_i w[i] * x[i]
  double (*weighted_sum)(const double* w, const double* x, std::size_t n);
  double (*max_value)(const double* x, std::size_t n);
  double (*min_value)(const double* x, std::size_t n);

  /// flux[i] = area[i] * (max(vel[i],0) * left[i] + min(vel[i],0) * right[i])
  void (*upwind_flux)(const double* area, const double* vel, const double* left, const double* right,
                      double* flux, std::size_t n);

  /// out[i] = u[i] - dt * inv_vol[i] * (flux[i+1] - flux[i]);  flux has n+1 entries
  void (*flux_update)(const double* u, const double* flux, const double* inv_vol, double dt, double* out,
                      std::size_t n);

  /// out[i] = w[i] + dt * (prod[i] - w[i])
  void (*relax_update)(const double* w, const double* prod, double dt, double* out, std::size_t n);
};

const Kernels& scalar_kernels();

/// Null when the binary or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// Selected once per process. CHEMO_SIMD=scalar forces the reference path.
const Kernels& active_kernels();

}  // namespace chemo::simd
