// Built with -mavx2 only; callers reach it through the dispatch table after a
// CPU feature check.
#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "chemo/simd/kernels.hpp"

namespace chemo::simd {
namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double weighted_sum(const double* w, const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(x + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += w[i] * x[i];
  return acc;
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double min_value(const double* x, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) vm = _mm256_min_pd(vm, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    m = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) m = std::min(m, x[i]);
  return m;
}

void upwind_flux(const double* area, const double* vel, const double* left, const double* right, double* flux,
                 std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(vel + i);
    const __m256d vp = _mm256_max_pd(v, zero);
    const __m256d vm = _mm256_min_pd(v, zero);
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(vp, _mm256_loadu_pd(left + i)),
                                    _mm256_mul_pd(vm, _mm256_loadu_pd(right + i)));
    _mm256_storeu_pd(flux + i, _mm256_mul_pd(_mm256_loadu_pd(area + i), s));
  }
  for (; i < n; ++i) {
    const double vp = std::max(vel[i], 0.0);
    const double vm = std::min(vel[i], 0.0);
    flux[i] = area[i] * (vp * left[i] + vm * right[i]);
  }
}

void flux_update(const double* u, const double* flux, const double* inv_vol, double dt, double* out,
                 std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d div = _mm256_sub_pd(_mm256_loadu_pd(flux + i + 1), _mm256_loadu_pd(flux + i));
    const __m256d inc = _mm256_mul_pd(_mm256_mul_pd(vdt, _mm256_loadu_pd(inv_vol + i)), div);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(u + i), inc));
  }
  for (; i < n; ++i) out[i] = u[i] - dt * inv_vol[i] * (flux[i + 1] - flux[i]);
}

void relax_update(const double* w, const double* prod, double dt, double* out, std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prod + i), wv);
    _mm256_storeu_pd(out + i, _mm256_add_pd(wv, _mm256_mul_pd(vdt, d)));
  }
  for (; i < n; ++i) out[i] = w[i] + dt * (prod[i] - w[i]);
}

}  // namespace

const Kernels* avx2_kernels_impl() {
  static const Kernels k{"avx2", weighted_sum, max_value, min_value, upwind_flux, flux_update, relax_update};
  return &k;
}

}  // namespace chemo::simd
