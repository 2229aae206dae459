#include <cstdlib>
#include <cstring>

#include "chemo/simd/kernels.hpp"

namespace chemo::simd {

#if defined(CHEMO_HAVE_AVX2)
const Kernels* avx2_kernels_impl();
#endif

const Kernels* avx2_kernels() {
#if defined(CHEMO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_kernels_impl() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active_kernels() {
  static const Kernels& chosen = [] () -> const Kernels& {
    const char* env = std::getenv("CHEMO_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace chemo::simd
