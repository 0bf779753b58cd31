#include "torusmf/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace torusmf::kernels {

#ifdef TORUSMF_HAVE_AVX2
extern const Table kAvx2Table;
#endif

const Table* avx2() {
#ifdef TORUSMF_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& table = []() -> const Table& {
    if (const char* env = std::getenv("TORUSMF_SIMD"); env && std::string_view(env) == "scalar") {
      return scalar();
    }
    if (const Table* t = avx2()) return *t;
    return scalar();
  }();
  return table;
}

}  // namespace torusmf::kernels
