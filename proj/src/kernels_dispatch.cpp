#include <cstdlib>
#include <cstring>

#include "tghar/kernels.hpp"

namespace tghar::kernels {

#ifdef TGHAR_BUILD_AVX2
const Kernels& avx2();  // kernels_avx2.cpp

namespace {
bool avx2_usable() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
}  // namespace
#endif

namespace {

const Kernels& pick() {
  const char* want = std::getenv("TGHAR_KERNEL");
  if (want != nullptr && std::strcmp(want, "scalar") == 0) return scalar();
#ifdef TGHAR_BUILD_AVX2
  if (avx2_usable()) {
    if (want == nullptr || std::strcmp(want, "avx2") == 0) return avx2();
  }
#endif
  return scalar();
}

}  // namespace

const Kernels& active() {
  static const Kernels& chosen = pick();
  return chosen;
}

std::vector<const Kernels*> available() {
  std::vector<const Kernels*> out{&scalar()};
#ifdef TGHAR_BUILD_AVX2
  if (avx2_usable()) out.push_back(&avx2());
#endif
  return out;
}

}  // namespace tghar::kernels
