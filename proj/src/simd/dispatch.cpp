#include <atomic>
#include <cstdlib>
#include <string_view>

#include "tdas/simd.hpp"

namespace tdas::simd {

#if defined(TDAS_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table() noexcept;
}
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(TDAS_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* best() noexcept {
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

const KernelTable* from_env() noexcept {
  const char* env = std::getenv("TDAS_SIMD");
  if (env != nullptr) {
    const std::string_view v(env);
    if (v == "scalar") return &scalar_kernels();
    if (v == "avx2" && avx2_kernels() != nullptr) return avx2_kernels();
  }
  return best();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{from_env()};
  return current;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

bool select(std::string_view name) noexcept {
  const KernelTable* t = nullptr;
  if (name == "scalar")
    t = &scalar_kernels();
  else if (name == "avx2")
    t = avx2_kernels();
  else if (name == "auto")
    t = best();
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace tdas::simd
