#include <cstdlib>
#include <string_view>

#include "delta_lab/kernels.hpp"

namespace delta_lab::kernels {

#if !defined(DELTA_LAB_HAVE_AVX2)
const KernelTable* avx2_table() noexcept { return nullptr; }
#endif

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable& select() noexcept {
  const KernelTable* avx2 = (avx2_table() != nullptr && cpu_has_avx2()) ? avx2_table() : nullptr;
  if (const char* env = std::getenv("DELTA_LAB_ISA")) {
    if (std::string_view(env) == "scalar") return scalar_table();
  }
  return avx2 != nullptr ? *avx2 : scalar_table();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace delta_lab::kernels
