#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2+FMA version; the active table is chosen once at runtime
// from CPUID and may be forced with DELTA_LAB_ISA=scalar|avx2.

#include <span>
#include <string_view>

namespace delta_lab::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // out[k] = prod_i (1 + cos(thetas[k] * freqs[i])).
  void (*cos_product)(std::span<const double> freqs, std::span<const double> thetas,
                      std::span<double> out);
  // sum_k weights[k] * sin(args[k]) / args[k], with sin(0)/0 = 1.
  double (*sinc_dot)(std::span<const double> args, std::span<const double> weights);
  // sum_k weights[k] * cos(scale * freqs[k]).
  double (*cos_dot)(double scale, std::span<const double> freqs,
                    std::span<const double> weights);
  // sum over ordered pairs (i, j) of max(0, width - |x_j - x_i|); x ascending.
  double (*overlap_sum)(std::span<const double> sorted, double width);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_table() noexcept;
bool cpu_has_avx2() noexcept;

const KernelTable& active() noexcept;
std::string_view isa_name(Isa isa) noexcept;

inline void cos_product(std::span<const double> freqs, std::span<const double> thetas,
                        std::span<double> out) {
  active().cos_product(freqs, thetas, out);
}
inline double sinc_dot(std::span<const double> args, std::span<const double> weights) {
  return active().sinc_dot(args, weights);
}
inline double cos_dot(double scale, std::span<const double> freqs,
                      std::span<const double> weights) {
  return active().cos_dot(scale, freqs, weights);
}
inline double overlap_sum(std::span<const double> sorted, double width) {
  return active().overlap_sum(sorted, width);
}

}  // namespace delta_lab::kernels
