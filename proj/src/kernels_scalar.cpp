#include <cmath>

#include "delta_lab/kernels.hpp"

namespace delta_lab::kernels {

namespace {

void cos_product_scalar(std::span<const double> freqs, std::span<const double> thetas,
                        std::span<double> out) {
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    double prod = 1.0;
    for (double f : freqs) prod *= 1.0 + std::cos(thetas[k] * f);
    out[k] = prod;
  }
}

double sinc_dot_scalar(std::span<const double> args, std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t k = 0; k < args.size(); ++k) {
    const double a = args[k];
    sum += weights[k] * (a == 0.0 ? 1.0 : std::sin(a) / a);
  }
  return sum;
}

double cos_dot_scalar(double scale, std::span<const double> freqs,
                      std::span<const double> weights) {
  double sum = 0.0;
  for (std::size_t k = 0; k < freqs.size(); ++k) sum += weights[k] * std::cos(scale * freqs[k]);
  return sum;
}

double overlap_sum_scalar(std::span<const double> x, double width) {
  const std::size_t n = x.size();
  double off_diagonal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = x[j] - x[i];
      if (gap >= width) break;
      off_diagonal += width - gap;
    }
  }
  return static_cast<double>(n) * width + 2.0 * off_diagonal;
}

constexpr KernelTable kScalar{Isa::scalar, cos_product_scalar, sinc_dot_scalar,
                              cos_dot_scalar, overlap_sum_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace delta_lab::kernels
