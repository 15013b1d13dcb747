// Built with -mavx2 -mfma; only called after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "delta_lab/kernels.hpp"

namespace delta_lab::kernels {

namespace {

// pi/2 split into three doubles for Cody-Waite reduction with FMA.
constexpr double kPio2Hi = 1.5707963267948966;
constexpr double kPio2Mid = 6.123233995736766e-17;
constexpr double kPio2Lo = -1.4973849048591698e-33;
constexpr double kTwoOverPi = 0.63661977236758134308;

// Minimax coefficients on [-pi/4, pi/4] (Cephes).
constexpr double kSin[] = {1.58962301576546568060E-10, -2.50507477628578072866E-8,
                           2.75573136213857245213E-6,  -1.98412698295895385996E-4,
                           8.33333333332211858878E-3,  -1.66666666666666307295E-1};
constexpr double kCos[] = {-1.13585365213876817300E-11, 2.08757008419747316778E-9,
                           -2.75573141792967388112E-7,  2.48015872888517045348E-5,
                           -1.38888888888730564116E-3,  4.16666666666665929218E-2};

struct SinCos {
  __m256d sin;
  __m256d cos;
};

inline __m256d horner(__m256d z, const double (&c)[6]) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[i]));
  return p;
}

inline SinCos sincos_pd(__m256d x) {
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(j, _mm256_set1_pd(kPio2Lo), r);

  // Low bits of j through the 1.5 * 2^52 rounding trick.
  const __m256i q = _mm256_castpd_si256(_mm256_add_pd(j, _mm256_set1_pd(6755399441055744.0)));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);

  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), horner(z, kSin), r);
  const __m256d cos_r = _mm256_fmadd_pd(
      _mm256_mul_pd(z, z), horner(z, kCos),
      _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  const __m256d swap =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  __m256d s = _mm256_blendv_pd(sin_r, cos_r, swap);
  __m256d c = _mm256_blendv_pd(cos_r, sin_r, swap);

  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d sin_neg =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
  const __m256d cos_neg = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), two));
  s = _mm256_xor_pd(s, _mm256_and_pd(sin_neg, sign_bit));
  c = _mm256_xor_pd(c, _mm256_and_pd(cos_neg, sign_bit));
  return {s, c};
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Loads up to four doubles, padding with `fill`.
inline __m256d load_partial(const double* p, std::size_t count, double fill) {
  alignas(32) std::array<double, 4> tmp{fill, fill, fill, fill};
  std::copy_n(p, count, tmp.begin());
  return _mm256_load_pd(tmp.data());
}

void cos_product_avx2(std::span<const double> freqs, std::span<const double> thetas,
                      std::span<double> out) {
  const std::size_t n = thetas.size();
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t k = 0; k < n; k += 4) {
    const std::size_t lanes = std::min<std::size_t>(4, n - k);
    const __m256d th = lanes == 4 ? _mm256_loadu_pd(thetas.data() + k)
                                  : load_partial(thetas.data() + k, lanes, 0.0);
    __m256d prod = one;
    for (double f : freqs) {
      const SinCos sc = sincos_pd(_mm256_mul_pd(th, _mm256_set1_pd(f)));
      prod = _mm256_mul_pd(prod, _mm256_add_pd(one, sc.cos));
    }
    alignas(32) std::array<double, 4> tmp;
    _mm256_store_pd(tmp.data(), prod);
    std::copy_n(tmp.begin(), lanes, out.begin() + static_cast<std::ptrdiff_t>(k));
  }
}

double sinc_dot_avx2(std::span<const double> args, std::span<const double> weights) {
  const std::size_t n = args.size();
  __m256d acc = _mm256_setzero_pd();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t k = 0; k < n; k += 4) {
    const std::size_t lanes = std::min<std::size_t>(4, n - k);
    __m256d a, w;
    if (lanes == 4) {
      a = _mm256_loadu_pd(args.data() + k);
      w = _mm256_loadu_pd(weights.data() + k);
    } else {
      a = load_partial(args.data() + k, lanes, 0.0);
      w = load_partial(weights.data() + k, lanes, 0.0);
    }
    const __m256d is_zero = _mm256_cmp_pd(a, zero, _CMP_EQ_OQ);
    const __m256d safe = _mm256_blendv_pd(a, one, is_zero);
    const __m256d ratio = _mm256_div_pd(sincos_pd(safe).sin, safe);
    acc = _mm256_fmadd_pd(w, _mm256_blendv_pd(ratio, one, is_zero), acc);
  }
  return hsum(acc);
}

double cos_dot_avx2(double scale, std::span<const double> freqs,
                    std::span<const double> weights) {
  const std::size_t n = freqs.size();
  const __m256d sc = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < n; k += 4) {
    const std::size_t lanes = std::min<std::size_t>(4, n - k);
    __m256d f, w;
    if (lanes == 4) {
      f = _mm256_loadu_pd(freqs.data() + k);
      w = _mm256_loadu_pd(weights.data() + k);
    } else {
      f = load_partial(freqs.data() + k, lanes, 0.0);
      w = load_partial(weights.data() + k, lanes, 0.0);
    }
    acc = _mm256_fmadd_pd(w, sincos_pd(_mm256_mul_pd(sc, f)).cos, acc);
  }
  return hsum(acc);
}

double overlap_sum_avx2(std::span<const double> x, double width) {
  const std::size_t n = x.size();
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  double tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Terms width - (x_j - x_i), clamped at zero past the window edge.
    const double base = width + x[i];
    const __m256d vbase = _mm256_set1_pd(base);
    std::size_t j = i + 1;
    while (j + 4 <= n && x[j] - x[i] < width) {
      acc = _mm256_add_pd(acc, _mm256_max_pd(zero, _mm256_sub_pd(vbase, _mm256_loadu_pd(&x[j]))));
      j += 4;
    }
    for (; j < n && x[j] - x[i] < width; ++j) tail += base - x[j];
  }
  return static_cast<double>(n) * width + 2.0 * (hsum(acc) + tail);
}

constexpr KernelTable kAvx2{Isa::avx2, cos_product_avx2, sinc_dot_avx2, cos_dot_avx2,
                            overlap_sum_avx2};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2; }

}  // namespace delta_lab::kernels
