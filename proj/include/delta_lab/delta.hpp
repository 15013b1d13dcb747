#pragma once

// Window-counting functions over the sorted logarithms of the divisors of n:
//   Delta(n; s, v) = #{d | n : e^s < d <= e^{s+v}},   Delta_v(n) = max_s Delta(n; s, v),
// with Delta(n, u) = Delta(n; u, 1) and Delta(n) = Delta_1(n).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "delta_lab/arith.hpp"

namespace delta_lab::delta {

// Log-space gaps within this distance of the window width are decided by an
// exact high-precision comparison instead of the long double one.
inline constexpr long double kTieGuard = 1e-9L;

// True iff hi < lo * e^v, with v taken as the exact value of its binary
// representation. Decided with MPFR; e^v is transcendental for v != 0 so the
// comparison never ties.
bool scaled_less(const mpz_class& hi, const mpz_class& lo, long double v);
bool scaled_less(std::uint64_t hi, std::uint64_t lo, long double v);

class DivisorLogProfile {
 public:
  static DivisorLogProfile build(const arith::FactoredInteger& f,
                                 std::uint64_t budget = arith::kDefaultDivisorBudget);

  const arith::FactoredInteger& integer() const noexcept { return n_; }
  std::size_t size() const noexcept { return logs_.size(); }
  // Natural logs of the divisors, ascending.
  std::span<const long double> logs() const noexcept { return logs_; }
  // The divisors themselves, ascending; empty when n does not fit in 64 bits.
  std::span<const std::uint64_t> divisors() const noexcept { return divisors_; }
  mpz_class divisor_big(std::size_t i) const;

  // Exact test of log(d_j) - log(d_i) < v.
  bool gap_less(std::size_t i, std::size_t j, long double v) const;

 private:
  arith::FactoredInteger n_;
  std::vector<long double> logs_;
  std::vector<std::uint64_t> divisors_;
  // Mixed-radix exponent code of each sorted divisor, for exact rechecks.
  std::vector<std::uint32_t> codes_;
};

DivisorLogProfile delta_profile(const arith::FactoredInteger& f);

// Piecewise-constant function with finite support: values[i] on
// [breakpoints[i], breakpoints[i+1]), zero outside [front, back).
// Canonical form: no zero-length pieces, adjacent values differ, and the
// outermost values are nonzero.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<long double> breakpoints, std::vector<std::uint64_t> values);

  // Indicator-sum of half-open intervals [start_k, end_k).
  static StepFunction from_intervals(std::span<const long double> starts,
                                     std::span<const long double> ends);

  const std::vector<long double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<std::uint64_t>& values() const noexcept { return values_; }
  bool empty() const noexcept { return values_.empty(); }

  std::uint64_t operator()(long double u) const;
  std::uint64_t max_value() const noexcept;
  // integral of f^q, q >= 0 (with 0^0 treated as 0 outside the support).
  long double integral_power(int q) const;
  StepFunction translated(long double shift) const;

  friend StepFunction operator+(const StepFunction& a, const StepFunction& b);
  // Same values piece by piece and breakpoints within tol.
  bool approx_equal(const StepFunction& other, long double tol) const;

 private:
  void canonicalize();

  std::vector<long double> breakpoints_;
  std::vector<std::uint64_t> values_;
};

// u -> #{d | n : u < log d - shift <= u + window}.
StepFunction delta_step_function(const DivisorLogProfile& p, long double shift = 0,
                                 long double window = 1);

// Delta_window(n) by a two-pointer sweep; window = 1 gives Delta(n).
std::uint64_t delta_max(const DivisorLogProfile& p, long double window = 1);

// #{(d, d') : d, d' | n, |log(d'/d)| <= v}; v = 1 gives T(n, 0).
std::uint64_t pair_count_T0(const DivisorLogProfile& p, long double v = 1);

// sum over d, d' | n of max(0, v - |log(d'/d)|) = integral of Delta(n; s, v)^2 ds.
double autocorrelation_integral(const DivisorLogProfile& p, long double v);

// Delta(n) for n given by its sorted divisors (bulk path, no log table).
std::uint64_t delta_max_sorted(std::span<const std::uint64_t> sorted_divisors);

}  // namespace delta_lab::delta
