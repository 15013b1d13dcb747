#pragma once

// Arithmetic substrate: smallest-prime-factor sieve, segmented prime ranges,
// factorization (sieve, trial division, Miller-Rabin + Brent rho) and
// divisor enumeration.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace delta_lab::arith {

struct PrimePower {
  std::uint64_t prime = 0;
  int exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// An integer carried with its full factorization. The value itself may
// exceed 64 bits (samples from the random model); value() then throws and
// big_value() must be used.
class FactoredInteger {
 public:
  FactoredInteger() = default;  // the integer 1

  // Factors are sorted and equal primes merged; exponents must be >= 1.
  static FactoredInteger from_factors(std::vector<PrimePower> factors);
  // Squarefree product of distinct primes (any order).
  static FactoredInteger from_primes(std::span<const std::uint64_t> primes);

  const std::vector<PrimePower>& factors() const noexcept { return factors_; }
  int omega() const noexcept { return static_cast<int>(factors_.size()); }
  // Saturates at UINT64_MAX.
  std::uint64_t tau() const noexcept { return tau_; }
  int mu() const noexcept;
  bool is_squarefree() const noexcept { return squarefree_; }
  std::uint64_t pplus() const noexcept {
    return factors_.empty() ? 1 : factors_.back().prime;
  }

  bool fits_u64() const noexcept { return value_.has_value(); }
  // Throws RangeError when the value does not fit in 64 bits.
  std::uint64_t value() const;
  mpz_class big_value() const;
  // Natural log of the value, in extended precision.
  long double log_value() const noexcept;

  bool divides_by(std::uint64_t p) const noexcept;
  // this * p for a prime p not dividing this.
  FactoredInteger times_prime(std::uint64_t p) const;

  friend bool operator==(const FactoredInteger& a, const FactoredInteger& b) {
    return a.factors_ == b.factors_;
  }

 private:
  void finalize();

  std::vector<PrimePower> factors_;
  std::optional<std::uint64_t> value_ = 1;
  std::uint64_t tau_ = 1;
  bool squarefree_ = true;
};

// spf[k] = smallest prime factor of k for 2 <= k <= limit.
class SpfSieve {
 public:
  // Default memory budget for the spf array, in bytes.
  static constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 31;

  explicit SpfSieve(std::uint32_t limit,
                    std::size_t memory_budget = kDefaultMemoryBudget);

  std::uint32_t limit() const noexcept { return limit_; }
  std::uint32_t spf(std::uint64_t k) const { return spf_.at(k); }
  bool is_prime(std::uint64_t k) const { return k >= 2 && spf_.at(k) == k; }
  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

 private:
  std::uint32_t limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

SpfSieve build_spf_sieve(std::uint32_t limit,
                         std::size_t memory_budget = SpfSieve::kDefaultMemoryBudget);

struct PrimeRange {
  std::uint64_t lo = 2;
  std::uint64_t hi = 2;
  std::vector<std::uint64_t> primes;  // primes p with lo <= p < hi
};

inline constexpr std::uint64_t kSegmentedSieveBudget = 1'000'000'000'000ULL;
// Longest range primes_in_range accepts (bounds the output vector).
inline constexpr std::uint64_t kMaxRangeLength = 4'000'000'000ULL;

PrimeRange primes_in_range(std::uint64_t lo, std::uint64_t hi);

// Deterministic for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n) noexcept;

// One nontrivial factor of a composite n (Brent's rho), or nullopt after
// the retry budget is spent.
std::optional<std::uint64_t> split_composite(std::uint64_t n, int max_retries = 64);

FactoredInteger factorize(std::uint64_t n, const SpfSieve* sieve = nullptr);

inline constexpr std::uint64_t kDefaultDivisorBudget = std::uint64_t{1} << 24;

// All divisors in increasing order. Requires the value to fit in 64 bits.
std::vector<std::uint64_t> divisors(const FactoredInteger& f,
                                    std::uint64_t budget = kDefaultDivisorBudget);

struct SmoothSplit {
  FactoredInteger a;  // primes < y
  FactoredInteger b;  // primes >= y
};

SmoothSplit smooth_part(const FactoredInteger& f, double y);

}  // namespace delta_lab::arith
