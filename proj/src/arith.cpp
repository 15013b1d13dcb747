#include "delta_lab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "delta_lab/error.hpp"

namespace delta_lab::arith {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) noexcept {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 pow_mod(u64 base, u64 exp, u64 m) noexcept {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 isqrt(u64 n) noexcept {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Primes below 2^16, shared by trial division and the segmented sieve.
const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    constexpr std::uint32_t kLimit = 1u << 16;
    std::vector<bool> composite(kLimit, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i < kLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j < kLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// Tiny deterministic generator for rho restarts (splitmix64).
u64 splitmix(u64& state) noexcept {
  u64 z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void factor_cofactor(u64 n, std::vector<PrimePower>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back({n, 1});
    return;
  }
  const u64 r = isqrt(n);
  if (r * r == n) {
    factor_cofactor(r, out);
    factor_cofactor(r, out);
    return;
  }
  auto d = split_composite(n);
  if (!d) throw FactoringError(n);
  factor_cofactor(*d, out);
  factor_cofactor(n / *d, out);
}

}  // namespace

// ---------------------------------------------------------------------------
// FactoredInteger

FactoredInteger FactoredInteger::from_factors(std::vector<PrimePower> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
  FactoredInteger f;
  for (const auto& pp : factors) {
    if (pp.exponent < 1 || pp.prime < 2) {
      throw ConfigError("invalid prime power " + std::to_string(pp.prime) + "^" +
                        std::to_string(pp.exponent));
    }
    if (!f.factors_.empty() && f.factors_.back().prime == pp.prime) {
      f.factors_.back().exponent += pp.exponent;
    } else {
      f.factors_.push_back(pp);
    }
  }
  f.finalize();
  return f;
}

FactoredInteger FactoredInteger::from_primes(std::span<const std::uint64_t> primes) {
  std::vector<PrimePower> pp;
  pp.reserve(primes.size());
  for (u64 p : primes) pp.push_back({p, 1});
  return from_factors(std::move(pp));
}

void FactoredInteger::finalize() {
  value_ = 1;
  tau_ = 1;
  squarefree_ = true;
  for (const auto& [p, e] : factors_) {
    if (e >= 2) squarefree_ = false;
    const u64 mult = static_cast<u64>(e) + 1;
    tau_ = (tau_ > std::numeric_limits<u64>::max() / mult) ? std::numeric_limits<u64>::max()
                                                            : tau_ * mult;
    for (int i = 0; i < e && value_; ++i) {
      const u128 next = static_cast<u128>(*value_) * p;
      if (next > std::numeric_limits<u64>::max()) {
        value_.reset();
      } else {
        value_ = static_cast<u64>(next);
      }
    }
  }
}

int FactoredInteger::mu() const noexcept {
  if (!squarefree_) return 0;
  return (factors_.size() % 2 == 0) ? 1 : -1;
}

std::uint64_t FactoredInteger::value() const {
  if (!value_) throw RangeError("integer does not fit in 64 bits");
  return *value_;
}

mpz_class FactoredInteger::big_value() const {
  mpz_class v = 1;
  for (const auto& [p, e] : factors_) {
    mpz_class pe;
    mpz_ui_pow_ui(pe.get_mpz_t(), p, static_cast<unsigned long>(e));
    v *= pe;
  }
  return v;
}

long double FactoredInteger::log_value() const noexcept {
  long double s = 0;
  for (const auto& [p, e] : factors_) s += e * std::log(static_cast<long double>(p));
  return s;
}

bool FactoredInteger::divides_by(std::uint64_t p) const noexcept {
  return std::any_of(factors_.begin(), factors_.end(),
                     [p](const PrimePower& pp) { return pp.prime == p; });
}

FactoredInteger FactoredInteger::times_prime(std::uint64_t p) const {
  auto fs = factors_;
  fs.push_back({p, 1});
  return from_factors(std::move(fs));
}

// ---------------------------------------------------------------------------
// Sieves

SpfSieve::SpfSieve(std::uint32_t limit, std::size_t memory_budget) : limit_(limit) {
  if (limit < 2) throw ConfigError("sieve limit must be >= 2");
  const std::size_t bytes = (std::size_t{limit} + 1) * sizeof(std::uint32_t);
  if (bytes > memory_budget) {
    throw ResourceError("spf sieve of limit " + std::to_string(limit) + " needs " +
                        std::to_string(bytes) + " bytes, budget " +
                        std::to_string(memory_budget));
  }
  spf_.assign(std::size_t{limit} + 1, 0);
  spf_[1] = 1;
  // Linear sieve: every composite is written once, by its smallest prime.
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes_.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t si = spf_[i];
    for (std::uint32_t p : primes_) {
      if (p > si) break;
      const std::uint64_t m = i * p;
      if (m > limit) break;
      spf_[m] = p;
    }
  }
}

SpfSieve build_spf_sieve(std::uint32_t limit, std::size_t memory_budget) {
  return SpfSieve(limit, memory_budget);
}

PrimeRange primes_in_range(std::uint64_t lo, std::uint64_t hi) {
  if (lo < 2 || hi < lo) throw ConfigError("primes_in_range needs 2 <= lo <= hi");
  if (hi > kSegmentedSieveBudget) {
    throw ResourceError("primes_in_range: hi exceeds segmented-sieve budget");
  }
  if (hi - lo > kMaxRangeLength) {
    throw ResourceError("primes_in_range: range longer than budget");
  }
  PrimeRange out{lo, hi, {}};
  if (hi == lo) return out;

  // Base primes up to sqrt(hi).
  const u64 root = isqrt(hi) + 1;
  std::vector<std::uint32_t> base;
  if (root < (1u << 16)) {
    for (auto p : small_primes()) {
      if (p > root) break;
      base.push_back(p);
    }
  } else {
    SpfSieve s(static_cast<std::uint32_t>(root));
    base = s.primes();
  }

  constexpr u64 kSegment = u64{1} << 20;
  std::vector<char> composite;
  for (u64 seg_lo = lo; seg_lo < hi; seg_lo += kSegment) {
    const u64 seg_hi = std::min(hi, seg_lo + kSegment);
    composite.assign(seg_hi - seg_lo, 0);
    for (u64 p : base) {
      if (p * p >= seg_hi) break;
      u64 start = std::max(p * p, (seg_lo + p - 1) / p * p);
      for (u64 m = start; m < seg_hi; m += p) composite[m - seg_lo] = 1;
    }
    for (u64 k = seg_lo; k < seg_hi; ++k) {
      if (!composite[k - seg_lo]) out.primes.push_back(k);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Primality and factoring

bool is_prime_u64(std::uint64_t n) noexcept {
  if (n < 2) return false;
  // First twelve primes: a deterministic base set for n < 3.3e24.
  static constexpr u64 kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : kBases) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : kBases) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

std::optional<std::uint64_t> split_composite(std::uint64_t n, int max_retries) {
  if (n % 2 == 0) return 2;
  u64 state = n ^ 0xD1B54A32D192ED03ULL;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    const u64 c = splitmix(state) % (n - 1) + 1;
    u64 y = splitmix(state) % n;
    constexpr u64 kBatch = 128;
    u64 g = 1, q = 1, x = 0, ys = 0;
    u64 r = 1;
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    // Brent's cycle detection with batched gcds.
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      while (k < r && g == 1) {
        ys = y;
        const u64 lim = std::min(kBatch, r - k);
        for (u64 i = 0; i < lim; ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += kBatch;
      }
      r <<= 1;
    } while (g == 1 && r < (u64{1} << 40));
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  return std::nullopt;
}

FactoredInteger factorize(std::uint64_t n, const SpfSieve* sieve) {
  if (n == 0) throw ConfigError("factorize: n must be >= 1");
  std::vector<PrimePower> out;
  if (sieve != nullptr && n <= sieve->limit()) {
    while (n > 1) {
      const u64 p = sieve->spf(n);
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    return FactoredInteger::from_factors(std::move(out));
  }

  auto trial = [&](u64 p) {
    if (n % p != 0) return;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  };
  // Trial division by sieved primes, up to sqrt(n) or the end of the table.
  if (sieve != nullptr) {
    for (u64 p : sieve->primes()) {
      if (p * p > n) break;
      trial(p);
    }
  } else {
    for (u64 p : small_primes()) {
      if (p > 1000 || p * p > n) break;
      trial(p);
    }
  }
  factor_cofactor(n, out);
  return FactoredInteger::from_factors(std::move(out));
}

std::vector<std::uint64_t> divisors(const FactoredInteger& f, std::uint64_t budget) {
  if (f.tau() > budget) {
    throw ResourceError("divisor count " + std::to_string(f.tau()) + " exceeds budget " +
                        std::to_string(budget));
  }
  (void)f.value();  // throws when the divisors would not fit
  std::vector<u64> ds{1};
  ds.reserve(f.tau());
  for (const auto& [p, e] : f.factors()) {
    const std::size_t prev = ds.size();
    u64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < prev; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

SmoothSplit smooth_part(const FactoredInteger& f, double y) {
  std::vector<PrimePower> small, large;
  for (const auto& pp : f.factors()) {
    (static_cast<double>(pp.prime) < y ? small : large).push_back(pp);
  }
  return {FactoredInteger::from_factors(std::move(small)),
          FactoredInteger::from_factors(std::move(large))};
}

}  // namespace delta_lab::arith
