#pragma once

// Exact partial sums S(x) = sum_{n<=x} Delta(n), weighted sums with a
// nonnegative multiplicative weight, and sums of Delta(|F(n)|) for an integer
// polynomial F.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "delta_lab/arith.hpp"

namespace delta_lab::bulk {

inline constexpr std::uint64_t kMaxSumLimit = 1'000'000'000;
inline constexpr std::uint64_t kDefaultChunk = std::uint64_t{1} << 16;
// |F(n)| above this is recorded as a per-n failure.
inline constexpr std::uint64_t kPolyValueBudget = 1'000'000'000'000'000'000ULL;

// g(p^a) for a prime power; g(1) = 1.
struct Weight {
  std::string name;
  std::function<double(std::uint64_t p, int a)> g;
};

// "one", "squarefree" (mu^2), "zero" (g(p^a) = 0), "tau" (divisor count).
Weight weight_from_name(const std::string& name);

struct WeightRule {
  std::uint64_t prime = 0;  // 0 matches every prime
  int exponent = 0;         // 0 matches every exponent
  double value = 0;
};

// First matching rule wins; prime powers with no matching rule get 1.
Weight weight_from_rules(std::vector<WeightRule> rules, std::string name = "rules");

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<std::int64_t> coefficients);  // constant term first
  // Accepts forms such as "x^2+1", "2*x - 3", "X^3+2X+7".
  static Polynomial parse(const std::string& text);

  const std::vector<std::int64_t>& coefficients() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  // |F(n)|, or nullopt when it exceeds `bound`.
  std::optional<std::uint64_t> abs_value(std::uint64_t n, std::uint64_t bound) const;
  std::string to_string() const;

 private:
  std::vector<std::int64_t> coeffs_{0};
};

enum class SumMode { plain, weighted, polynomial };

struct SumJob {
  std::uint64_t x = 1;
  SumMode mode = SumMode::plain;
  Weight weight;
  Polynomial poly;
  std::uint64_t chunk = kDefaultChunk;
  unsigned threads = 0;  // 0 selects the default
  // Wall-clock budget in seconds; 0 disables. Exceeding it truncates the table.
  double time_budget = 0;
};

inline constexpr double kGrowthExponents[4] = {1.0, 1.5, 2.0, 2.5};

struct GrowthRow {
  std::uint64_t x = 0;
  long double sum = 0;  // exact integer in plain and polynomial modes
  double per_x = 0;     // S / x
  double normalized[4] = {0, 0, 0, 0};  // S / (x (log log x)^c); 0 when log log x <= 0
};

struct GrowthTable {
  std::vector<GrowthRow> rows;  // at every power of ten <= x, and at x
  bool truncated = false;       // budget hit; rows stop at the last completed point
  std::uint64_t skipped_zero = 0;  // polynomial mode: n with F(n) = 0
  std::uint64_t failures = 0;      // polynomial mode: |F(n)| over budget or unfactored
  std::string caveat;
};

GrowthRow make_row(std::uint64_t x, long double sum);

// Plain S(x).
GrowthTable sum_delta(const SumJob& job);
// sum_{n<=x} g(n) Delta(n). Throws ConfigError for a negative g(p^a).
long double sum_delta_weighted(const SumJob& job);
GrowthTable sum_delta_weighted_table(const SumJob& job);
// sum_{n<=x} Delta(|F(n)|); F(n) = 0 is skipped and counted.
GrowthTable sum_delta_poly(const SumJob& job);
GrowthTable run(const SumJob& job);

// Delta(n) by direct factorization; Delta(0) = 0.
std::uint64_t delta_of(std::uint64_t n);

// E_x(Delta) = prod_{p<x} (1+1/p)^{-1} sum over squarefree n with primes < x
// of Delta(n)/n, by full enumeration. At most 8 primes below x.
long double exact_expectation_small(double x);

}  // namespace delta_lab::bulk
