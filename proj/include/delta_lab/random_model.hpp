#pragma once

// The probability P_{y,x} on squarefree integers with all prime factors in
// [y, x): P({n}) = (1/n) prod_{y<=p<x} (1 + 1/p)^{-1}. Equivalently each prime
// p in the range is included independently with probability 1/(p+1).

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "delta_lab/arith.hpp"

namespace delta_lab::random_model {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct MeasureSpec {
  double y = 2.0;
  double x = 3.0;
  std::uint64_t seed = kDefaultSeed;
};

class Sampler {
 public:
  explicit Sampler(const MeasureSpec& spec);

  const MeasureSpec& spec() const noexcept { return spec_; }
  const arith::PrimeRange& primes() const noexcept { return primes_; }

  // Sample number `index` of the seeded stream (independent of draw order).
  arith::FactoredInteger draw(std::uint64_t index) const;

  // Exact mass of n; 0 when n is outside the support.
  double probability(const arith::FactoredInteger& n) const;
  // prod_{y<=p<x} p / (p + 1) = P({1}).
  double mass_of_one() const noexcept { return mass_of_one_; }

 private:
  MeasureSpec spec_;
  arith::PrimeRange primes_;
  // survival_[k] = sum_{i<k} log(p_i / (p_i + 1)), decreasing.
  std::vector<double> survival_;
  double mass_of_one_ = 1.0;
};

std::vector<arith::FactoredInteger> sample(const MeasureSpec& spec, std::uint64_t count);

struct McEstimate {
  double mean = 0;
  double stderr_ = 0;
  std::uint64_t n_samples = 0;  // successful evaluations
  std::uint64_t failures = 0;
  std::uint64_t seed = kDefaultSeed;
  std::pair<double, double> ci95{0, 0};
  bool valid = true;  // false when more than 1% of evaluations failed
};

using Statistic = std::function<double(const arith::FactoredInteger&)>;

inline constexpr std::uint64_t kChunkSamples = 1024;

// Statistic failures (exceptions) are excluded and counted. threads = 0
// selects the default thread count.
McEstimate estimate_expectation(const Sampler& sampler, const Statistic& statistic,
                                std::uint64_t count, unsigned threads = 0);
McEstimate estimate_expectation(const MeasureSpec& spec, const Statistic& statistic,
                                std::uint64_t count, unsigned threads = 0);

// Vector-valued variant: statistic fills `out` (size `width`) per sample.
std::vector<McEstimate> estimate_expectations(
    const Sampler& sampler, std::size_t width,
    const std::function<void(const arith::FactoredInteger&, std::span<double>)>& statistic,
    std::uint64_t count, unsigned threads = 0);

struct FiberEstimate {
  int k = 0;
  double h = 0;  // y = exp(2^h)
  McEstimate estimate;
  double model = 0;  // (h log 2)^k / (2^h k!)
};

// P_{2,y}(omega(n) = k).
FiberEstimate fiber_probability(double y, int k, std::uint64_t count, std::uint64_t seed,
                                unsigned threads = 0);

struct FiberHistogram {
  double h = 0;
  std::uint64_t count = 0;
  std::vector<double> probability;  // indexed by k
  std::vector<double> stderr_;
  std::vector<double> model;
};

FiberHistogram fiber_histogram(double y, std::uint64_t count, std::uint64_t seed,
                               unsigned threads = 0);

double fiber_model(double h, int k);

struct TailRow {
  double T = 0;
  McEstimate estimate;
  double envelope_low = 0;   // 1 / (T sqrt(log T))
  double envelope_high = 0;  // log T / T
};

// P_x(M_2 / tau > T) for every T in the grid, from one shared sample.
std::vector<TailRow> tail_probability_m2(double x, const std::vector<double>& t_grid,
                                         std::uint64_t count, std::uint64_t seed,
                                         unsigned threads = 0);

struct DyExpectation {
  McEstimate estimate;
  double loglog_x = 0;
  double ratio = 0;  // mean / log log x
};

DyExpectation d_y_expectation(double y, double x, std::uint64_t count, std::uint64_t seed,
                              unsigned threads = 0);

}  // namespace delta_lab::random_model
