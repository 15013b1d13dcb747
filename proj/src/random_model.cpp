#include "delta_lab/random_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delta_lab/error.hpp"
#include "delta_lab/fourier.hpp"
#include "delta_lab/moments.hpp"
#include "delta_lab/parallel.hpp"
#include "delta_lab/rng.hpp"

namespace delta_lab::random_model {

namespace {

using arith::FactoredInteger;

// Running mean / second central moment; merged with Chan's formula.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

McEstimate finish(const Moments& m, std::uint64_t failures, std::uint64_t seed,
                  std::uint64_t count) {
  McEstimate e;
  e.mean = m.mean;
  e.n_samples = m.n;
  e.failures = failures;
  e.seed = seed;
  e.stderr_ = m.n > 1 ? std::sqrt(m.m2 / static_cast<double>(m.n - 1) / static_cast<double>(m.n))
                      : 0.0;
  e.ci95 = {e.mean - 1.96 * e.stderr_, e.mean + 1.96 * e.stderr_};
  e.valid = m.n > 0 && failures * 100 <= count;
  return e;
}

std::uint64_t ceil_to_u64(double v) { return static_cast<std::uint64_t>(std::ceil(v)); }

}  // namespace

Sampler::Sampler(const MeasureSpec& spec) : spec_(spec) {
  if (!(spec.y >= 2.0)) throw ConfigError("measure needs y >= 2");
  if (!(spec.x > spec.y)) throw ConfigError("measure needs x > y");
  const std::uint64_t lo = ceil_to_u64(spec.y);
  const std::uint64_t hi = std::max(lo, ceil_to_u64(spec.x));
  primes_ = arith::primes_in_range(lo, hi);
  survival_.resize(primes_.primes.size() + 1, 0.0);
  for (std::size_t k = 0; k < primes_.primes.size(); ++k) {
    const double p = static_cast<double>(primes_.primes[k]);
    survival_[k + 1] = survival_[k] + std::log1p(-1.0 / (p + 1.0));
  }
  mass_of_one_ = std::exp(survival_.back());
}

FactoredInteger Sampler::draw(std::uint64_t index) const {
  Pcg32 rng(spec_.seed, index);
  std::vector<std::uint64_t> chosen;
  // Skip directly to the next included prime: from position i the first
  // inclusion is at the smallest k >= i with survival_[k+1] - survival_[i] < log U.
  std::size_t i = 0;
  const std::size_t m = primes_.primes.size();
  while (i < m) {
    const double target = survival_[i] + std::log(uniform_open01(rng));
    const auto it = std::upper_bound(survival_.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                     survival_.end(), target, std::greater<>());
    if (it == survival_.end()) break;
    const auto k = static_cast<std::size_t>(it - survival_.begin()) - 1;
    chosen.push_back(primes_.primes[k]);
    i = k + 1;
  }
  return FactoredInteger::from_primes(chosen);
}

double Sampler::probability(const FactoredInteger& n) const {
  if (!n.is_squarefree()) return 0.0;
  double mass = mass_of_one_;
  for (const auto& pp : n.factors()) {
    if (!std::binary_search(primes_.primes.begin(), primes_.primes.end(), pp.prime)) return 0.0;
    mass /= static_cast<double>(pp.prime);
  }
  return mass;
}

std::vector<FactoredInteger> sample(const MeasureSpec& spec, std::uint64_t count) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  const Sampler s(spec);
  std::vector<FactoredInteger> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(s.draw(i));
  return out;
}

std::vector<McEstimate> estimate_expectations(
    const Sampler& sampler, std::size_t width,
    const std::function<void(const FactoredInteger&, std::span<double>)>& statistic,
    std::uint64_t count, unsigned threads) {
  if (count < 1) throw ConfigError("sample count must be >= 1");
  const std::size_t n_chunks = (count + kChunkSamples - 1) / kChunkSamples;
  std::vector<std::vector<Moments>> partial(n_chunks, std::vector<Moments>(width));
  std::vector<std::uint64_t> failures(n_chunks, 0);
  parallel_chunks(n_chunks, threads, [&](std::size_t c) {
    std::vector<double> values(width);
    const std::uint64_t begin = c * kChunkSamples;
    const std::uint64_t end = std::min<std::uint64_t>(count, begin + kChunkSamples);
    for (std::uint64_t i = begin; i < end; ++i) {
      const FactoredInteger n = sampler.draw(i);
      try {
        statistic(n, values);
      } catch (const std::exception&) {
        ++failures[c];
        continue;
      }
      for (std::size_t w = 0; w < width; ++w) partial[c][w].add(values[w]);
    }
  });
  std::vector<Moments> total(width);
  std::uint64_t failed = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    for (std::size_t w = 0; w < width; ++w) total[w].merge(partial[c][w]);
    failed += failures[c];
  }
  std::vector<McEstimate> out;
  out.reserve(width);
  for (const auto& m : total) out.push_back(finish(m, failed, sampler.spec().seed, count));
  return out;
}

McEstimate estimate_expectation(const Sampler& sampler, const Statistic& statistic,
                                std::uint64_t count, unsigned threads) {
  return estimate_expectations(
      sampler, 1,
      [&](const FactoredInteger& n, std::span<double> out) { out[0] = statistic(n); }, count,
      threads)[0];
}

McEstimate estimate_expectation(const MeasureSpec& spec, const Statistic& statistic,
                                std::uint64_t count, unsigned threads) {
  return estimate_expectation(Sampler(spec), statistic, count, threads);
}

double fiber_model(double h, int k) {
  const double lam = h * std::numbers::ln2;
  return std::exp(k * std::log(lam) - std::lgamma(k + 1.0) - h * std::numbers::ln2);
}

FiberEstimate fiber_probability(double y, int k, std::uint64_t count, std::uint64_t seed,
                                unsigned threads) {
  if (!(y >= 4.0)) throw ConfigError("fiber_probability needs y >= 4");
  if (k < 0) throw ConfigError("k must be >= 0");
  FiberEstimate r;
  r.k = k;
  r.h = std::log(std::log(y)) / std::numbers::ln2;
  const Sampler s({2.0, y, seed});
  r.estimate = estimate_expectation(
      s, [k](const FactoredInteger& n) { return n.omega() == k && n.is_squarefree() ? 1.0 : 0.0; },
      count, threads);
  r.model = fiber_model(r.h, k);
  return r;
}

FiberHistogram fiber_histogram(double y, std::uint64_t count, std::uint64_t seed,
                               unsigned threads) {
  if (!(y >= 4.0)) throw ConfigError("fiber_histogram needs y >= 4");
  static constexpr std::size_t kMaxK = 64;
  const Sampler s({2.0, y, seed});
  const auto est = estimate_expectations(
      s, kMaxK + 1,
      [](const FactoredInteger& n, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        out[std::min<std::size_t>(static_cast<std::size_t>(n.omega()), kMaxK)] = 1.0;
      },
      count, threads);
  FiberHistogram h;
  h.h = std::log(std::log(y)) / std::numbers::ln2;
  h.count = count;
  std::size_t top = 0;
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (est[k].mean > 0) top = k;
  }
  for (std::size_t k = 0; k <= top; ++k) {
    h.probability.push_back(est[k].mean);
    h.stderr_.push_back(est[k].stderr_);
    h.model.push_back(fiber_model(h.h, static_cast<int>(k)));
  }
  return h;
}

std::vector<TailRow> tail_probability_m2(double x, const std::vector<double>& t_grid,
                                         std::uint64_t count, std::uint64_t seed,
                                         unsigned threads) {
  for (double t : t_grid) {
    if (!(t >= 3.0)) throw ConfigError("tail_probability_m2 needs T >= 3");
  }
  const Sampler s({2.0, x, seed});
  const auto est = estimate_expectations(
      s, t_grid.size(),
      [&](const FactoredInteger& n, std::span<double> out) {
        const long double ratio = moments::moment(n, 2) / static_cast<long double>(n.tau());
        for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = ratio > t_grid[i] ? 1.0 : 0.0;
      },
      count, threads);
  std::vector<TailRow> rows;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    rows.push_back({t, est[i], 1.0 / (t * std::sqrt(std::log(t))), std::log(t) / t});
  }
  return rows;
}

DyExpectation d_y_expectation(double y, double x, std::uint64_t count, std::uint64_t seed,
                              unsigned threads) {
  const Sampler s({y, x, seed});
  DyExpectation r;
  r.estimate = estimate_expectation(
      s, [y](const FactoredInteger& b) { return fourier::d_y(b, y).value; }, count, threads);
  r.loglog_x = std::log(std::log(x));
  r.ratio = r.estimate.mean / r.loglog_x;
  return r;
}

}  // namespace delta_lab::random_model
