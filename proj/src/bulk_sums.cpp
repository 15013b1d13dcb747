#include "delta_lab/bulk_sums.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "delta_lab/delta.hpp"
#include "delta_lab/error.hpp"
#include "delta_lab/parallel.hpp"

namespace delta_lab::bulk {

namespace {

using Clock = std::chrono::steady_clock;

// n <= 10^9 has at most 9 distinct prime factors.
constexpr int kMaxPrimes = 10;

struct Factored {
  std::uint64_t n = 0;
  int count = 0;
  std::array<std::uint32_t, kMaxPrimes> p{};
  std::array<std::uint8_t, kMaxPrimes> e{};
};

// Factors every n in [lo, hi) by striking out the sieving primes.
class SegmentFactorizer {
 public:
  explicit SegmentFactorizer(const std::vector<std::uint64_t>& small) : small_(small) {}

  template <class Visit>
  void run(std::uint64_t lo, std::uint64_t hi, Visit&& visit) {
    const std::size_t len = hi - lo;
    rem_.resize(len);
    fac_.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      rem_[i] = lo + i;
      fac_[i].n = lo + i;
      fac_[i].count = 0;
    }
    for (std::uint64_t p : small_) {
      if (p * p >= hi) break;
      for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
        const std::size_t i = m - lo;
        std::uint8_t a = 0;
        do {
          rem_[i] /= p;
          ++a;
        } while (rem_[i] % p == 0);
        Factored& f = fac_[i];
        f.p[f.count] = static_cast<std::uint32_t>(p);
        f.e[f.count] = a;
        ++f.count;
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      Factored& f = fac_[i];
      if (rem_[i] > 1) {
        f.p[f.count] = static_cast<std::uint32_t>(rem_[i]);
        f.e[f.count] = 1;
        ++f.count;
      }
      visit(f);
    }
  }

 private:
  const std::vector<std::uint64_t>& small_;
  std::vector<std::uint64_t> rem_;
  std::vector<Factored> fac_;
};

void fill_divisors(const Factored& f, std::vector<std::uint64_t>& out) {
  out.assign(1, 1);
  for (int k = 0; k < f.count; ++k) {
    const std::size_t prev = out.size();
    std::uint64_t pk = 1;
    for (int j = 0; j < f.e[k]; ++j) {
      pk *= f.p[k];
      for (std::size_t i = 0; i < prev; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<std::uint64_t> checkpoints(std::uint64_t x) {
  std::vector<std::uint64_t> c;
  for (std::uint64_t p = 1; p < x; p *= 10) c.push_back(p);
  c.push_back(x);
  return c;
}

struct ChunkResult {
  bool done = false;
  long double total = 0;
  // (checkpoint, partial sum of this chunk up to and including it)
  std::vector<std::pair<std::uint64_t, long double>> marks;
  std::uint64_t skipped_zero = 0;
  std::uint64_t failures = 0;
};

// Runs term(n) over chunks of [1, x] and assembles the checkpoint table.
template <class ChunkBody>
GrowthTable drive(const SumJob& job, ChunkBody&& body) {
  if (job.x < 1) throw ConfigError("x must be >= 1");
  if (job.chunk < 1) throw ConfigError("chunk must be >= 1");
  const std::uint64_t x = job.x;
  const std::uint64_t n_chunks = (x + job.chunk - 1) / job.chunk;
  const auto marks = checkpoints(x);
  std::vector<ChunkResult> results(n_chunks);
  const bool budgeted = job.time_budget > 0;
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(budgeted ? job.time_budget : 0.0));
  std::atomic<bool> expired{false};
  parallel_chunks(n_chunks, job.threads, [&](std::size_t c) {
    if (budgeted && (expired || Clock::now() > deadline)) {
      expired = true;
      return;
    }
    const std::uint64_t lo = 1 + c * job.chunk;
    const std::uint64_t hi = std::min(x + 1, lo + job.chunk);
    ChunkResult& r = results[c];
    auto next = std::lower_bound(marks.begin(), marks.end(), lo);
    body(lo, hi, r, [&](std::uint64_t n) {
      if (next != marks.end() && *next == n) {
        r.marks.emplace_back(n, r.total);
        ++next;
      }
    });
    r.done = true;
  });

  GrowthTable t;
  long double running = 0;
  std::uint64_t reached = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const ChunkResult& r = results[c];
    if (!r.done) {
      t.truncated = true;
      break;
    }
    for (const auto& [n, partial] : r.marks) t.rows.push_back(make_row(n, running + partial));
    running += r.total;
    t.skipped_zero += r.skipped_zero;
    t.failures += r.failures;
    reached = std::min(x, (c + 1) * job.chunk);
  }
  if (t.truncated && reached > 0 && (t.rows.empty() || t.rows.back().x != reached)) {
    t.rows.push_back(make_row(reached, running));
  }
  t.caveat =
      "normalized columns are tabulated, not fitted; log log x varies too little at this "
      "scale to separate growth exponents";
  return t;
}

std::vector<std::uint64_t> sieving_primes(std::uint64_t x) {
  const auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x))) + 2;
  return arith::primes_in_range(2, r + 1).primes;
}

}  // namespace

GrowthRow make_row(std::uint64_t x, long double sum) {
  GrowthRow r;
  r.x = x;
  r.sum = sum;
  r.per_x = static_cast<double>(sum / x);
  const double ll = x > 1 ? std::log(std::log(static_cast<double>(x))) : 0.0;
  for (int i = 0; i < 4; ++i) {
    r.normalized[i] = ll > 0 ? static_cast<double>(sum / x) / std::pow(ll, kGrowthExponents[i]) : 0.0;
  }
  return r;
}

Weight weight_from_name(const std::string& name) {
  if (name == "one") return {name, [](std::uint64_t, int) { return 1.0; }};
  if (name == "squarefree" || name == "mu2") {
    return {"squarefree", [](std::uint64_t, int a) { return a == 1 ? 1.0 : 0.0; }};
  }
  if (name == "zero") return {name, [](std::uint64_t, int) { return 0.0; }};
  if (name == "tau") return {name, [](std::uint64_t, int a) { return a + 1.0; }};
  throw ConfigError("unknown weight '" + name + "' (one, squarefree, zero, tau)");
}

Weight weight_from_rules(std::vector<WeightRule> rules, std::string name) {
  for (const auto& r : rules) {
    if (!(r.value >= 0)) throw ConfigError("weight must be nonnegative at every prime power");
  }
  return {std::move(name), [rules = std::move(rules)](std::uint64_t p, int a) {
            for (const auto& r : rules) {
              if ((r.prime == 0 || r.prime == p) && (r.exponent == 0 || r.exponent == a)) {
                return r.value;
              }
            }
            return 1.0;
          }};
}

Polynomial::Polynomial(std::vector<std::int64_t> coefficients) : coeffs_(std::move(coefficients)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0);
}

Polynomial Polynomial::parse(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw ConfigError("empty polynomial");
  std::vector<std::int64_t> c;
  std::size_t i = 0;
  auto fail = [&] { throw ConfigError("cannot parse polynomial '" + text + "'"); };
  auto read_int = [&](std::int64_t& out) {
    const std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start || i - start > 18) fail();
    out = std::stoll(s.substr(start, i - start));
  };
  while (i < s.size()) {
    std::int64_t sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (i != 0) {
      fail();
    }
    std::int64_t coef = 1;
    bool has_coef = false;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      read_int(coef);
      has_coef = true;
      if (i < s.size() && s[i] == '*') ++i;
    }
    int power = 0;
    if (i < s.size() && (s[i] == 'x' || s[i] == 'X' || s[i] == 'n')) {
      ++i;
      power = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::int64_t e = 0;
        read_int(e);
        if (e > 64) fail();
        power = static_cast<int>(e);
      }
    } else if (!has_coef) {
      fail();
    }
    if (c.size() <= static_cast<std::size_t>(power)) c.resize(power + 1, 0);
    c[power] += sign * coef;
  }
  Polynomial p(std::move(c));
  if (p.degree() < 1) throw ConfigError("polynomial must be non-constant");
  return p;
}

std::optional<std::uint64_t> Polynomial::abs_value(std::uint64_t n, std::uint64_t bound) const {
  __int128 acc = 0;
  long double approx = 0;
  const long double nn = static_cast<long double>(n);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    approx = approx * nn + static_cast<long double>(*it);
    if (std::fabs(approx) > 1e36L) return std::nullopt;
    acc = acc * static_cast<__int128>(n) + *it;
  }
  if (acc < 0) acc = -acc;
  if (acc > static_cast<__int128>(bound)) return std::nullopt;
  return static_cast<std::uint64_t>(acc);
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const std::int64_t a = coeffs_[k];
    if (a == 0 && !(k == 0 && first)) continue;
    const std::uint64_t mag = a < 0 ? 0 - static_cast<std::uint64_t>(a) : static_cast<std::uint64_t>(a);
    if (first) {
      if (a < 0) os << '-';
    } else {
      os << (a < 0 ? '-' : '+');
    }
    if (mag != 1 || k == 0) os << mag;
    if (k >= 1) os << 'x';
    if (k >= 2) os << '^' << k;
    first = false;
  }
  return os.str();
}

GrowthTable sum_delta(const SumJob& job) {
  if (job.x > kMaxSumLimit) throw ConfigError("x exceeds the bulk limit 10^9");
  const auto small = sieving_primes(job.x);
  return drive(job, [&](std::uint64_t lo, std::uint64_t hi, ChunkResult& r, auto&& mark) {
    SegmentFactorizer seg(small);
    std::vector<std::uint64_t> divs;
    seg.run(lo, hi, [&](const Factored& f) {
      fill_divisors(f, divs);
      r.total += static_cast<long double>(delta::delta_max_sorted(divs));
      mark(f.n);
    });
  });
}

GrowthTable sum_delta_weighted_table(const SumJob& job) {
  if (job.x > kMaxSumLimit) throw ConfigError("x exceeds the bulk limit 10^9");
  if (!job.weight.g) throw ConfigError("weighted mode needs a weight");
  const auto small = sieving_primes(job.x);
  return drive(job, [&](std::uint64_t lo, std::uint64_t hi, ChunkResult& r, auto&& mark) {
    SegmentFactorizer seg(small);
    std::vector<std::uint64_t> divs;
    seg.run(lo, hi, [&](const Factored& f) {
      double g = 1.0;
      for (int k = 0; k < f.count && g != 0.0; ++k) {
        const double gk = job.weight.g(f.p[k], f.e[k]);
        if (!(gk >= 0)) {
          throw ConfigError("weight '" + job.weight.name + "' is negative at " +
                            std::to_string(f.p[k]) + "^" + std::to_string(f.e[k]));
        }
        g *= gk;
      }
      if (g != 0.0) {
        fill_divisors(f, divs);
        r.total += static_cast<long double>(g) *
                   static_cast<long double>(delta::delta_max_sorted(divs));
      }
      mark(f.n);
    });
  });
}

long double sum_delta_weighted(const SumJob& job) {
  const GrowthTable t = sum_delta_weighted_table(job);
  if (t.truncated) throw ResourceError("weighted sum exceeded its time budget");
  return t.rows.back().sum;
}

std::uint64_t delta_of(std::uint64_t n) {
  if (n == 0) return 0;
  const auto f = arith::factorize(n);
  const auto d = arith::divisors(f);
  return delta::delta_max_sorted(d);
}

GrowthTable sum_delta_poly(const SumJob& job) {
  if (job.poly.degree() < 1) throw ConfigError("polynomial mode needs a non-constant F");
  if (job.x > kMaxSumLimit) throw ConfigError("x exceeds the bulk limit 10^9");
  GrowthTable t = drive(job, [&](std::uint64_t lo, std::uint64_t hi, ChunkResult& r,
                                 auto&& mark) {
    for (std::uint64_t n = lo; n < hi; ++n) {
      const auto v = job.poly.abs_value(n, kPolyValueBudget);
      if (!v) {
        ++r.failures;
      } else if (*v == 0) {
        ++r.skipped_zero;
      } else {
        try {
          r.total += static_cast<long double>(delta_of(*v));
        } catch (const Error&) {
          ++r.failures;
        }
      }
      mark(n);
    }
  });
  if (t.failures * 1000 > job.x) {
    throw Error("more than 0.1% of polynomial values could not be handled (" +
                std::to_string(t.failures) + " of " + std::to_string(job.x) + ")");
  }
  return t;
}

GrowthTable run(const SumJob& job) {
  switch (job.mode) {
    case SumMode::plain:
      return sum_delta(job);
    case SumMode::weighted:
      return sum_delta_weighted_table(job);
    case SumMode::polynomial:
      return sum_delta_poly(job);
  }
  throw ConfigError("unknown sum mode");
}

long double exact_expectation_small(double x) {
  if (!(x >= 2.0)) throw ConfigError("exact_expectation_small needs x >= 2");
  const auto hi = static_cast<std::uint64_t>(std::ceil(x));
  if (hi > 1000) throw ResourceError("support too large for full enumeration");
  const auto primes = arith::primes_in_range(2, std::max<std::uint64_t>(hi, 2)).primes;
  if (primes.size() > 8) throw ResourceError("more than 8 primes below x; support too large");
  long double norm = 1, total = 0;
  for (auto p : primes) norm *= static_cast<long double>(p) / (p + 1);
  const std::size_t m = primes.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::uint64_t n = 1;
    for (std::size_t k = 0; k < m; ++k) {
      if (mask >> k & 1) n *= primes[k];
    }
    total += static_cast<long double>(delta_of(n)) / static_cast<long double>(n);
  }
  return norm * total;
}

}  // namespace delta_lab::bulk
