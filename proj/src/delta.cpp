#include "delta_lab/delta.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "delta_lab/error.hpp"
#include "delta_lab/kernels.hpp"

namespace delta_lab::delta {

namespace {

using arith::FactoredInteger;

constexpr long double kE = 2.718281828459045235360287471352662498L;

class MpfrVar {
 public:
  explicit MpfrVar(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~MpfrVar() { mpfr_clear(v_); }
  MpfrVar(const MpfrVar&) = delete;
  MpfrVar& operator=(const MpfrVar&) = delete;
  mpfr_ptr get() noexcept { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace

bool scaled_less(const mpz_class& hi, const mpz_class& lo, long double v) {
  for (mpfr_prec_t prec = 256; prec <= (1 << 18); prec *= 4) {
    MpfrVar scaled(prec), diff(prec);
    mpfr_set_ld(scaled.get(), v, MPFR_RNDN);
    mpfr_exp(scaled.get(), scaled.get(), MPFR_RNDN);
    mpfr_mul_z(scaled.get(), scaled.get(), lo.get_mpz_t(), MPFR_RNDN);
    mpfr_sub_z(diff.get(), scaled.get(), hi.get_mpz_t(), MPFR_RNDN);
    if (mpfr_zero_p(diff.get())) continue;
    // Accumulated rounding is a few ulps of `scaled`.
    if (mpfr_get_exp(diff.get()) > mpfr_get_exp(scaled.get()) - prec + 8) {
      return mpfr_sgn(diff.get()) > 0;
    }
  }
  throw NumericError("scaled_less: comparison undecided at maximum precision", 0.0, 0.0);
}

bool scaled_less(std::uint64_t hi, std::uint64_t lo, long double v) {
  mpz_class h, l;
  mpz_import(h.get_mpz_t(), 1, -1, sizeof hi, 0, 0, &hi);
  mpz_import(l.get_mpz_t(), 1, -1, sizeof lo, 0, 0, &lo);
  return scaled_less(h, l, v);
}

// ---------------------------------------------------------------------------
// DivisorLogProfile

DivisorLogProfile DivisorLogProfile::build(const FactoredInteger& f, std::uint64_t budget) {
  if (f.tau() > budget) {
    throw ResourceError("divisor count " + std::to_string(f.tau()) + " exceeds budget " +
                        std::to_string(budget));
  }
  DivisorLogProfile p;
  p.n_ = f;
  const std::size_t tau = f.tau();
  const bool small = f.fits_u64();

  // Generation order index == mixed-radix exponent code.
  std::vector<long double> logs{0.0L};
  std::vector<std::uint64_t> values;
  logs.reserve(tau);
  if (small) {
    values.reserve(tau);
    values.push_back(1);
  }
  for (const auto& [prime, e] : f.factors()) {
    const std::size_t prev = logs.size();
    const long double lp = std::log(static_cast<long double>(prime));
    std::uint64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      if (small) pk *= prime;
      for (std::size_t i = 0; i < prev; ++i) {
        logs.push_back(logs[i] + k * lp);
        if (small) values.push_back(values[i] * pk);
      }
    }
  }

  std::vector<std::uint32_t> order(tau);
  std::iota(order.begin(), order.end(), 0u);
  if (small) {
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
  } else {
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return logs[a] < logs[b]; });
  }

  p.logs_.resize(tau);
  p.codes_ = order;
  if (small) p.divisors_.resize(tau);
  for (std::size_t i = 0; i < tau; ++i) {
    if (small) {
      p.divisors_[i] = values[order[i]];
      p.logs_[i] = std::log(static_cast<long double>(p.divisors_[i]));
    } else {
      p.logs_[i] = logs[order[i]];
    }
  }
  return p;
}

mpz_class DivisorLogProfile::divisor_big(std::size_t i) const {
  if (!divisors_.empty()) {
    mpz_class out;
    const std::uint64_t d = divisors_.at(i);
    mpz_import(out.get_mpz_t(), 1, -1, sizeof d, 0, 0, &d);
    return out;
  }
  std::uint32_t code = codes_.at(i);
  mpz_class out = 1;
  for (const auto& [prime, e] : n_.factors()) {
    const auto radix = static_cast<std::uint32_t>(e) + 1;
    const auto k = code % radix;
    code /= radix;
    if (k > 0) {
      mpz_class pk;
      mpz_ui_pow_ui(pk.get_mpz_t(), prime, k);
      out *= pk;
    }
  }
  return out;
}

bool DivisorLogProfile::gap_less(std::size_t i, std::size_t j, long double v) const {
  const long double gap = logs_[j] - logs_[i];
  if (std::fabs(gap - v) > kTieGuard) return gap < v;
  if (!divisors_.empty()) return scaled_less(divisors_[j], divisors_[i], v);
  return scaled_less(divisor_big(j), divisor_big(i), v);
}

DivisorLogProfile delta_profile(const FactoredInteger& f) { return DivisorLogProfile::build(f); }

// ---------------------------------------------------------------------------
// StepFunction

StepFunction::StepFunction(std::vector<long double> breakpoints,
                           std::vector<std::uint64_t> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty() ? !breakpoints_.empty() && breakpoints_.size() != 1
                      : breakpoints_.size() != values_.size() + 1) {
    throw ConfigError("StepFunction: need one more breakpoint than values");
  }
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end())) {
    throw ConfigError("StepFunction: breakpoints must be sorted");
  }
  canonicalize();
}

void StepFunction::canonicalize() {
  // Input pieces are contiguous; drop empty ones and merge equal neighbours.
  std::vector<long double> bp;
  std::vector<std::uint64_t> vals;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(breakpoints_[i + 1] > breakpoints_[i])) continue;
    if (!vals.empty() && vals.back() == values_[i]) {
      bp.back() = breakpoints_[i + 1];
      continue;
    }
    if (vals.empty()) bp.push_back(breakpoints_[i]);
    vals.push_back(values_[i]);
    bp.push_back(breakpoints_[i + 1]);
  }
  std::size_t first = 0, last = vals.size();
  while (first < last && vals[first] == 0) ++first;
  while (last > first && vals[last - 1] == 0) --last;
  if (first == last) {
    breakpoints_.clear();
    values_.clear();
    return;
  }
  values_.assign(vals.begin() + static_cast<std::ptrdiff_t>(first),
                 vals.begin() + static_cast<std::ptrdiff_t>(last));
  breakpoints_.assign(bp.begin() + static_cast<std::ptrdiff_t>(first),
                      bp.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

StepFunction StepFunction::from_intervals(std::span<const long double> starts,
                                          std::span<const long double> ends) {
  if (starts.size() != ends.size()) throw ConfigError("from_intervals: size mismatch");
  std::vector<std::pair<long double, int>> events;
  events.reserve(2 * starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    if (!(ends[k] > starts[k])) continue;
    events.emplace_back(starts[k], +1);
    events.emplace_back(ends[k], -1);
  }
  std::sort(events.begin(), events.end());
  std::vector<long double> bp;
  std::vector<std::uint64_t> vals;
  std::int64_t level = 0;
  for (std::size_t k = 0; k < events.size();) {
    const long double pos = events[k].first;
    while (k < events.size() && events[k].first == pos) level += events[k++].second;
    bp.push_back(pos);
    vals.push_back(static_cast<std::uint64_t>(level));
  }
  if (!vals.empty()) vals.pop_back();  // level after the last event is 0
  return StepFunction(std::move(bp), std::move(vals));
}

std::uint64_t StepFunction::operator()(long double u) const {
  if (values_.empty() || u < breakpoints_.front() || !(u < breakpoints_.back())) return 0;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

std::uint64_t StepFunction::max_value() const noexcept {
  return values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end());
}

long double StepFunction::integral_power(int q) const {
  if (q < 0) throw ConfigError("integral_power: q must be >= 0");
  // Neumaier-compensated sum of value^q * length.
  long double sum = 0, comp = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const long double len = breakpoints_[i + 1] - breakpoints_[i];
    const long double term = std::pow(static_cast<long double>(values_[i]), q) * len;
    if (!std::isfinite(term)) throw RangeError("integral_power: value^q overflows");
    const long double t = sum + term;
    comp += (std::fabs(sum) >= std::fabs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

StepFunction StepFunction::translated(long double shift) const {
  StepFunction out = *this;
  for (auto& b : out.breakpoints_) b += shift;
  return out;
}

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
  std::vector<long double> bp;
  bp.reserve(a.breakpoints_.size() + b.breakpoints_.size());
  std::merge(a.breakpoints_.begin(), a.breakpoints_.end(), b.breakpoints_.begin(),
             b.breakpoints_.end(), std::back_inserter(bp));
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<std::uint64_t> vals;
  if (bp.size() >= 2) {
    vals.resize(bp.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) vals[i] = a(bp[i]) + b(bp[i]);
  } else {
    bp.clear();
  }
  return StepFunction(std::move(bp), std::move(vals));
}

bool StepFunction::approx_equal(const StepFunction& other, long double tol) const {
  // Pieces shorter than tol are rounding artefacts of nearly coincident
  // breakpoints; drop them before comparing.
  auto coarse = [tol](const StepFunction& f) {
    std::vector<long double> bp;
    std::vector<std::uint64_t> vals;
    for (std::size_t i = 0; i < f.values_.size(); ++i) {
      if (f.breakpoints_[i + 1] - f.breakpoints_[i] < tol) {
        if (!vals.empty()) bp.back() = f.breakpoints_[i + 1];
        continue;
      }
      if (vals.empty()) bp.push_back(f.breakpoints_[i]);
      vals.push_back(f.values_[i]);
      bp.push_back(f.breakpoints_[i + 1]);
    }
    return StepFunction(std::move(bp), std::move(vals));
  };
  const StepFunction x = coarse(*this);
  const StepFunction y = coarse(other);
  if (x.values_ != y.values_) return false;
  for (std::size_t i = 0; i < x.breakpoints_.size(); ++i) {
    if (std::fabs(x.breakpoints_[i] - y.breakpoints_[i]) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Window functions

StepFunction delta_step_function(const DivisorLogProfile& p, long double shift,
                                 long double window) {
  if (!(window > 0)) throw ConfigError("delta_step_function: window must be > 0");
  std::vector<long double> starts(p.size()), ends(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    ends[i] = p.logs()[i] - shift;
    starts[i] = ends[i] - window;
  }
  return StepFunction::from_intervals(starts, ends);
}

std::uint64_t delta_max(const DivisorLogProfile& p, long double window) {
  if (!(window > 0)) throw ConfigError("delta_max: window must be > 0");
  // The max is attained just below some log d_i: count d_j in [d_i, d_i e^v).
  const std::size_t n = p.size();
  std::size_t best = 0, end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max(end, i + 1);
    while (end < n && p.gap_less(i, end, window)) ++end;
    best = std::max(best, end - i);
  }
  return best;
}

std::uint64_t pair_count_T0(const DivisorLogProfile& p, long double v) {
  if (!(v > 0)) throw ConfigError("pair_count_T0: v must be > 0");
  // No ties: log(d'/d) = v would make e^v rational.
  const std::size_t n = p.size();
  std::uint64_t upper = 0;
  std::size_t end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max(end, i + 1);
    while (end < n && p.gap_less(i, end, v)) ++end;
    upper += end - i - 1;
  }
  return n + 2 * upper;
}

double autocorrelation_integral(const DivisorLogProfile& p, long double v) {
  if (!(v > 0)) throw ConfigError("autocorrelation_integral: v must be > 0");
  std::vector<double> logs(p.logs().begin(), p.logs().end());
  return kernels::overlap_sum(logs, static_cast<double>(v));
}

std::uint64_t delta_max_sorted(std::span<const std::uint64_t> d) {
  const std::size_t n = d.size();
  std::size_t best = 0, end = 0;
  for (std::size_t i = 0; i < n; ++i) {
    end = std::max(end, i + 1);
    const long double threshold = static_cast<long double>(d[i]) * kE;
    while (end < n) {
      const long double dj = static_cast<long double>(d[end]);
      const bool inside = std::fabs(dj - threshold) > kTieGuard * threshold
                              ? dj < threshold
                              : scaled_less(d[end], d[i], 1.0L);
      if (!inside) break;
      ++end;
    }
    best = std::max(best, end - i);
  }
  return best;
}

}  // namespace delta_lab::delta
