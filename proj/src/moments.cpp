#include "delta_lab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "delta_lab/error.hpp"

namespace delta_lab::moments {

namespace {

using arith::FactoredInteger;
using delta::DivisorLogProfile;
using delta::StepFunction;

void check_order(int q) {
  if (q < 1 || q > kMaxMomentOrder) {
    throw ConfigError("moment order must lie in [1, " + std::to_string(kMaxMomentOrder) + "]");
  }
}

void check_coprime_prime(const FactoredInteger& n, std::uint64_t p) {
  if (!arith::is_prime_u64(p)) throw ConfigError(std::to_string(p) + " is not prime");
  if (n.divides_by(p)) throw ConfigError(std::to_string(p) + " divides n");
}

class CompensatedSum {
 public:
  void add(long double term) {
    const long double t = sum_ + term;
    comp_ += (std::fabs(sum_) >= std::fabs(term)) ? (sum_ - t) + term : (term - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

// ∫ f^j g^k over the merged partition, 0^0 = 1 inside the union of supports.
long double integrate_product(const StepFunction& f, const StepFunction& g, int j, int k) {
  std::vector<long double> bp;
  std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
             g.breakpoints().end(), std::back_inserter(bp));
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const auto fv = static_cast<long double>(f(bp[i]));
    const auto gv = static_cast<long double>(g(bp[i]));
    const long double term = std::pow(fv, j) * std::pow(gv, k) * (bp[i + 1] - bp[i]);
    if (!std::isfinite(term)) throw RangeError("cross moment term overflows");
    sum.add(term);
  }
  return sum.value();
}

}  // namespace

long double moment(const DivisorLogProfile& profile, int q) {
  check_order(q);
  return delta::delta_step_function(profile).integral_power(q);
}

long double moment(const FactoredInteger& n, int q) {
  check_order(q);
  return moment(DivisorLogProfile::build(n), q);
}

MomentVector moment_vector(const FactoredInteger& n, int q_max) {
  check_order(q_max);
  const StepFunction f = delta::delta_step_function(DivisorLogProfile::build(n));
  MomentVector mv{n, q_max, std::vector<long double>(static_cast<std::size_t>(q_max) + 1, 0)};
  for (int q = 1; q <= q_max; ++q) mv.values[static_cast<std::size_t>(q)] = f.integral_power(q);
  return mv;
}

long double cross_moment(const FactoredInteger& n, std::uint64_t p, int j, int q) {
  check_order(q);
  if (j < 0 || j > q) throw ConfigError("cross_moment needs 0 <= j <= q");
  check_coprime_prime(n, p);
  const StepFunction f = delta::delta_step_function(DivisorLogProfile::build(n));
  // u -> Delta(n, u - log p) is f moved right by log p.
  const StepFunction g = f.translated(std::log(static_cast<long double>(p)));
  return integrate_product(f, g, j, q - j);
}

long double w_term(const FactoredInteger& n, std::uint64_t p, int q) {
  check_order(q);
  if (q < 2) throw ConfigError("w_term needs q >= 2");
  check_coprime_prime(n, p);
  const StepFunction f = delta::delta_step_function(DivisorLogProfile::build(n));
  const StepFunction g = f.translated(std::log(static_cast<long double>(p)));
  long double total = 0;
  long double binom = 1;  // binom(q, j)
  for (int j = 1; 2 * j <= q; ++j) {
    binom = binom * (q - j + 1) / j;
    total += binom * integrate_product(f, g, j, q - j);
  }
  return total;
}

InductiveReport check_inductive_inequality(const FactoredInteger& n, std::uint64_t p, int q) {
  if (q < 2) throw ConfigError("check_inductive_inequality needs q >= 2");
  InductiveReport r;
  const long double mq = moment(n, q);
  r.lhs = 2 * mq;
  r.mid = moment(n.times_prime(p), q);
  r.rhs = 2 * mq + 2 * w_term(n, p, q);
  r.pass = r.lhs <= r.mid * (1 + kRelTol) && r.mid <= r.rhs * (1 + kRelTol);
  return r;
}

long double sq_estimator(std::uint64_t x, int q, const et::EtParams& params,
                         std::uint64_t node_budget) {
  check_order(q);
  params.validate();
  (void)params.theta(std::max(q - 1, 1));  // configuration check up front

  std::vector<std::uint64_t> primes;
  if (x > 2) primes = arith::primes_in_range(2, x).primes;

  long double normalizer = 1;
  for (auto p : primes) normalizer /= 1 + 1.0L / static_cast<long double>(p);

  CompensatedSum sum;
  std::uint64_t nodes = 0;
  std::vector<std::uint64_t> current;
  // Depth-first over squarefree n in increasing-prime order.
  auto visit = [&](auto&& self, std::size_t start, long double inv_n) -> void {
    if (++nodes > node_budget) {
      throw ResourceError("sq_estimator: enumeration exceeded " + std::to_string(node_budget) +
                          " nodes");
    }
    const FactoredInteger f = FactoredInteger::from_primes(current);
    if (!et::in_E_q_T(f, q - 1, params)) return;
    const DivisorLogProfile profile = DivisorLogProfile::build(f);
    sum.add(moment(profile, q) / static_cast<long double>(f.tau()) * inv_n);
    for (std::size_t k = start; k < primes.size(); ++k) {
      current.push_back(primes[k]);
      self(self, k + 1, inv_n / static_cast<long double>(primes[k]));
      current.pop_back();
    }
  };
  visit(visit, 0, 1.0L);
  return normalizer * sum.value();
}

}  // namespace delta_lab::moments
