#pragma once

// Moments M_q(n) = ∫ Delta(n, u)^q du, the cross terms
// N_{j,q}(n, p) = ∫ Delta(n, u)^j Delta(n, u - log p)^{q-j} du, W_q(n, p), and
// the finite-support estimator S_q(x). All integrals are exact event sweeps.

#include <cstdint>
#include <vector>

#include "delta_lab/arith.hpp"
#include "delta_lab/delta.hpp"
#include "delta_lab/et_sets.hpp"

namespace delta_lab::moments {

inline constexpr int kMaxMomentOrder = 64;
// Relative slack for the floating-point side of inequality checks.
inline constexpr long double kRelTol = 1e-9L;

struct MomentVector {
  arith::FactoredInteger n;
  int q_max = 0;
  // values[q] = M_q(n) for 1 <= q <= q_max; values[0] is unused.
  std::vector<long double> values;
};

long double moment(const delta::DivisorLogProfile& profile, int q);
long double moment(const arith::FactoredInteger& n, int q);
MomentVector moment_vector(const arith::FactoredInteger& n, int q_max);

// p must be a prime not dividing n; 0 <= j <= q.
long double cross_moment(const arith::FactoredInteger& n, std::uint64_t p, int j, int q);

// sum_{1 <= j <= q/2} binom(q, j) N_{j,q}(n, p), q >= 2.
long double w_term(const arith::FactoredInteger& n, std::uint64_t p, int q);

struct InductiveReport {
  long double lhs = 0;  // 2 M_q(n)
  long double mid = 0;  // M_q(np)
  long double rhs = 0;  // 2 M_q(n) + 2 W_q(n, p)
  bool pass = false;
};

InductiveReport check_inductive_inequality(const arith::FactoredInteger& n, std::uint64_t p,
                                           int q);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// prod_{p<x} (1+1/p)^{-1} * sum over squarefree n with all primes < x and
// n in E_{q-1,T} of M_q(n) / (n tau(n)). Enumerates the support depth-first,
// pruning at non-members (the sets are divisor-closed).
long double sq_estimator(std::uint64_t x, int q, const et::EtParams& params,
                         std::uint64_t node_budget = kDefaultEnumerationBudget);

}  // namespace delta_lab::moments
