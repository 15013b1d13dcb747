#pragma once

// Membership predicates for the nested sets of squarefree integers
//   E_{q,T} ⊆ ... ⊆ E_T* ⊆ E_T ⊆ E = {n : mu(n)^2 = 1}
// and the shaping exponent f_T.

#include <optional>
#include <vector>

#include "delta_lab/arith.hpp"

namespace delta_lab::et {

// 1 / (log 4 - 1).
double b_const() noexcept;

struct EtParams {
  double T = 3.0;
  double delta = 0.01;
  // Constant of the closed-form theta sequence.
  double c0 = 1.0;
  // Explicit theta_{j,T}, indexed by j; empty selects the closed form.
  std::vector<double> theta_seq;

  // Throws ConfigError unless T >= 3 and delta > 0.
  void validate() const;
  // theta_{j,T}. Closed form: j!/j^2 (2 pi^2 c0 / 3)^{j-1} T^{j-1} (log T)^{(j-1)/2},
  // with theta_0 = theta_1 = 1. Throws ConfigError past an explicit sequence.
  double theta(int j) const;
};

// delta * min(log(T log 3y), (log log 3y - b log T)^2 / log T), for y >= 1.
double f_T(double y, const EtParams& params);

// Right-hand side T (log 3y) e^{-f_T(y)} of the E_T condition.
double et_bound(double y, const EtParams& params);

struct EtResult {
  bool member = false;
  // A y >= 1 with tau(n_y) > T (log 3y) e^{-f_T(y)}, when one exists.
  std::optional<double> witness_y;
};

EtResult in_E_T(const arith::FactoredInteger& f, const EtParams& params);
bool in_E_T_star(const arith::FactoredInteger& f, const EtParams& params);
// For q <= 1 this is in_E_T_star.
bool in_E_q_T(const arith::FactoredInteger& f, int q, const EtParams& params);

struct MembershipReport {
  arith::FactoredInteger n;
  bool in_E = false;
  bool in_ET = false;
  bool in_ETstar = false;
  // in_EqT[q] for 0 <= q <= q_max.
  std::vector<bool> in_EqT;
  std::optional<double> witness_y;
};

MembershipReport membership_report(const arith::FactoredInteger& f, int q_max,
                                   const EtParams& params);

}  // namespace delta_lab::et
