#pragma once

// Divisor Dirichlet polynomial tau(n, theta) = sum_{d|n} d^{i theta} and the
// energy integrals built from |tau(n, theta)|^2 / tau(n).

#include <complex>
#include <cstdint>
#include <string>

#include "delta_lab/arith.hpp"

namespace delta_lab::fourier {

struct DirichletEval {
  arith::FactoredInteger n;
  double theta = 0;
  std::complex<double> value;
  double norm_sq_over_tau = 0;
};

// Product form over prime powers; never enumerates divisors.
DirichletEval tau_theta(const arith::FactoredInteger& f, double theta);

enum class QuadratureMethod { exact_expansion, adaptive };

struct QuadratureResult {
  double value = 0;
  double abs_error_estimate = 0;
  std::uint64_t evaluations = 0;
  QuadratureMethod method = QuadratureMethod::exact_expansion;
  // Non-fatal precondition warning (e.g. a prime of b below y).
  std::string warning;
};

// Cosine expansion size prod_p (2 a_p + 1) up to which the exact route is used.
inline constexpr std::uint64_t kMaxExpansionTerms = 1'594'323;  // 3^13
inline constexpr double kQuadratureTolerance = 1e-8;

// ∫_0^upper |tau(b, scale * t)|^2 / tau(b) dt.
QuadratureResult energy_exact(const arith::FactoredInteger& b, double scale, double upper);
QuadratureResult energy_adaptive(const arith::FactoredInteger& b, double scale, double upper,
                                 double abs_tol = kQuadratureTolerance,
                                 int max_subdivisions = 50'000);
// Exact expansion when small enough, adaptive quadrature otherwise.
QuadratureResult energy_integral(const arith::FactoredInteger& b, double scale, double upper);

// D_y(b) = ∫_0^1 |tau(b, t / log y)|^2 / tau(b) dt, y >= 2.
QuadratureResult d_y(const arith::FactoredInteger& b, double y);

struct ParsevalReport {
  double lhs = 0;    // M_2(n) / tau(n)
  double rhs = 0;    // ∫_0^1 |tau(n, t)|^2 / tau(n) dt
  double ratio = 0;  // lhs / rhs
};

ParsevalReport parseval_ratio(const arith::FactoredInteger& n);

struct CosineSumReport {
  double psi = 0;
  double y = 0;
  double sum = 0;    // sum_{p <= y} cos(psi log p) / p
  double model = 0;  // log(log y / (1 + psi log y))
  double deviation = 0;
};

CosineSumReport cosine_sum_check(double psi, double y);
// Reuses a prime table covering [2, y].
CosineSumReport cosine_sum_check(double psi, double y, const arith::PrimeRange& primes);

}  // namespace delta_lab::fourier
