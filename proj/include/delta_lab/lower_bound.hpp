#pragma once

// Inequalities linking Delta(n) to the split n = a b into its y-smooth part
// a = n_y and the rough part b.

#include <cstdint>
#include <vector>

#include "delta_lab/arith.hpp"

namespace delta_lab::lower_bound {

struct SplitReport {
  arith::FactoredInteger n, a, b;
  double y = 0;
  double v = 0;
  std::uint64_t tau_a = 0;
  std::uint64_t delta_v_b = 0;
  std::uint64_t lhs = 0;  // Delta(n)
  double rhs_33 = 0;      // tau(a) Delta_v(b) / (1 + 2v)
  double ratio_32 = 0;    // Delta(n) log(a y) / (tau(a) D_y(b))
  // False when v < log a or n is not squarefree with P+(n) >= y.
  bool applicable = false;
  bool pass = false;  // lhs >= rhs_33 (only meaningful when applicable)
};

SplitReport check_pigeonhole(const arith::FactoredInteger& n, double y, double v);

// Delta(n) log(a y) / (tau(a) D_y(b)).
double ratio_32(const arith::FactoredInteger& n, double y);

struct RatioSummary {
  std::size_t count = 0;
  double min = 0;
  double median = 0;
  double max = 0;
};

RatioSummary ratio_32_scan(const std::vector<arith::FactoredInteger>& sample, double y);

struct ChainReport {
  double autocorrelation = 0;  // sum max(0, v - |log(d'/d)|)
  std::uint64_t pair_count = 0;
  std::uint64_t tau = 0;
  std::uint64_t delta_v = 0;
  bool first = false;   // autocorrelation <= v * pair_count
  bool second = false;  // pair_count <= 2 tau Delta_v
};

ChainReport check_pair_chain(const arith::FactoredInteger& b, double v);

struct EnergyShapeReport {
  double short_range = 0;  // ∫_0^{1/(nu log y)} |tau(b, t)|^2 dt / tau(b)
  double long_range = 0;   // ∫_0^{1/log y} |tau(b, t)|^2 dt / tau(b)
  bool pass = false;       // short_range >= long_range / (3 nu)
};

EnergyShapeReport check_energy_shape(const arith::FactoredInteger& b, double y, double nu);

}  // namespace delta_lab::lower_bound
