#include "delta_lab/lower_bound.hpp"

#include <algorithm>
#include <cmath>

#include "delta_lab/delta.hpp"
#include "delta_lab/error.hpp"
#include "delta_lab/fourier.hpp"

namespace delta_lab::lower_bound {

namespace {
constexpr double kTol = 1e-9;
}

SplitReport check_pigeonhole(const arith::FactoredInteger& n, double y, double v) {
  if (!(v > 0)) throw ConfigError("window width v must be positive");
  SplitReport r;
  r.n = n;
  r.y = y;
  r.v = v;
  auto [a, b] = arith::smooth_part(n, y);
  r.a = a;
  r.b = b;
  r.tau_a = a.tau();
  r.lhs = delta::delta_max(delta::delta_profile(n));
  r.delta_v_b = delta::delta_max(delta::delta_profile(b), v);
  r.rhs_33 = static_cast<double>(r.tau_a) * static_cast<double>(r.delta_v_b) / (1.0 + 2.0 * v);
  r.applicable = n.is_squarefree() && static_cast<double>(n.pplus()) >= y &&
                 static_cast<long double>(v) >= a.log_value() * (1 - 1e-15L);
  r.pass = static_cast<double>(r.lhs) >= r.rhs_33 * (1.0 - kTol);
  if (r.pass && r.applicable) r.ratio_32 = ratio_32(n, y);
  return r;
}

double ratio_32(const arith::FactoredInteger& n, double y) {
  auto [a, b] = arith::smooth_part(n, y);
  const double dn = static_cast<double>(delta::delta_max(delta::delta_profile(n)));
  const double dy = fourier::d_y(b, y).value;
  return dn * (static_cast<double>(a.log_value()) + std::log(y)) /
         (static_cast<double>(a.tau()) * dy);
}

RatioSummary ratio_32_scan(const std::vector<arith::FactoredInteger>& sample, double y) {
  RatioSummary s;
  if (sample.empty()) return s;
  std::vector<double> r;
  r.reserve(sample.size());
  for (const auto& n : sample) {
    if (!n.is_squarefree() || static_cast<double>(n.pplus()) < y) {
      throw ConfigError("ratio_32_scan needs squarefree members with P+(n) >= y");
    }
    r.push_back(ratio_32(n, y));
  }
  std::sort(r.begin(), r.end());
  s.count = r.size();
  s.min = r.front();
  s.max = r.back();
  const std::size_t m = r.size() / 2;
  s.median = r.size() % 2 ? r[m] : 0.5 * (r[m - 1] + r[m]);
  return s;
}

ChainReport check_pair_chain(const arith::FactoredInteger& b, double v) {
  const auto p = delta::delta_profile(b);
  ChainReport c;
  c.autocorrelation = delta::autocorrelation_integral(p, v);
  c.pair_count = delta::pair_count_T0(p, v);
  c.tau = b.tau();
  c.delta_v = delta::delta_max(p, v);
  c.first = c.autocorrelation <= v * static_cast<double>(c.pair_count) * (1.0 + kTol);
  c.second = c.pair_count <= 2 * c.tau * c.delta_v;
  return c;
}

EnergyShapeReport check_energy_shape(const arith::FactoredInteger& b, double y, double nu) {
  if (!(y > 1.0) || !(nu >= 1.0)) throw ConfigError("check_energy_shape needs y > 1, nu >= 1");
  EnergyShapeReport e;
  const double ly = std::log(y);
  e.short_range = fourier::energy_integral(b, 1.0, 1.0 / (nu * ly)).value;
  e.long_range = fourier::energy_integral(b, 1.0, 1.0 / ly).value;
  e.pass = e.short_range >= e.long_range / (3.0 * nu) * (1.0 - kTol);
  return e;
}

}  // namespace delta_lab::lower_bound
