#include "delta_lab/et_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "delta_lab/error.hpp"
#include "delta_lab/moments.hpp"

namespace delta_lab::et {

namespace {

using arith::FactoredInteger;

// In s = log log 3y the log of the E_T bound is
//   log T + s - delta * min(log T + s, (s - b log T)^2 / log T),
// i.e. the max of an increasing line and a concave parabola. Its minimum on
// an interval is at an endpoint or where the two branches of the min cross.
double log_bound_at_s(double s, const EtParams& p) {
  const double L = std::log(p.T);
  const double a = L + s;
  const double b = (s - b_const() * L) * (s - b_const() * L) / L;
  return L + s - p.delta * std::min(a, b);
}

double y_from_s(double s) { return std::exp(std::exp(s)) / 3.0; }
double s_from_y(double y) { return std::log(std::log(3.0 * y)); }

struct IntervalMin {
  double log_value;
  double y;
};

// Minimum of the log bound over y in [y_lo, y_hi] (y_hi = inf allowed).
IntervalMin min_log_bound(double y_lo, double y_hi, const EtParams& p) {
  const double s_lo = s_from_y(y_lo);
  const double s_hi = std::isinf(y_hi) ? std::numeric_limits<double>::infinity() : s_from_y(y_hi);
  IntervalMin best{log_bound_at_s(s_lo, p), y_lo};
  if (!std::isinf(s_hi)) {
    const double v = log_bound_at_s(s_hi, p);
    if (v < best.log_value) best = {v, y_hi};
  }
  // Crossings of the two branches: s = L ((2b+1) ± sqrt(4b+5)) / 2.
  const double L = std::log(p.T);
  const double b = b_const();
  const double root = std::sqrt(4 * b + 5);
  for (double s : {L * ((2 * b + 1) - root) / 2, L * ((2 * b + 1) + root) / 2}) {
    if (s > s_lo && s < s_hi) {
      const double v = log_bound_at_s(s, p);
      if (v < best.log_value) best = {v, y_from_s(s)};
    }
  }
  return best;
}

}  // namespace

double b_const() noexcept { return 1.0 / (std::log(4.0) - 1.0); }

void EtParams::validate() const {
  if (!(T >= 3.0)) throw ConfigError("T must be >= 3");
  if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
  if (!(c0 > 0.0)) throw ConfigError("c0 must be > 0");
}

double EtParams::theta(int j) const {
  if (j < 0) throw ConfigError("theta index must be >= 0");
  if (!theta_seq.empty()) {
    if (static_cast<std::size_t>(j) >= theta_seq.size()) {
      throw ConfigError("theta sequence too short: need index " + std::to_string(j));
    }
    return theta_seq[static_cast<std::size_t>(j)];
  }
  if (j <= 1) return 1.0;
  const double jd = j;
  const double log_t = std::log(T);
  // log of j!/j^2 (2 pi^2 c0/3)^{j-1} T^{j-1} (log T)^{(j-1)/2}
  const double lg = std::lgamma(jd + 1) - 2 * std::log(jd) +
                    (jd - 1) * std::log(2 * std::numbers::pi * std::numbers::pi * c0 / 3) +
                    (jd - 1) * log_t + (jd - 1) / 2 * std::log(log_t);
  return std::exp(lg);
}

double f_T(double y, const EtParams& params) {
  if (!(y >= 1.0)) throw ConfigError("f_T needs y >= 1");
  params.validate();
  const double L = std::log(params.T);
  const double loglog = std::log(std::log(3.0 * y));
  const double first = std::log(params.T * std::log(3.0 * y));
  const double diff = loglog - b_const() * L;
  return params.delta * std::min(first, diff * diff / L);
}

double et_bound(double y, const EtParams& params) {
  return params.T * std::log(3.0 * y) * std::exp(-f_T(y, params));
}

EtResult in_E_T(const FactoredInteger& f, const EtParams& params) {
  params.validate();
  if (!f.is_squarefree()) return {false, std::nullopt};
  // tau(n_y) = 2^i for y in (p_i, p_{i+1}], with p_0 = 1 and p_{k+1} = inf.
  const auto& fs = f.factors();
  for (std::size_t i = 0; i <= fs.size(); ++i) {
    const double y_lo = i == 0 ? 1.0 : static_cast<double>(fs[i - 1].prime);
    const double y_hi = i == fs.size() ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(fs[i].prime);
    const IntervalMin m = min_log_bound(y_lo, y_hi, params);
    if (static_cast<double>(i) * std::numbers::ln2 > m.log_value) {
      // The interval is open at p_i; report a point just inside it.
      const double y = i > 0 && m.y <= y_lo ? std::nextafter(y_lo, y_hi) : m.y;
      return {false, y};
    }
  }
  return {true, std::nullopt};
}

bool in_E_T_star(const FactoredInteger& f, const EtParams& params) {
  if (!in_E_T(f, params).member) return false;
  const long double m2 = moments::moment(f, 2);
  return m2 <= static_cast<long double>(params.T) * static_cast<long double>(f.tau());
}

bool in_E_q_T(const FactoredInteger& f, int q, const EtParams& params) {
  if (q >= 2) (void)params.theta(q);
  if (!in_E_T_star(f, params)) return false;
  if (q <= 1) return true;
  const moments::MomentVector mv = moments::moment_vector(f, q);
  const auto tau = static_cast<long double>(f.tau());
  for (int j = 1; j <= q; ++j) {
    const long double bound = tau * static_cast<long double>(params.theta(j));
    if (mv.values[static_cast<std::size_t>(j)] > bound * (1 + moments::kRelTol)) return false;
  }
  return true;
}

MembershipReport membership_report(const FactoredInteger& f, int q_max, const EtParams& params) {
  if (q_max < 0) throw ConfigError("q_max must be >= 0");
  MembershipReport r;
  r.n = f;
  r.in_E = f.is_squarefree();
  const EtResult et = in_E_T(f, params);
  r.in_ET = et.member;
  r.witness_y = et.witness_y;
  r.in_ETstar = r.in_ET && in_E_T_star(f, params);
  r.in_EqT.assign(static_cast<std::size_t>(q_max) + 1, false);
  for (int q = 0; q <= q_max; ++q) {
    r.in_EqT[static_cast<std::size_t>(q)] = r.in_ETstar && in_E_q_T(f, q, params);
    if (!r.in_EqT[static_cast<std::size_t>(q)]) break;  // nested
  }
  return r;
}

}  // namespace delta_lab::et
