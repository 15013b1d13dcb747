#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the standard library and MPFR.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <mpfr.h>

namespace oracle {

using u64 = std::uint64_t;

inline std::vector<std::pair<u64, int>> trial_factor(u64 n) {
  std::vector<std::pair<u64, int>> f;
  for (u64 p = 2; p * p <= n; ++p) {
    int a = 0;
    while (n % p == 0) {
      n /= p;
      ++a;
    }
    if (a) f.emplace_back(p, a);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

inline bool trial_is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

inline std::vector<u64> trial_divisors(u64 n) {
  std::vector<u64> lo, hi;
  for (u64 d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      lo.push_back(d);
      if (d != n / d) hi.push_back(n / d);
    }
  }
  lo.insert(lo.end(), hi.rbegin(), hi.rend());
  return lo;
}

inline int mobius(u64 n) {
  int mu = 1;
  for (auto [p, a] : trial_factor(n)) {
    if (a > 1) return 0;
    mu = -mu;
  }
  return mu;
}

// a < b e^v, decided at 400 bits.
inline bool less_than_scaled(u64 a, u64 b, double v) {
  mpfr_t x, y;
  mpfr_inits2(400, x, y, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_d(x, v, MPFR_RNDN);
  mpfr_exp(x, x, MPFR_RNDN);
  mpfr_set_ui(y, static_cast<unsigned long>(b), MPFR_RNDN);
  mpfr_mul(x, x, y, MPFR_RNDN);
  mpfr_set_ui(y, static_cast<unsigned long>(a), MPFR_RNDN);
  const bool r = mpfr_less_p(y, x);
  mpfr_clears(x, y, static_cast<mpfr_ptr>(nullptr));
  return r;
}

// max over windows (d_k e^{-v}, d_k] of the number of divisors inside.
inline u64 delta_v(u64 n, double v) {
  const auto d = trial_divisors(n);
  u64 best = 0;
  for (u64 top : d) {
    u64 c = 0;
    for (u64 e : d) {
      if (e <= top && less_than_scaled(top, e, v)) ++c;
    }
    best = std::max(best, c);
  }
  return best;
}

// Ordered pairs with |log(d'/d)| <= v.
inline u64 pair_count(u64 n, double v) {
  const auto d = trial_divisors(n);
  u64 c = 0;
  for (u64 a : d) {
    for (u64 b : d) {
      const u64 hi = std::max(a, b), lo = std::min(a, b);
      if (hi == lo || less_than_scaled(hi, lo, v)) ++c;
    }
  }
  return c;
}

// ∫ f(u)^j g(u)^{q-j} du where f(u) = #{d : u < log d <= u + 1} and g is f
// shifted right by `shift`, integrated piece by piece between breakpoints.
inline long double cross_integral(u64 n, long double shift, int j, int q) {
  const auto d = trial_divisors(n);
  std::vector<long double> logs, cuts;
  for (u64 x : d) logs.push_back(std::log(static_cast<long double>(x)));
  for (long double l : logs) {
    cuts.insert(cuts.end(), {l - 1, l, l - 1 + shift, l + shift});
  }
  std::sort(cuts.begin(), cuts.end());
  auto count = [&](long double u) {
    int c = 0;
    for (long double l : logs) c += (u < l && l <= u + 1);
    return c;
  };
  long double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const long double len = cuts[i + 1] - cuts[i];
    if (len <= 0) continue;
    const long double mid = 0.5L * (cuts[i] + cuts[i + 1]);
    const long double f = count(mid), g = count(mid - shift);
    total += std::pow(f, j) * std::pow(g, q - j) * len;
  }
  return total;
}

inline long double moment(u64 n, int q) { return cross_integral(n, 0, q, q); }

inline std::complex<double> tau_direct(u64 n, double theta) {
  std::complex<double> s = 0;
  for (u64 d : trial_divisors(n)) s += std::polar(1.0, theta * std::log(static_cast<double>(d)));
  return s;
}

// Composite Simpson for ∫_0^upper |tau(n, scale t)|^2 / tau(n) dt.
inline double energy_simpson(u64 n, double scale, double upper, int panels) {
  const double tau = static_cast<double>(trial_divisors(n).size());
  auto g = [&](double t) { return std::norm(tau_direct(n, scale * t)) / tau; };
  const double h = upper / (2 * panels);
  double s = g(0) + g(upper);
  for (int i = 1; i < 2 * panels; ++i) s += (i % 2 ? 4 : 2) * g(i * h);
  return s * h / 3;
}

}  // namespace oracle
