#include "delta_lab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "delta_lab/arith.hpp"
#include "delta_lab/delta.hpp"
#include "delta_lab/error.hpp"
#include "delta_lab/et_sets.hpp"
#include "delta_lab/fourier.hpp"
#include "delta_lab/lower_bound.hpp"
#include "delta_lab/moments.hpp"

namespace delta_lab::verify {

namespace {

using arith::FactoredInteger;
using Rng = std::mt19937_64;

constexpr long double kTol = 1e-9L;

class Recorder {
 public:
  explicit Recorder(SuiteReport& r) : r_(r) {}

  template <class... Args>
  void check(bool ok, const Args&... what) {
    ++r_.checked;
    if (ok) return;
    if (r_.failures++ == 0) {
      std::ostringstream os;
      (os << ... << what);
      r_.first_failure = os.str();
    }
  }

 private:
  SuiteReport& r_;
};

std::uint64_t random_prime(Rng& rng, std::uint64_t bound) {
  for (;;) {
    const std::uint64_t p = rng() % (bound - 1) + 2;
    if (arith::is_prime_u64(p)) return p;
  }
}

void moments_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  const arith::SpfSieve sieve(static_cast<std::uint32_t>(std::max<std::uint64_t>(o.n_max, 2)));
  for (std::uint64_t n = 1; n <= o.n_max; ++n) {
    const auto f = arith::factorize(n, &sieve);
    const auto p = delta::delta_profile(f);
    const auto mv = moments::moment_vector(f, 10);
    const auto& m = mv.values;
    const long double tau = f.tau();
    rec.check(std::fabs(m[1] - tau) <= 1e-12L * tau, "M_1 != tau at n=", n);
    rec.check(std::fabs(m[2] - delta::autocorrelation_integral(p, 1)) <= kTol * m[2],
              "M_2 != autocorrelation at n=", n);
    const long double d = delta::delta_max(p);
    for (int q = 1; q <= 10; ++q) {
      rec.check(d <= 2 * std::pow(m[q], 1.0L / q) * (1 + kTol), "Delta > 2 M_q^(1/q) at n=", n,
                " q=", q);
    }
    for (int q = 2; q <= 6; ++q) {
      for (int j = 1; j < q; ++j) {
        const long double rhs =
            std::pow(m[q], (j - 1.0L) / (q - 1)) * std::pow(tau, (q - j) / (q - 1.0L));
        rec.check(m[j] <= rhs * (1 + kTol), "Holder fails at n=", n, " j=", j, " q=", q);
      }
    }
  }
}

void sandwich_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  for (std::uint64_t n = 1; n <= o.n_max; ++n) {
    const auto p = delta::delta_profile(arith::factorize(n));
    const long double m2 = moments::moment(p, 2);
    const long double t = delta::pair_count_T0(p);
    rec.check(m2 <= t * (1 + kTol) && t <= 4 * m2 * (1 + kTol), "sandwich fails at n=", n);
  }
}

void translation_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  Rng rng(o.seed);
  for (std::uint64_t i = 0; i < o.samples;) {
    const std::uint64_t n = rng() % o.n_max + 1;
    const std::uint64_t p = random_prime(rng, 1000);
    if (n % p == 0) continue;
    ++i;
    const auto pn = delta::delta_profile(arith::factorize(n));
    const auto lhs = delta::delta_step_function(delta::delta_profile(arith::factorize(n * p)));
    const auto rhs = delta::delta_step_function(pn) +
                     delta::delta_step_function(pn, -std::log(static_cast<long double>(p)));
    rec.check(lhs.approx_equal(rhs, 1e-12L), "translation identity fails at n=", n, " p=", p);
  }
}

void inductive_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  Rng rng(o.seed);
  for (std::uint64_t n = 1; n <= o.n_max; ++n) {
    std::uint64_t p;
    do {
      p = random_prime(rng, 100);
    } while (n % p == 0);
    const int q = 2 + static_cast<int>(rng() % 5);
    const auto rep = moments::check_inductive_inequality(arith::factorize(n), p, q);
    rec.check(rep.pass, "inductive inequality fails at n=", n, " p=", p, " q=", q);
  }
  for (std::uint64_t i = 0; i < o.samples;) {
    const std::uint64_t n = rng() % 100'000 + 1;
    const std::uint64_t p = random_prime(rng, 1000);
    if (n % p == 0) continue;
    ++i;
    const int q = 2 + static_cast<int>(rng() % 7);
    const auto rep = moments::check_inductive_inequality(arith::factorize(n), p, q);
    rec.check(rep.pass, "inductive inequality fails at n=", n, " p=", p, " q=", q);
  }
}

void pigeonhole_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  Rng rng(o.seed);
  const double ys[] = {5, 20, 100};
  double min_ratio = INFINITY;
  for (std::uint64_t i = 0; i < o.samples;) {
    const auto f = arith::factorize(rng() % 1'000'000 + 1);
    const double y = ys[i % 3];
    if (!f.is_squarefree() || static_cast<double>(f.pplus()) < y) continue;
    ++i;
    const auto a = arith::smooth_part(f, y).a;
    const double v = std::max(1.0, static_cast<double>(a.log_value()));
    const auto rep = lower_bound::check_pigeonhole(f, y, v);
    rec.check(rep.applicable && rep.pass, "pigeonhole fails at n=", f.value(), " y=", y);
    min_ratio = std::min(min_ratio, rep.ratio_32);
  }
  r.monitors["min_ratio_32"] = min_ratio;
}

void chain_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  Rng rng(o.seed);
  for (std::uint64_t i = 0; i < o.samples; ++i) {
    const auto b = arith::factorize(rng() % 100'000 + 1);
    for (double v : {1.0, 2.0, 5.0}) {
      const auto c = lower_bound::check_pair_chain(b, v);
      rec.check(c.first && c.second, "pair chain fails at b=", b.value(), " v=", v);
    }
  }
}

void energy_shape_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  Rng rng(o.seed);
  double worst = INFINITY;
  for (std::uint64_t i = 0; i < std::min<std::uint64_t>(o.samples, 100); ++i) {
    const auto b = arith::factorize(rng() % 1'000'000 + 1);
    for (double nu : {2.0, 3.0, 4.0}) {
      const auto e = lower_bound::check_energy_shape(b, 20, nu);
      rec.check(e.pass, "energy shape fails at b=", b.value(), " nu=", nu);
      worst = std::min(worst, e.short_range * 3 * nu / e.long_range);
    }
  }
  r.monitors["min_scaled_ratio"] = worst;
}

void et_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  for (double T : {3.0, 10.0}) {
    et::EtParams params;
    params.T = T;
    for (std::uint64_t n = 1; n <= o.n_max; ++n) {
      const auto f = arith::factorize(n);
      const auto m = et::membership_report(f, 3, params);
      bool nested = (!m.in_ET || m.in_E) && (!m.in_ETstar || m.in_ET) &&
                    m.in_EqT[1] == m.in_ETstar && m.in_EqT[0] == m.in_ETstar;
      for (int q = 2; q <= 3; ++q) nested = nested && (!m.in_EqT[q] || m.in_EqT[q - 1]);
      rec.check(nested, "inclusion chain fails at n=", n, " T=", T);
      if (!m.in_ET) continue;
      for (auto d : arith::divisors(f)) {
        const auto g = arith::factorize(d);
        const auto md = et::membership_report(g, 3, params);
        rec.check(md.in_ET, "E_T heredity fails at n=", n, " d=", d);
        if (m.in_ETstar) rec.check(md.in_ETstar, "E_T* heredity fails at n=", n, " d=", d);
        if (m.in_EqT[3]) rec.check(md.in_EqT[3], "E_3T heredity fails at n=", n, " d=", d);
      }
    }
  }
}

void parseval_suite(const Options& o, SuiteReport& r) {
  double worst = 0;
  std::uint64_t flagged = 0;
  for (std::uint64_t n = 1; n <= o.n_max; ++n) {
    const auto p = fourier::parseval_ratio(arith::factorize(n));
    worst = std::max(worst, p.ratio);
    if (p.lhs > 8 * p.rhs + 8) ++flagged;
    ++r.checked;
  }
  r.monitors["max_ratio"] = worst;
  r.monitors["flagged"] = static_cast<double>(flagged);
}

void fourier_suite(const Options& o, SuiteReport& r) {
  Recorder rec(r);
  Rng rng(o.seed);
  std::uniform_real_distribution<double> theta(-50, 50);
  for (std::uint64_t n = 1; n <= o.n_max; ++n) {
    const auto f = arith::factorize(n);
    const auto divs = arith::divisors(f);
    for (int k = 0; k < 4; ++k) {
      const double t = theta(rng);
      std::complex<double> direct = 0;
      for (auto d : divs) direct += std::polar(1.0, t * std::log(static_cast<double>(d)));
      const auto prod = fourier::tau_theta(f, t).value;
      rec.check(std::abs(prod - direct) <= 1e-10 * std::max(1.0, std::abs(direct)),
                "tau(n, theta) product form differs at n=", n);
    }
  }
  double worst = 0;
  for (std::uint64_t i = 0; i < 200;) {
    std::vector<std::uint64_t> primes;
    const int omega = 1 + static_cast<int>(rng() % 8);
    while (static_cast<int>(primes.size()) < omega) {
      const std::uint64_t p = random_prime(rng, 100'000);
      if (p >= 20 && std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
    }
    ++i;
    const auto b = FactoredInteger::from_primes(primes);
    const double scale = 1 / std::log(20.0);
    const double diff = std::fabs(fourier::energy_exact(b, scale, 1).value -
                                  fourier::energy_adaptive(b, scale, 1).value);
    worst = std::max(worst, diff);
    rec.check(diff <= 1e-8, "D_y methods disagree for b=", b.big_value().get_str());
  }
  r.monitors["max_dy_method_gap"] = worst;
}

const std::map<std::string, std::function<void(const Options&, SuiteReport&)>>& registry() {
  static const std::map<std::string, std::function<void(const Options&, SuiteReport&)>> m{
      {"moments", moments_suite},     {"sandwich", sandwich_suite},
      {"translation", translation_suite}, {"inductive", inductive_suite},
      {"pigeonhole", pigeonhole_suite}, {"chain", chain_suite},
      {"energy-shape", energy_shape_suite}, {"et", et_suite},
      {"parseval", parseval_suite},   {"fourier", fourier_suite},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

SuiteReport run_suite(const std::string& name, const Options& opts) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("unknown verify suite '" + name + "'");
  if (opts.n_max < 1) throw ConfigError("n_max must be >= 1");
  SuiteReport r;
  r.suite = name;
  it->second(opts, r);
  return r;
}

}  // namespace delta_lab::verify
