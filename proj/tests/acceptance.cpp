// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "delta_lab/arith.hpp"
#include "delta_lab/bulk_sums.hpp"
#include "delta_lab/delta.hpp"
#include "delta_lab/fourier.hpp"
#include "delta_lab/moments.hpp"
#include "delta_lab/parallel.hpp"
#include "delta_lab/random_model.hpp"
#include "delta_lab/verify.hpp"
#include "oracles.hpp"

using namespace delta_lab;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t oracle_delta(std::uint64_t n) { return oracle::delta_v(n, 1.0); }

bulk::GrowthTable plain_sum(std::uint64_t x, unsigned threads, std::uint64_t chunk = bulk::kDefaultChunk) {
  bulk::SumJob job;
  job.x = x;
  job.threads = threads;
  job.chunk = chunk;
  return bulk::sum_delta(job);
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto s10 = plain_sum(10, 1).rows.back().sum;
  const auto s1 = plain_sum(1, 1).rows.back().sum;
  std::uint64_t brute10 = 0;
  for (std::uint64_t n = 1; n <= 10; ++n) brute10 += oracle_delta(n);
  o.require(s10 == 15 && brute10 == 15, "S(10)");
  o.require(s1 == 1 && oracle_delta(1) == 1, "S(1)");
  const auto p12 = delta::delta_profile(arith::factorize(12));
  o.require(delta::delta_max(p12) == 3 && oracle_delta(12) == 3, "Delta(12)");
  const auto t6 = delta::pair_count_T0(delta::delta_profile(arith::factorize(6)));
  o.require(t6 == 10 && oracle::pair_count(6, 1.0) == 10, "T(6,0)");
  const long double m2 = moments::moment(arith::factorize(2), 2);
  const long double want = 4.0L - 2.0L * std::log(2.0L);
  o.require(std::fabs(static_cast<double>(m2 - want)) < 1e-9, "M_2(2)");
  o.require(std::fabs(static_cast<double>(oracle::moment(2, 2) - want)) < 1e-9, "M_2(2) oracle");
  const double t = seconds_since(t0);
  o.require(t < 1.0, "runtime");
  o.note(fmt("%.3f s", t));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  verify::Options opts;
  opts.n_max = 5000;
  opts.samples = 500;
  std::uint64_t checked = 0;
  for (const auto& name : verify::suite_names()) {
    const auto r = verify::run_suite(name, opts);
    checked += r.checked;
    o.require(r.pass(), name + ": " + std::to_string(r.failures) + " failures, first " + r.first_failure);
  }
  const double t = seconds_since(t0);
  o.require(t < 300.0, "runtime");
  o.note(std::to_string(checked) + " checks, " + fmt("%.1f s", t));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0;
  const double thetas[] = {0.0, 0.37, 1.0, 2.5, 10.0, 123.456};
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    const auto f = arith::factorize(n);
    for (double th : thetas) {
      worst = std::max(worst, std::abs(fourier::tau_theta(f, th).value - oracle::tau_direct(n, th)));
    }
  }
  o.require(worst <= 1e-10, "product form vs direct " + fmt("%.2e", worst));

  // 200 integers with up to 8 primes >= 20, all with small exact expansions.
  const auto primes = arith::primes_in_range(20, 400);
  std::uint64_t state = 0x5EED;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state >> 33;
  };
  double gap = 0;
  for (int i = 0; i < 200; ++i) {
    const int k = 1 + static_cast<int>(next() % 8);
    std::vector<arith::PrimePower> pp;
    for (int j = 0; j < k; ++j) {
      const std::uint64_t p = primes.primes[next() % primes.primes.size()];
      bool seen = false;
      for (auto& q : pp) {
        if (q.prime == p) {
          ++q.exponent;
          seen = true;
        }
      }
      if (!seen) pp.push_back({p, 1});
    }
    const auto b = arith::FactoredInteger::from_factors(pp);
    const double scale = 1.0 / std::log(20.0);
    const double exact = fourier::energy_exact(b, scale, 1.0).value;
    const double adaptive = fourier::energy_adaptive(b, scale, 1.0).value;
    gap = std::max(gap, std::fabs(exact - adaptive));
  }
  o.require(gap <= 1e-8, "D_y exact vs adaptive " + fmt("%.2e", gap));
  const double t = seconds_since(t0);
  o.require(t < 60.0, "runtime");
  o.note("max |tau gap| " + fmt("%.1e", worst) + ", max D_y gap " + fmt("%.1e", gap) + fmt(", %.2f s", t));
  return o;
}

Outcome criterion4() {
  Outcome o;
  // Primes 2, 3, 5, 7, 11.
  const random_model::MeasureSpec spec{2.0, 12.0, 0x5EED};
  const random_model::Sampler sampler(spec);
  const std::vector<std::uint64_t> ps{2, 3, 5, 7, 11};
  o.require(sampler.primes().primes == ps, "prime range");

  constexpr std::uint64_t kSamples = 1'000'000;
  std::map<std::uint64_t, std::uint64_t> counts;
  for (const auto& n : random_model::sample(spec, kSamples)) ++counts[n.value()];
  double worst_sigma = 0;
  double mass_total = 0;
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::uint64_t n = 1;
    double mass = 1;
    for (int i = 0; i < 5; ++i) {
      const double p = static_cast<double>(ps[i]);
      if (mask >> i & 1) {
        n *= ps[i];
        mass *= 1.0 / (p + 1.0);
      } else {
        mass *= p / (p + 1.0);
      }
    }
    mass_total += mass;
    const double lib = sampler.probability(arith::factorize(n));
    o.require(std::fabs(lib - mass) <= 1e-15, "mass of " + std::to_string(n));
    const double sigma = std::sqrt(kSamples * mass * (1 - mass));
    const double z = std::fabs(static_cast<double>(counts[n]) - kSamples * mass) / sigma;
    worst_sigma = std::max(worst_sigma, z);
    counts.erase(n);
  }
  o.require(counts.empty(), "draws outside the support");
  o.require(std::fabs(mass_total - 1) < 1e-12, "masses sum to 1");
  o.require(worst_sigma <= 4, "atom frequency " + fmt("%.2f sigma", worst_sigma));

  // Exact expectation at x = 12 against an independent enumeration and MC.
  double enumerated = 0;
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::uint64_t n = 1;
    double mass = 1;
    for (int i = 0; i < 5; ++i) {
      const double p = static_cast<double>(ps[i]);
      if (mask >> i & 1) {
        n *= ps[i];
        mass /= p + 1.0;
      } else {
        mass *= p / (p + 1.0);
      }
    }
    enumerated += mass * static_cast<double>(oracle_delta(n));
  }
  const double exact = static_cast<double>(bulk::exact_expectation_small(12));
  o.require(std::fabs(exact - enumerated) < 1e-12, "exact expectation vs enumeration");
  const random_model::Statistic delta_stat = [](const arith::FactoredInteger& n) {
    return static_cast<double>(delta::delta_max(delta::delta_profile(n)));
  };
  const auto mc = random_model::estimate_expectation(sampler, delta_stat, 200'000, 1);
  const double z = std::fabs(mc.mean - exact) / mc.stderr_;
  o.require(z <= 4, "MC vs exact " + fmt("%.2f stderr", z));

  // Thread-count reproducibility, bit for bit.
  const random_model::MeasureSpec wide{2.0, 1e6, 7};
  bool same = true;
  const auto ref = random_model::estimate_expectation(wide, delta_stat, 20'000, 1);
  for (unsigned th : {2u, 3u, 8u}) {
    const auto e = random_model::estimate_expectation(wide, delta_stat, 20'000, th);
    same = same && e.mean == ref.mean && e.stderr_ == ref.stderr_ && e.n_samples == ref.n_samples;
  }
  const auto s1 = plain_sum(300'000, 1, 10'000).rows;
  const auto s4 = plain_sum(300'000, 4, 7'777).rows;
  same = same && s1.size() == s4.size();
  for (std::size_t i = 0; same && i < s1.size(); ++i) same = s1[i].sum == s4[i].sum;
  o.require(same, "thread-count reproducibility");
  o.note(fmt("worst atom %.2f sigma", worst_sigma) + ", E(Delta) " + fmt("%.6f", exact) + " vs MC " +
         fmt("%.6f", mc.mean) + fmt(" (%.2f stderr)", z));
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (double y : {2.0, 20.0}) {
    const auto r = random_model::d_y_expectation(y, 1e6, 10'000, 0x5EED);
    o.require(r.ratio >= 0.1 && r.ratio <= 10, "D_y ratio at y=" + fmt("%g", y));
    o.note("D_y ratio y=" + fmt("%g", y) + ": " + fmt("%.4f", r.ratio));
  }

  const auto primes = arith::primes_in_range(2, 1'000'001);
  double worst = 0;
  for (int i = 0; i <= 10; ++i) {
    for (double y : {1e3, 1e4, 1e5, 1e6}) {
      worst = std::max(worst, std::fabs(fourier::cosine_sum_check(i / 10.0, y, primes).deviation));
    }
  }
  o.require(worst <= 3, "cosine sum deviation");
  o.note("max cosine deviation " + fmt("%.4f", worst));

  const auto tail = random_model::tail_probability_m2(1e6, {3, 10, 30, 100}, 100'000, 0x5EED);
  const auto& t3 = tail.front();
  o.require(t3.estimate.mean >= 1e-2 * t3.envelope_low && t3.estimate.mean <= 1e2 * t3.envelope_high,
            "tail at T=3 outside widened envelopes");
  o.note("P(M2/tau > 3) " + fmt("%.4g", t3.estimate.mean) + " in [" + fmt("%.4g", t3.envelope_low) + ", " +
         fmt("%.4g", t3.envelope_high) + "]");
  for (std::size_t i = 1; i < tail.size(); ++i) {
    const auto& a = tail[i - 1].estimate;
    const auto& b = tail[i].estimate;
    const double slack = 3 * std::hypot(a.stderr_, b.stderr_);
    o.require(b.mean <= a.mean + slack, "tail monotonicity at T=" + fmt("%g", tail[i].T));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto t7 = plain_sum(10'000'000, 0);
  const double time7 = seconds_since(t0);
  const auto t1 = Clock::now();
  const auto table = plain_sum(100'000'000, 0);
  const double time8 = seconds_since(t1);
  o.require(!table.truncated, "truncated");
  o.require(t7.rows.back().sum == table.rows[7].sum, "S(1e7) consistency");
  for (const auto& r : table.rows) {
    if (r.x < 10'000) continue;
    const double ratio = r.normalized[0];
    o.require(ratio > 0.5, "S/(x loglog x) at x=" + std::to_string(r.x));
    std::printf("  x=%-10llu S=%-12.0Lf S/x=%.6f S/(x L)=%.6f S/(x L^1.5)=%.6f S/(x L^2)=%.6f S/(x L^2.5)=%.6f\n",
                static_cast<unsigned long long>(r.x), r.sum, r.per_x, r.normalized[0], r.normalized[1],
                r.normalized[2], r.normalized[3]);
  }
  o.require(time7 < 60, "S(1e7) runtime");
  o.require(time8 < 900, "S(1e8) runtime");
  o.note(fmt("S(1e7) %.1f s", time7) + fmt(", S(1e8) %.1f s", time8) + " on " +
         std::to_string(default_threads()) + " thread(s)");
  return o;
}

Outcome criterion7() {
  Outcome o;
  bulk::SumJob job;
  job.x = 100;
  job.mode = bulk::SumMode::polynomial;
  job.poly = bulk::Polynomial::parse("x^2+1");
  const auto t = bulk::sum_delta_poly(job);
  std::uint64_t brute = 0;
  for (std::uint64_t n = 1; n <= 100; ++n) brute += oracle_delta(n * n + 1);
  o.require(t.rows.back().sum == brute && t.failures == 0, "sum of Delta(n^2+1)");
  o.note("sum Delta(n^2+1) = " + std::to_string(brute));

  std::uint64_t bad = 0, termwise = 0;
  for (std::uint64_t n = 1; n <= 10'000; ++n) {
    const auto a = bulk::delta_of(2 * n);
    termwise += a;
    if (a > 2 * bulk::delta_of(n)) ++bad;
    if (n <= 2000 && a != oracle_delta(2 * n)) ++bad;
  }
  job.x = 10'000;
  job.poly = bulk::Polynomial::parse("2x");
  o.require(bulk::sum_delta_poly(job).rows.back().sum == termwise, "polynomial 2x sum");
  o.require(bad == 0, std::to_string(bad) + " violations of Delta(2n) <= 2 Delta(n)");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact small-scale oracle", criterion1}, {"identity suite", criterion2},
      {"fourier consistency", criterion3},      {"measure correctness", criterion4},
      {"order-of-magnitude monitors", criterion5}, {"growth table", criterion6},
      {"polynomial mode", criterion7},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
