#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "delta_lab/arith.hpp"
#include "delta_lab/delta.hpp"
#include "delta_lab/moments.hpp"
#include "oracles.hpp"

using namespace delta_lab;
using arith::factorize;

namespace {

double rel(long double a, long double b) {
  return static_cast<double>(std::fabs(a - b) / std::max(1.0L, std::fabs(b)));
}

}  // namespace

TEST(Moment, FirstMomentIsTau) {
  for (std::uint64_t n = 1; n <= 100'000; n += (n < 5000 ? 1 : 7)) {
    const auto f = factorize(n);
    ASSERT_LT(rel(moments::moment(f, 1), f.tau()), 1e-12) << n;
  }
}

TEST(Moment, SecondMomentOfTwo) {
  EXPECT_NEAR(static_cast<double>(moments::moment(factorize(2), 2)), 4 - 2 * std::log(2.0), 1e-15);
}

TEST(Moment, MatchesOracle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t n = rng() % 20'000 + 1;
    for (int q : {1, 2, 3, 5, 8}) {
      ASSERT_LT(rel(moments::moment(factorize(n), q), oracle::moment(n, q)), 1e-12) << n << " " << q;
    }
  }
}

TEST(Moment, FubiniIdentity) {
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    const auto p = delta::delta_profile(factorize(n));
    ASSERT_LT(rel(moments::moment(p, 2), delta::autocorrelation_integral(p, 1)), 1e-12) << n;
  }
}

TEST(Moment, BoundsFromTauAndDelta) {
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    const auto f = factorize(n);
    const auto m = moments::moment_vector(f, 6);
    const long double tau = f.tau();
    for (int q = 1; q <= 6; ++q) {
      ASSERT_LE(m.values[q], std::pow(tau, q - 1) * m.values[1] * (1 + 1e-12L));
    }
  }
}

TEST(Moment, OrderOutOfRange) {
  EXPECT_THROW(moments::moment(factorize(6), 0), std::exception);
  EXPECT_THROW(moments::moment(factorize(6), 65), std::exception);
}

TEST(Holder, ChainHoldsUpTo2000) {
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    const auto f = factorize(n);
    const auto m = moments::moment_vector(f, 6);
    const long double tau = f.tau();
    for (int q = 2; q <= 6; ++q) {
      for (int j = 1; j < q; ++j) {
        const long double rhs = std::pow(m.values[q], (j - 1.0L) / (q - 1)) *
                                std::pow(tau, (q - j) / (q - 1.0L));
        ASSERT_LE(m.values[j], rhs * (1 + 1e-9L)) << n << " " << j << " " << q;
      }
    }
  }
}

TEST(MaxMomentBridge, DeltaBoundedByMoments) {
  for (std::uint64_t n = 1; n <= 10'000; ++n) {
    const auto f = factorize(n);
    const auto p = delta::delta_profile(f);
    const long double d = delta::delta_max(p);
    for (int q = 1; q <= 10; ++q) {
      ASSERT_LE(d, 2 * std::pow(moments::moment(p, q), 1.0L / q) * (1 + 1e-12L)) << n;
    }
  }
}

TEST(CrossMoment, Examples) {
  for (std::uint64_t n : {1, 6, 12, 210}) {
    for (std::uint64_t p : {11, 13}) {
      for (int q : {1, 2, 4}) {
        EXPECT_LT(rel(moments::cross_moment(factorize(n), p, q, q), moments::moment(factorize(n), q)),
                  1e-12);
      }
    }
  }
  for (std::uint64_t p : {2, 3, 5}) {
    const double want = std::max(0.0, 1 - std::log(static_cast<double>(p)));
    EXPECT_NEAR(static_cast<double>(moments::cross_moment(factorize(1), p, 1, 2)), want, 1e-15);
    EXPECT_NEAR(static_cast<double>(moments::cross_moment(factorize(1), p, 2, 5)), want, 1e-15);
  }
  const long double n6 = moments::cross_moment(factorize(6), 5, 1, 2);
  EXPECT_LT(rel(n6, oracle::cross_integral(6, std::log(5.0L), 1, 2)), 1e-10);
}

TEST(CrossMoment, SymmetricInJ) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t n = rng() % 5000 + 1;
    const std::uint64_t p = 53;
    if (n % p == 0) continue;
    for (int q = 2; q <= 5; ++q) {
      for (int j = 0; j <= q; ++j) {
        ASSERT_LT(rel(moments::cross_moment(factorize(n), p, j, q),
                      moments::cross_moment(factorize(n), p, q - j, q)), 1e-12);
      }
    }
  }
}

TEST(CrossMoment, MatchesOracle) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t n = rng() % 5000 + 1;
    const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7, 11, 97}[rng() % 6];
    if (n % p == 0) continue;
    const int q = 2 + static_cast<int>(rng() % 4);
    const int j = static_cast<int>(rng() % (q + 1));
    ASSERT_LT(rel(moments::cross_moment(factorize(n), p, j, q),
                  oracle::cross_integral(n, std::log(static_cast<long double>(p)), j, q)), 1e-11)
        << n << " " << p << " " << j << " " << q;
  }
}

TEST(CrossMoment, Preconditions) {
  EXPECT_THROW(moments::cross_moment(factorize(6), 3, 1, 2), std::exception);
  EXPECT_THROW(moments::cross_moment(factorize(6), 9, 1, 2), std::exception);
  EXPECT_THROW(moments::cross_moment(factorize(6), 5, 3, 2), std::exception);
}

TEST(WTerm, Examples) {
  const auto f = factorize(35);
  EXPECT_LT(rel(moments::w_term(f, 2, 2), 2 * moments::cross_moment(f, 2, 1, 2)), 1e-15);
  EXPECT_NEAR(static_cast<double>(moments::w_term(factorize(1), 2, 2)), 2 * (1 - std::log(2.0)), 1e-15);
  EXPECT_LT(rel(moments::w_term(factorize(2), 5, 3), 3 * oracle::cross_integral(2, std::log(5.0L), 1, 3)),
            1e-12);
}

TEST(Inductive, Examples) {
  EXPECT_TRUE(moments::check_inductive_inequality(factorize(3), 2, 2).pass);
  for (std::uint64_t p : {2, 3, 101}) {
    for (int q = 2; q <= 6; ++q) EXPECT_TRUE(moments::check_inductive_inequality(factorize(1), p, q).pass);
  }
}

TEST(Inductive, RandomInstances) {
  std::mt19937_64 rng(29);
  int tested = 0;
  while (tested < 1000) {
    const std::uint64_t n = rng() % 10'000 + 1;
    const std::uint64_t p = rng() % 99 + 2;
    if (!arith::is_prime_u64(p) || n % p == 0) continue;
    const int q = 2 + static_cast<int>(rng() % 5);
    const auto r = moments::check_inductive_inequality(factorize(n), p, q);
    ASSERT_TRUE(r.pass) << n << " " << p << " " << q;
    ++tested;
  }
}

TEST(Monotonicity, SecondMomentRatioGrowsWithPrimes) {
  const auto primes = arith::primes_in_range(2, 51).primes;
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    const auto f = factorize(n);
    const long double r = moments::moment(f, 2) / f.tau();
    for (auto p : primes) {
      if (n % p == 0) continue;
      const auto g = factorize(n * p);
      ASSERT_GE(moments::moment(g, 2) / g.tau() * (1 + 1e-12L), r) << n << " " << p;
    }
  }
}

TEST(SqEstimator, FirstMomentIsProbabilityOfEStar) {
  et::EtParams params;
  for (std::uint64_t x : {3, 10, 30}) {
    const long double s1 = moments::sq_estimator(x, 1, params);
    EXPECT_GT(s1, 0);
    EXPECT_LE(s1, 1 + 1e-12L);
  }
}

TEST(SqEstimator, MatchesBruteEnumeration) {
  et::EtParams params;
  params.T = 10;
  const auto primes = arith::primes_in_range(2, 30).primes;
  long double norm = 1, total = 0;
  for (auto p : primes) norm *= static_cast<long double>(p) / (p + 1);
  for (std::uint64_t mask = 0; mask < (1u << primes.size()); ++mask) {
    std::vector<std::uint64_t> chosen;
    for (std::size_t k = 0; k < primes.size(); ++k) {
      if (mask >> k & 1) chosen.push_back(primes[k]);
    }
    const auto f = arith::FactoredInteger::from_primes(chosen);
    if (!et::in_E_q_T(f, 1, params)) continue;
    total += moments::moment(f, 2) / (f.big_value().get_d() * f.tau());
  }
  EXPECT_LT(rel(moments::sq_estimator(30, 2, params), norm * total), 1e-12);
}
