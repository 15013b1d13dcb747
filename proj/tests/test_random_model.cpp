#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "delta_lab/arith.hpp"
#include "delta_lab/bulk_sums.hpp"
#include "delta_lab/delta.hpp"
#include "delta_lab/error.hpp"
#include "delta_lab/et_sets.hpp"
#include "delta_lab/random_model.hpp"

using namespace delta_lab;
using random_model::MeasureSpec;
using random_model::Sampler;

TEST(Sampler, TwoAtoms) {
  const Sampler s({2, 3, 1});
  EXPECT_EQ(s.primes().primes, (std::vector<std::uint64_t>{2}));
  EXPECT_NEAR(s.probability(arith::factorize(2)), 1.0 / 3, 1e-15);
  EXPECT_NEAR(s.probability(arith::FactoredInteger{}), 2.0 / 3, 1e-15);
  EXPECT_EQ(s.probability(arith::factorize(3)), 0);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto n = s.draw(i);
    ASSERT_TRUE(n.value() == 1 || n.value() == 2);
  }
}

TEST(Sampler, EmptyRangeAlwaysOne) {
  const Sampler s({24, 29, 1});
  EXPECT_TRUE(s.primes().primes.empty());
  for (std::uint64_t i = 0; i < 1000; ++i) ASSERT_EQ(s.draw(i).value(), 1u);
}

TEST(Sampler, InclusionFrequencyOfTwo) {
  const Sampler s({2, 1000, 99});
  const std::uint64_t count = 1'000'000;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < count; ++i) hits += s.draw(i).divides_by(2);
  const double p = 1.0 / 3;
  const double sd = std::sqrt(p * (1 - p) / count);
  EXPECT_NEAR(static_cast<double>(hits) / count, p, 3 * sd);
}

TEST(Sampler, IndependenceOfInclusions) {
  const Sampler s({2, 30, 7});
  const std::uint64_t count = 200'000;
  const auto& primes = s.primes().primes;
  std::vector<std::vector<double>> x(primes.size(), std::vector<double>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto n = s.draw(i);
    for (std::size_t k = 0; k < primes.size(); ++k) x[k][i] = n.divides_by(primes[k]);
  }
  auto corr = [&](std::size_t a, std::size_t b) {
    double ma = 0, mb = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      ma += x[a][i];
      mb += x[b][i];
    }
    ma /= count;
    mb /= count;
    double sab = 0, saa = 0, sbb = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      sab += (x[a][i] - ma) * (x[b][i] - mb);
      saa += (x[a][i] - ma) * (x[a][i] - ma);
      sbb += (x[b][i] - mb) * (x[b][i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
  };
  for (std::size_t a = 0; a < primes.size(); ++a) {
    for (std::size_t b = a + 1; b < primes.size(); ++b) {
      EXPECT_LE(std::fabs(corr(a, b)), 4 / std::sqrt(static_cast<double>(count))) << primes[a] << " " << primes[b];
    }
  }
}

TEST(Sampler, ReproducibleAcrossCalls) {
  const auto a = random_model::sample({2, 1e6, 5}, 100);
  const auto b = random_model::sample({2, 1e6, 5}, 100);
  EXPECT_EQ(a, b);
  const auto c = random_model::sample({2, 1e6, 6}, 100);
  EXPECT_NE(a, c);
}

TEST(Sampler, HugeProductsStayFactored) {
  const Sampler s({2, 1e7, 3});
  bool saw_big = false;
  for (std::uint64_t i = 0; i < 200; ++i) saw_big |= !s.draw(i).fits_u64();
  EXPECT_TRUE(saw_big);
}

TEST(Sampler, RejectsBadSpec) {
  EXPECT_THROW(Sampler({1, 3, 1}), ConfigError);
  EXPECT_THROW(Sampler({5, 5, 1}), ConfigError);
  EXPECT_THROW(random_model::sample({2, 3, 1}, 0), ConfigError);
}

TEST(Estimate, ConstantStatistic) {
  const auto e = random_model::estimate_expectation(MeasureSpec{2, 1e4, 1},
                                                    [](const arith::FactoredInteger&) { return 1.0; }, 5000);
  EXPECT_EQ(e.mean, 1);
  EXPECT_EQ(e.stderr_, 0);
  EXPECT_EQ(e.n_samples, 5000u);
  EXPECT_TRUE(e.valid);
  EXPECT_EQ(e.ci95.first, 1);
}

TEST(Estimate, OmegaMatchesClosedForm) {
  const MeasureSpec spec{2, 1e5, 13};
  const Sampler s(spec);
  double want = 0;
  for (auto p : s.primes().primes) want += 1.0 / (static_cast<double>(p) + 1);
  const auto e = random_model::estimate_expectation(
      s, [](const arith::FactoredInteger& n) { return static_cast<double>(n.omega()); }, 200'000);
  EXPECT_NEAR(e.mean, want, 4 * e.stderr_);
}

TEST(Estimate, ThreadCountDoesNotChangeResult) {
  const Sampler s({2, 1e6, 7});
  auto stat = [](const arith::FactoredInteger& n) {
    return static_cast<double>(delta::delta_max(delta::delta_profile(n)));
  };
  const auto a = random_model::estimate_expectation(s, stat, 20'000, 1);
  const auto b = random_model::estimate_expectation(s, stat, 20'000, 4);
  const auto c = random_model::estimate_expectation(s, stat, 20'000, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stderr_, b.stderr_);
  EXPECT_EQ(a.mean, c.mean);
  EXPECT_EQ(a.stderr_, c.stderr_);
}

TEST(Estimate, FailuresAreCountedAndFlagged) {
  const Sampler s({2, 100, 1});
  auto flaky = [](const arith::FactoredInteger& n) -> double {
    if (n.divides_by(3)) throw ResourceError("boom");
    return 1.0;
  };
  const auto e = random_model::estimate_expectation(s, flaky, 10'000);
  EXPECT_GT(e.failures, 100u);
  EXPECT_FALSE(e.valid);
  EXPECT_EQ(e.n_samples + e.failures, 10'000u);
  auto rare = [](const arith::FactoredInteger& n) -> double {
    if (n.divides_by(89) && n.divides_by(97)) throw ResourceError("boom");
    return 1.0;
  };
  EXPECT_TRUE(random_model::estimate_expectation(s, rare, 10'000).valid);
}

TEST(Estimate, StderrShrinksWithCount) {
  const Sampler s({2, 1e6, 17});
  auto stat = [](const arith::FactoredInteger& n) { return static_cast<double>(n.omega()); };
  const auto a = random_model::estimate_expectation(s, stat, 40'000);
  const auto b = random_model::estimate_expectation(s, stat, 160'000);
  EXPECT_NEAR(a.stderr_ / b.stderr_, 2.0, 0.4);
}

TEST(Fiber, ZeroIsClosedForm) {
  const double y = 1000;
  const auto r = random_model::fiber_probability(y, 0, 200'000, 3);
  const Sampler s({2, y, 3});
  EXPECT_NEAR(r.estimate.mean, s.mass_of_one(), 4 * r.estimate.stderr_ + 1e-12);
}

TEST(Fiber, HistogramSumsToOne) {
  const auto h = random_model::fiber_histogram(1e5, 50'000, 5);
  double total = 0;
  for (double p : h.probability) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Fiber, ModelWithinWideBand) {
  const double y = std::exp(16.0);  // h = 4
  const auto h = random_model::fiber_histogram(y, 100'000, 9);
  EXPECT_NEAR(h.h, 4.0, 1e-12);
  for (int k = 4; k <= 12 && k < static_cast<int>(h.probability.size()); ++k) {
    if (h.probability[k] == 0) continue;
    const double ratio = h.probability[k] / h.model[k];
    EXPECT_GE(ratio, 1e-2) << k;
    EXPECT_LE(ratio, 1e2) << k;
  }
}

TEST(Tail, MonotoneAndBounded) {
  const auto rows = random_model::tail_probability_m2(1e4, {3, 5, 10, 30, 100}, 20'000, 11);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].estimate.mean, 0);
    EXPECT_LE(rows[i].estimate.mean, 1);
    if (i) {
      EXPECT_LE(rows[i].estimate.mean,
                rows[i - 1].estimate.mean + 3 * rows[i - 1].estimate.stderr_);
    }
  }
  EXPECT_THROW(random_model::tail_probability_m2(1e4, {2}, 10, 1), ConfigError);
}

TEST(DyExpectation, EmptyRangeIsOne) {
  const auto r = random_model::d_y_expectation(24, 29, 100, 1);
  EXPECT_EQ(r.estimate.mean, 1.0);
  EXPECT_EQ(r.estimate.stderr_, 0.0);
}

TEST(ExactExpectation, MatchesMonteCarlo) {
  const double exact = static_cast<double>(bulk::exact_expectation_small(12));
  const auto e = random_model::estimate_expectation(
      MeasureSpec{2, 12, 21},
      [](const arith::FactoredInteger& n) { return static_cast<double>(delta::delta_max(delta::delta_profile(n))); },
      200'000);
  EXPECT_NEAR(e.mean, exact, 4 * e.stderr_);
}

TEST(SamplerLaw, AtomsMatchExactMasses) {
  const Sampler s({10, 30, 19});  // primes 11, 13, 17, 19, 23, 29
  std::map<std::uint64_t, std::uint64_t> freq;
  const std::uint64_t count = 400'000;
  for (std::uint64_t i = 0; i < count; ++i) ++freq[s.draw(i).value()];
  const auto& primes = s.primes().primes;
  for (std::uint64_t mask = 0; mask < (1u << primes.size()); ++mask) {
    std::uint64_t n = 1;
    for (std::size_t k = 0; k < primes.size(); ++k) {
      if (mask >> k & 1) n *= primes[k];
    }
    const double p = s.probability(arith::factorize(n));
    const double sd = std::sqrt(p * (1 - p) / count);
    EXPECT_NEAR(static_cast<double>(freq[n]) / count, p, 4 * sd + 1e-12) << n;
  }
}

TEST(EtComplement, ShrinksAsTGrows) {
  const Sampler s({2, 1e4, 23});
  std::vector<double> est;
  for (double T : {3.0, 10.0, 30.0, 100.0}) {
    et::EtParams p;
    p.T = T;
    est.push_back(random_model::estimate_expectation(
                      s, [&](const arith::FactoredInteger& n) { return et::in_E_T(n, p).member ? 0.0 : 1.0; },
                      20'000)
                      .mean);
  }
  for (std::size_t i = 1; i < est.size(); ++i) EXPECT_LE(est[i], est[i - 1] + 0.01);
}
