#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bioinsure/errors.hpp"
#include "bioinsure/montecarlo.hpp"
#include "oracles.hpp"

namespace bioinsure {
namespace {

ScenarioSpec reference_scenario(double rho = 2.0) {
  return ScenarioSpec{.service = ServiceModel{.mu_max = 10.0, .k_mu = 0.3, .sigma_0 = 2.0, .k_sigma = 0.2},
                      .cost = CostModel{.c1 = 0.1, .c2 = 0.05},
                      .preference = RiskPreference{.rho = rho},
                      .market = std::nullopt,
                      .v_bounds = Interval{0.0, 50.0}};
}

BufferPoolSpec pool(double p, double b, std::uint64_t horizon = 20) {
  return BufferPoolSpec{.issuance_per_period = 100.0, .buffer_fraction = b, .reversal_probability = p,
                        .reversal_severity = 0.25, .horizon = horizon};
}

TEST(Substream, DependsOnlyOnKey) {
  auto a = substream(1, 2, 3);
  auto b = substream(1, 2, 3);
  auto c = substream(1, 2, 4);
  auto d = substream(1, 3, 3);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), Execution{4}, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(10, Execution{3},
                            [](std::size_t i) {
                              if (i == 7) throw NumericalError("boom");
                            }),
               NumericalError);
}

TEST(SampleNormal, DegenerateDistribution) {
  const auto s = sample_normal(IncomeDistribution{.mean = 4.25, .sd = 0.0}, SamplerConfig{.n_samples = 5000});
  EXPECT_EQ(s.n, 5000u);
  EXPECT_EQ(s.mean, 4.25);
  EXPECT_EQ(s.sd, 0.0);
  EXPECT_EQ(s.min, 4.25);
  EXPECT_EQ(s.max, 4.25);
}

TEST(SampleNormal, SingleSampleHasZeroSd) {
  const auto s = sample_normal(IncomeDistribution{.mean = 0.0, .sd = 1.0}, SamplerConfig{.n_samples = 1});
  EXPECT_EQ(s.n, 1u);
  EXPECT_EQ(s.sd, 0.0);
  EXPECT_EQ(s.min, s.mean);
}

TEST(SampleNormal, MomentsWithinSamplingError) {
  const SamplerConfig cfg{.n_samples = 200000, .seed = 42};
  const auto s = sample_normal(IncomeDistribution{.mean = 3.0, .sd = 2.0}, cfg);
  EXPECT_NEAR(s.mean, 3.0, 4.0 * 2.0 / std::sqrt(200000.0));
  EXPECT_NEAR(s.sd, 2.0, 0.02);
}

TEST(SampleNormal, RejectsZeroSamples) {
  EXPECT_THROW(sample_normal(IncomeDistribution{.mean = 0.0, .sd = 1.0}, SamplerConfig{.n_samples = 0}),
               ValidationError);
}

TEST(SampleNormal, IdenticalAcrossWorkerCounts) {
  const SamplerConfig cfg{.n_samples = 50000, .seed = 9, .stream_id = 2};
  const IncomeDistribution d{.mean = 1.0, .sd = 0.3};
  const auto one = sample_normal(d, cfg, Execution{1});
  for (unsigned w : {2u, 3u, 8u}) {
    const auto many = sample_normal(d, cfg, Execution{w});
    EXPECT_EQ(one.mean, many.mean);
    EXPECT_EQ(one.sd, many.sd);
    EXPECT_EQ(one.min, many.min);
    EXPECT_EQ(one.max, many.max);
  }
}

TEST(SampleService, UsesServiceMoments) {
  const auto s = reference_scenario();
  const auto stats = sample_service(s, BiodiversityLevel(5.0), SamplerConfig{.n_samples = 100000, .seed = 1});
  EXPECT_NEAR(stats.mean, testing::ref_mu(s.service, 5.0), 4.0 * testing::ref_sigma(s.service, 5.0) / std::sqrt(1e5));
  EXPECT_THROW(sample_service(s, BiodiversityLevel(60.0), SamplerConfig{}), OutOfBoundsError);
}

TEST(McCertaintyEquivalent, WithinThreeStandardErrorsOfAnalytic) {
  const auto s = reference_scenario();
  for (double v : {0.0, 2.0, 5.0, 20.0}) {
    const auto est = mc_certainty_equivalent(s, BiodiversityLevel(v), std::nullopt,
                                             SamplerConfig{.n_samples = 100000, .seed = 77});
    const double analytic = testing::ref_ce(s, v);
    EXPECT_GT(est.standard_error, 0.0);
    EXPECT_LE(std::abs(est.ce_hat - analytic), 3.0 * est.standard_error) << "v=" << v;
  }
}

TEST(McCertaintyEquivalent, ContractAppliedBeforeSampling) {
  const auto s = reference_scenario();
  const InsuranceContract c{.alpha = 0.5, .lambda = 0.1};
  const auto est = mc_certainty_equivalent(s, BiodiversityLevel(1.0), c, SamplerConfig{.n_samples = 100000, .seed = 3});
  EXPECT_LE(std::abs(est.ce_hat - testing::ref_ce(s, 1.0, 0.5, 0.1)), 3.0 * est.standard_error);
}

TEST(McCertaintyEquivalent, FullCoverageIsExact) {
  const auto s = reference_scenario();
  const auto est = mc_certainty_equivalent(s, BiodiversityLevel(1.0), InsuranceContract{.alpha = 1.0, .lambda = 0.0},
                                           SamplerConfig{.n_samples = 1000, .seed = 3});
  EXPECT_NEAR(est.ce_hat, testing::ref_ce(s, 1.0, 1.0, 0.0), 1e-12);
  EXPECT_EQ(est.standard_error, 0.0);
}

TEST(McCertaintyEquivalent, RiskNeutralReturnsSampleMean) {
  const auto s = reference_scenario(0.0);
  const SamplerConfig cfg{.n_samples = 10000, .seed = 5};
  const auto est = mc_certainty_equivalent(s, BiodiversityLevel(3.0), std::nullopt, cfg);
  const auto d = net_income_distribution(s, BiodiversityLevel(3.0));
  EXPECT_EQ(est.ce_hat, sample_normal(d, cfg).mean);
}

TEST(McCertaintyEquivalent, StrongRiskAversionDoesNotOverflow) {
  const auto s = reference_scenario(400.0);
  const auto est = mc_certainty_equivalent(s, BiodiversityLevel(0.0), std::nullopt,
                                           SamplerConfig{.n_samples = 20000, .seed = 8});
  EXPECT_TRUE(std::isfinite(est.ce_hat));
  EXPECT_TRUE(std::isfinite(est.standard_error));
}

TEST(McCertaintyEquivalent, DeterministicAcrossWorkerCounts) {
  const auto s = reference_scenario();
  const SamplerConfig cfg{.n_samples = 30000, .seed = 12, .stream_id = 1};
  const auto a = mc_certainty_equivalent(s, BiodiversityLevel(4.0), std::nullopt, cfg, Execution{1});
  const auto b = mc_certainty_equivalent(s, BiodiversityLevel(4.0), std::nullopt, cfg, Execution{5});
  EXPECT_EQ(a.ce_hat, b.ce_hat);
  EXPECT_EQ(a.standard_error, b.standard_error);
}

TEST(BufferPool, HandComputedSinglePeriod) {
  const BufferPoolSpec spec{.issuance_per_period = 100.0, .buffer_fraction = 0.2, .reversal_probability = 1.0,
                            .reversal_severity = 0.3, .horizon = 1};
  std::vector<BufferPeriod> trace;
  const auto t = simulate_buffer_trial(spec, SamplerConfig{.seed = 1}, 0, &trace);
  EXPECT_DOUBLE_EQ(t.deficit, 10.0);
  EXPECT_EQ(t.buffer_terminal, 0.0);
  EXPECT_TRUE(t.shortfall);
  EXPECT_DOUBLE_EQ(t.sold, 80.0);
  EXPECT_DOUBLE_EQ(t.absorbed, 20.0);
  EXPECT_DOUBLE_EQ(t.stored_terminal, 70.0);
  EXPECT_DOUBLE_EQ(t.net_credits(), 70.0);
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].period, 1u);
  EXPECT_DOUBLE_EQ(trace[0].reversal, 30.0);
  EXPECT_DOUBLE_EQ(trace[0].deficit, 10.0);
}

TEST(BufferPool, ReplayMatchesHandLedger) {
  // I=10, b=0.5, d=0.5: t1 no event (buffer 5, stored 10); t2 event: stored 20,
  // loss 10 vs buffer 10 -> covered, no shortfall; t3 event: buffer 5, stored 20, loss 10 -> deficit 5.
  const BufferPoolSpec spec{.issuance_per_period = 10.0, .buffer_fraction = 0.5, .reversal_probability = 0.5,
                            .reversal_severity = 0.5, .horizon = 3};
  const auto t = replay_buffer_trial(spec, {false, true, true});
  EXPECT_DOUBLE_EQ(t.absorbed, 15.0);
  EXPECT_DOUBLE_EQ(t.deficit, 5.0);
  EXPECT_DOUBLE_EQ(t.buffer_terminal, 0.0);
  EXPECT_DOUBLE_EQ(t.stored_terminal, 10.0);
  EXPECT_TRUE(t.shortfall);
  EXPECT_THROW(replay_buffer_trial(spec, {true}), ValidationError);
}

TEST(BufferPool, NoReversalRiskKeepsFullBuffer) {
  const auto spec = pool(0.0, 0.2, 30);
  const auto s = simulate_buffer_pool(spec, 2000, SamplerConfig{.seed = 4});
  EXPECT_EQ(s.shortfall_probability, 0.0);
  EXPECT_DOUBLE_EQ(s.expected_terminal_buffer, 0.2 * 100.0 * 30);
  EXPECT_DOUBLE_EQ(s.expected_net_credits, 0.8 * 100.0 * 30);
  EXPECT_EQ(s.stderr_shortfall, 0.0);
}

TEST(BufferPool, ConservationIdentitiesPerTrial) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const BufferPoolSpec spec{.issuance_per_period = 1.0 + 100.0 * u(rng), .buffer_fraction = u(rng),
                              .reversal_probability = u(rng), .reversal_severity = 0.01 + 0.99 * u(rng),
                              .horizon = 1 + static_cast<std::uint64_t>(60 * u(rng))};
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
      const auto t = simulate_buffer_trial(spec, SamplerConfig{.seed = 99}, trial);
      const double scale = std::max(1.0, t.issued);
      EXPECT_NEAR(t.sold + t.buffer_terminal + t.absorbed, t.issued, 1e-9 * scale);
      EXPECT_NEAR(t.stored_terminal + t.absorbed + t.deficit, t.issued, 1e-9 * scale);
      EXPECT_GE(t.buffer_terminal, 0.0);
      EXPECT_EQ(t.shortfall, t.deficit > 0.0);
    }
  }
}

TEST(BufferPool, MonotoneUnderCommonRandomNumbers) {
  const std::vector<double> ps{0.0, 0.02, 0.05, 0.1, 0.2};
  const std::vector<double> bs{0.05, 0.1, 0.2, 0.3, 0.5};
  std::vector<std::vector<double>> prob(ps.size(), std::vector<double>(bs.size()));
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < bs.size(); ++j)
      prob[i][j] = simulate_buffer_pool(pool(ps[i], bs[j]), 2000, SamplerConfig{.seed = 21}).shortfall_probability;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < bs.size(); ++j) {
      if (i > 0) EXPECT_GE(prob[i][j], prob[i - 1][j]);
      if (j > 0) EXPECT_LE(prob[i][j], prob[i][j - 1]);
    }
  }
  EXPECT_EQ(prob[0][0], 0.0);
  EXPECT_GT(prob[4][0], 0.0);
}

TEST(BufferPool, DeterministicAcrossWorkerCounts) {
  const auto spec = pool(0.1, 0.2);
  const SamplerConfig cfg{.seed = 5};
  EXPECT_EQ(simulate_buffer_pool(spec, 3000, cfg, Execution{1}), simulate_buffer_pool(spec, 3000, cfg, Execution{7}));
}

TEST(BufferPool, ValidationNamesField) {
  auto spec = pool(1.5, 0.2);
  try {
    validate(spec);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "buffer_pool.reversal_probability");
  }
  spec = pool(0.1, 0.2, 0);
  EXPECT_THROW(validate(spec), ValidationError);
  spec = pool(0.1, 0.2);
  spec.reversal_severity = 0.0;
  EXPECT_THROW(validate(spec), ValidationError);
  EXPECT_THROW(simulate_buffer_pool(pool(0.1, 0.2), 0, SamplerConfig{}), ValidationError);
}

TEST(PairwiseSum, ExactOnIntegersAndOrderFixed) {
  std::vector<double> xs(10001);
  std::iota(xs.begin(), xs.end(), 0.0);
  EXPECT_EQ(pairwise_sum(xs), 10000.0 * 10001.0 / 2.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

}  // namespace
}  // namespace bioinsure
