#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dcscale/scaling.hpp"
#include "dcscale/synth.hpp"
#include "oracle/naive_dissector.hpp"
#include "test_support.hpp"

namespace dcscale {
namespace {

std::vector<LawSample> exact_law(double c, double e, const ThresholdGrid& grid) {
  std::vector<LawSample> s;
  for (double x : grid.values()) s.push_back({x, std::pow(x / c, e)});
  return s;
}

TEST(FitPowerLaw, RecoversExactLaw) {
  const auto samples = exact_law(0.05, -2.0, ThresholdGrid::log_spaced(0.001, 0.05, 12));
  const auto fit = fit_power_law(samples);
  EXPECT_NEAR(fit.C, 0.05, 1e-9);
  EXPECT_NEAR(fit.E, -2.0, 1e-9);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.n_points, 12u);
  EXPECT_NEAR(fit.intercept, 2.0 * std::log(0.05), 1e-9);
}

TEST(FitPowerLaw, Errors) {
  const std::vector<LawSample> flat{{0.001, 7}, {0.01, 7}, {0.1, 7}};
  try {
    fit_power_law(flat);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.reason(), FitError::Reason::DegenerateExponent);
  }
  const std::vector<LawSample> one_x{{0.01, 1}, {0.01, 2}};
  try {
    fit_power_law(one_x);
    FAIL();
  } catch (const FitError& e) {
    EXPECT_EQ(e.reason(), FitError::Reason::Underdetermined);
  }
  EXPECT_THROW(fit_power_law({}), FitError);
  const std::vector<LawSample> zero{{0.01, 0}, {0.02, 1}};
  EXPECT_THROW(fit_power_law(zero), DomainError);
}

TEST(FitPowerLaw, ArgumentScalingAndPermutationInvariance) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c_dist(1e-4, 1.0), e_dist(-3.0, 3.0), noise(-0.1, 0.1);
  for (int trial = 0; trial < 200; ++trial) {
    auto samples = exact_law(c_dist(rng), e_dist(rng), ThresholdGrid::log_spaced(1e-4, 0.2, 9));
    for (auto& s : samples) s.y *= std::exp(noise(rng));
    const auto fit = fit_power_law(samples);

    auto shuffled = samples;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto refit = fit_power_law(shuffled);
    EXPECT_EQ(refit.C, fit.C);
    EXPECT_EQ(refit.E, fit.E);
    EXPECT_EQ(refit.r_squared, fit.r_squared);

    for (const double lambda : {0.01, 3.0, 250.0}) {
      auto scaled = samples;
      for (auto& s : scaled) s.x *= lambda;
      const auto f = fit_power_law(scaled);
      EXPECT_NEAR(f.E, fit.E, 1e-12 * std::max(1.0, std::abs(fit.E)));
      EXPECT_NEAR(f.C / (lambda * fit.C), 1.0, 1e-9);
    }
  }
}

// Monte Carlo over 1000 seeds of a 12-point law with 5% multiplicative noise.
// The slope's standard error is 0.05 / sqrt(Sxx) ~ 0.01, so +-0.05 is a 5-sigma gate.
TEST(FitPowerLaw, NoisyLawExponentSpread) {
  const auto grid = ThresholdGrid::default_grid();
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.05);
  double sum = 0.0, sum_sq = 0.0, worst = 0.0;
  for (int seed = 0; seed < 1000; ++seed) {
    auto samples = exact_law(0.003, -1.8, grid);
    for (auto& s : samples) s.y *= std::exp(noise(rng));
    const double e = fit_power_law(samples).E;
    sum += e;
    sum_sq += e * e;
    worst = std::max(worst, std::abs(e + 1.8));
  }
  const double mean = sum / 1000.0;
  const double spread = std::sqrt(sum_sq / 1000.0 - mean * mean);
  RecordProperty("exponent_spread", std::to_string(spread));
  EXPECT_LT(worst, 0.05);
  EXPECT_NEAR(mean, -1.8, 0.005);
  EXPECT_LT(spread, 0.02);
}

TEST(ThresholdGrid, Validation) {
  EXPECT_THROW(ThresholdGrid({}), DomainError);
  EXPECT_THROW(ThresholdGrid({0.01, 0.01}), DomainError);
  EXPECT_THROW(ThresholdGrid({0.02, 0.01}), DomainError);
  EXPECT_THROW(ThresholdGrid({0.0, 0.01}), DomainError);
  EXPECT_THROW(ThresholdGrid({0.5, 1.0}), DomainError);
  EXPECT_THROW(ThresholdGrid::log_spaced(0.01, 0.001, 5), DomainError);
  EXPECT_THROW(ThresholdGrid::log_spaced(0.001, 0.01, 1), DomainError);

  const auto g = ThresholdGrid::default_grid();
  ASSERT_EQ(g.size(), 12u);
  EXPECT_EQ(g[0], 0.0005);
  EXPECT_EQ(g[11], 0.05);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    EXPECT_NEAR(std::log(g[i + 1] / g[i]), std::log(g[i] / g[i - 1]), 1e-12);
  }
}

std::vector<PricePoint> gbm(std::size_t n, std::uint64_t seed, double sigma = 1e-4) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::GeometricBrownianMotion;
  spec.n = n;
  spec.seed = seed;
  spec.sigma = sigma;
  return generate_series(spec);
}

TEST(DcCountLaw, ConstantSeriesIsInsufficient) {
  const auto flat = testing_support::from_prices(std::vector<double>(1000, 3.0));
  EXPECT_THROW(dc_count_law(flat, ThresholdGrid::default_grid()), InsufficientEventsError);
  EXPECT_THROW(overshoot_law(flat, ThresholdGrid::default_grid()), InsufficientEventsError);
}

TEST(DcCountLaw, GbmSamplesDecreaseAndFitTightly) {
  const auto series = gbm(1'000'000, 42);
  const auto law = dc_count_law(series, ThresholdGrid::log_spaced(0.0005, 0.02, 12));
  ASSERT_GE(law.samples.size(), 10u);
  for (std::size_t i = 1; i < law.samples.size(); ++i) {
    EXPECT_LE(law.samples[i].y, law.samples[i - 1].y);
  }
  EXPECT_GT(law.fit.r_squared, 0.99);
  EXPECT_LT(law.fit.E, 0.0);
}

TEST(DcCountLaw, RandomWalkExponentNearMinusTwo) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::ArithmeticRandomWalk;
  spec.n = 1'000'000;
  spec.start = 1000;
  spec.step = 0.01;
  spec.seed = 7;
  const auto law = dc_count_law(generate_series(spec), ThresholdGrid::log_spaced(2e-4, 1e-3, 10));
  EXPECT_NEAR(law.fit.E, -2.0, 0.15);
  EXPECT_GT(law.fit.r_squared, 0.99);
}

TEST(OvershootLaw, GbmOvershootTracksThreshold) {
  const auto series = gbm(1'000'000, 42);
  const auto law = overshoot_law(series, ThresholdGrid::log_spaced(0.0005, 0.01, 8));
  EXPECT_NEAR(law.fit.E, 1.0, 0.15);
  for (const auto& s : law.samples) {
    EXPECT_GE(s.y / s.x, 0.8) << s.x;
    EXPECT_LE(s.y / s.x, 1.2) << s.x;
  }
}

TEST(OvershootLaw, SawtoothHasNoOvershoot) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Sawtooth;
  spec.n = 1000;
  spec.amplitude = 0.01;
  const auto series = generate_series(spec);
  EXPECT_THROW(overshoot_law(series, ThresholdGrid({0.005, 0.01})), InsufficientEventsError);
}

TEST(Laws, GridSamplesMatchNaiveReferenceBitExactly) {
  std::mt19937_64 rng(12);
  const auto grid = ThresholdGrid::log_spaced(0.001, 0.01, 6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto series = testing_support::random_series(rng, 10'000, 1e-3, 2e-3);
    const auto counts = dc_count_law(series, grid, {1});
    const auto overs = overshoot_law(series, grid, {1});
    std::size_t ci = 0, oi = 0;
    for (double h : grid.values()) {
      const auto events = oracle::naive_events(series, h);
      const auto segments = oracle::naive_segments(series, events);
      std::size_t n_dc = 0;
      for (const auto& e : events) n_dc += e.kind == EventKind::DirectionalChange;
      double os_sum = 0.0;
      std::size_t n_os = 0;
      for (const auto& s : segments) {
        if (s.kind == SegmentKind::Overshoot) {
          os_sum += s.magnitude;
          ++n_os;
        }
      }
      if (n_dc > 0) {
        ASSERT_LT(ci, counts.samples.size());
        EXPECT_EQ(counts.samples[ci].x, h);
        EXPECT_EQ(counts.samples[ci++].y, static_cast<double>(n_dc));
      }
      if (n_os > 0 && os_sum > 0.0) {
        ASSERT_LT(oi, overs.samples.size());
        EXPECT_EQ(overs.samples[oi++].y, os_sum / static_cast<double>(n_os));
      }
    }
    EXPECT_EQ(ci, counts.samples.size());
    EXPECT_EQ(oi, overs.samples.size());
  }
}

TEST(Laws, ThreadCountDoesNotChangeResults) {
  const auto series = gbm(200'000, 3, 5e-4);
  const auto grid = ThresholdGrid::default_grid();
  const auto one = tally_grid(series, grid, ReturnConvention::Fractional, 1);
  const auto many = tally_grid(series, grid, ReturnConvention::Fractional, 5);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].threshold, many[i].threshold);
    EXPECT_EQ(one[i].tally.dc_count, many[i].tally.dc_count);
    EXPECT_EQ(one[i].tally.overshoot_sum, many[i].tally.overshoot_sum);
  }
}

std::vector<double> pareto(std::size_t n, std::uint64_t seed, double alpha = 2.5) {
  GeneratorSpec spec;
  spec.n = n;
  spec.seed = seed;
  spec.alpha = alpha;
  spec.x_min = 1.0;
  return generate_pareto(spec);
}

TEST(TailExponent, HillOnExactPareto) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto est = tail_exponent(pareto(100'000, seed), 1.0, TailMethod::Hill);
    EXPECT_NEAR(est.alpha, 2.5, 0.03);
    EXPECT_EQ(est.n_tail, 100'000u);
    EXPECT_NEAR(est.standard_error, 1.5 / std::sqrt(100'000.0), 1e-3);
  }
}

TEST(TailExponent, CcdfRegressionOnExactPareto) {
  const auto est = tail_exponent(pareto(100'000, 9), 1.0, TailMethod::CcdfRegression);
  EXPECT_NEAR(est.alpha, 2.5, 0.1);
}

TEST(TailExponent, InsufficientTail) {
  const std::vector<double> below(100, 0.5);
  EXPECT_THROW(tail_exponent(below, 1.0), InsufficientEventsError);
  const std::vector<double> nine{1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_THROW(tail_exponent(nine, 1.0), InsufficientEventsError);
  EXPECT_THROW(tail_exponent(nine, 0.0), DomainError);
}

TEST(TailExponent, JointRescalingInvariance) {
  const auto samples = pareto(5000, 4);
  const auto base = tail_exponent(samples, 1.5);
  for (const double k : {0.25, 8.0, 0.37, 123.4}) {
    auto scaled = samples;
    for (auto& x : scaled) x *= k;
    const auto est = tail_exponent(scaled, 1.5 * k);
    if (k == 0.25 || k == 8.0) {
      EXPECT_EQ(est.alpha, base.alpha);  // powers of two scale exactly
    } else {
      EXPECT_NEAR(est.alpha, base.alpha, 1e-12);
    }
    EXPECT_EQ(est.n_tail, base.n_tail);
  }
}

}  // namespace
}  // namespace dcscale
