#include "dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "errors.hpp"
#include "gaussian.hpp"
#include "support/fixtures.hpp"
#include "support/gauss_hermite.hpp"
#include "support/stats.hpp"

namespace ycv {
namespace {

using testing::make_grid;

TEST(FactorLoadingsTest, CholeskyReproducesSigma) {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 0.0787, 0.1021, 0.1021, 0.1635;
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  EXPECT_LT((fl.factor() * fl.factor().transpose() - sigma).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FactorLoadingsTest, SingularSigmaUsesEigenFallback) {
  Eigen::VectorXd v(3);
  v << 0.1, 0.2, 0.3;
  Eigen::MatrixXd sigma = v * v.transpose();  // rank one
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  EXPECT_LT((fl.factor() * fl.factor().transpose() - sigma).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FactorLoadingsTest, RejectsBadMatrices) {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  EXPECT_THROW(FactorLoadings::from_sigma(asym), Error);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(FactorLoadings::from_sigma(indef), Error);
}

TEST(UpsilonTest, HandValueAtFiveYears) {
  // Y(t-d, t+5) comes from flat top-end extrapolation of the previous row.
  MaturityGrid g = make_grid(1.0 / 52.0, {1.0 / 52.0, 5.0}, {"1W", "5Y"});
  YieldPanel p;
  p.grid = g;
  p.yields.resize(2, 2);
  p.yields << 0.021, 0.021, 0.02, 0.02;
  p.dates = synthetic_dates(2, g.delta);
  UpsilonSeries u = compute_upsilon(p, true);
  EXPECT_NEAR(u.values(1, 0), -0.0054038, 1e-7);
  EXPECT_NEAR(u.values(1, 0), 5.0 * 0.02 - (5.0 + 1.0 / 52.0) * 0.021, 1e-15);
  EXPECT_EQ(u.short_yields.size(), 2);
  EXPECT_DOUBLE_EQ(u.short_yields[0], 0.021);
}

TEST(UpsilonTest, FlatCurveGivesMinusDeltaTimesLevel) {
  MaturityGrid g = make_grid(1.0 / 52.0, {1.0 / 52.0, 1.0, 5.0}, {"1W", "1Y", "5Y"});
  YieldPanel p;
  p.grid = g;
  p.yields = Eigen::MatrixXd::Constant(3, 3, 0.03);
  p.dates = synthetic_dates(3, g.delta);
  UpsilonSeries u = compute_upsilon(p, true);
  for (Eigen::Index k = 0; k < u.count(); ++k) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      EXPECT_NEAR(u.values(j, k), -g.delta * 0.03, 1e-15);
    }
  }
}

TEST(UpsilonTest, ZeroCurveGivesZero) {
  MaturityGrid g = make_grid(1.0 / 52.0, {1.0 / 52.0, 1.0}, {"1W", "1Y"});
  YieldPanel p;
  p.grid = g;
  p.yields = Eigen::MatrixXd::Zero(3, 2);
  p.dates = synthetic_dates(3, g.delta);
  UpsilonSeries u = compute_upsilon(p, true);
  EXPECT_DOUBLE_EQ(u.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(HjmDriftTest, TableDiagonalEntry) {
  // Flat curve at 1.0 has h = 1, so the drift entry is delta/2 * s_ii.
  MaturityGrid g = make_grid(1.0 / 52.0, {1.0 / 52.0, 5.0}, {"1W", "5Y"});
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2, 2);
  sigma(1, 1) = 0.0787;
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec{0.025, std::nullopt};
  Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 1.0);
  Eigen::VectorXd drift = hjm_drift(y, 0.0, fl, spec, g.delta);
  EXPECT_NEAR(drift[1], 7.5673e-4, 1e-8);
  EXPECT_NEAR(drift[1], 0.0787 / 104.0, 1e-15);
  EXPECT_DOUBLE_EQ(drift[0], 0.0);
}

TEST(HjmDriftTest, ZeroSigmaLeavesOnlyShortYieldTerm) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(3, 3);
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec{0.025, 1e-4};
  Eigen::VectorXd y = Eigen::VectorXd::Constant(3, 0.02);
  Eigen::VectorXd drift = hjm_drift(y, 0.015, fl, spec, 0.25);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(drift[j], -0.25 * 0.015);
  EXPECT_DOUBLE_EQ(hjm_drift(y, 0.0, fl, spec, 0.25).cwiseAbs().maxCoeff(), 0.0);
}

/// The no-arbitrage drift equals the log moment generating function of the
/// Gaussian shock, here cross-checked by quadrature.
TEST(HjmDriftTest, MatchesLogMgfByQuadrature) {
  MaturityGrid g = testing::backtest_grid();
  Eigen::MatrixXd sigma = testing::backtest_sigma();
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec = testing::default_scaling();
  Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 0.03);
  Eigen::VectorXd hs = varsigma_diagonal(y, spec);
  Eigen::VectorXd drift = hjm_drift(y, 0.0, fl, spec, g.delta);
  for (Eigen::Index j = 0; j < 5; ++j) {
    // log E exp(-sqrt(delta) * row_j(vs * Lambda) . eps) via 1-d quadrature per factor
    Eigen::VectorXd row = hs[j] * fl.factor().row(j).transpose();
    double log_mgf = 0.0;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
      double a = -std::sqrt(g.delta) * row[i];
      log_mgf += std::log(testing::normal_expectation([a](double z) { return std::exp(a * z); }));
    }
    EXPECT_NEAR(drift[j], log_mgf, 1e-10);
  }
}

TEST(SimulateStepTest, FlatCurveIsFixedPointWithoutVolatility) {
  MaturityGrid g = make_grid(1.0 / 52.0, {1.0 / 52.0, 1.0, 5.0}, {"1W", "1Y", "5Y"});
  FactorLoadings fl = FactorLoadings::from_sigma(Eigen::MatrixXd::Zero(3, 3));
  ScalingSpec spec = testing::default_scaling();
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(3, 0.02);
  Eigen::VectorXd next = simulate_step(prev, fl, spec, Eigen::VectorXd::Zero(3), g);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(next[j], 0.02, 1e-15);
}

TEST(SimulateStepTest, ZeroNoiseDeviatesOnlyThroughDriftTerm) {
  MaturityGrid g = testing::backtest_grid();
  Eigen::MatrixXd sigma = testing::backtest_sigma();
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec = testing::default_scaling();
  Eigen::VectorXd prev = Eigen::VectorXd::Constant(5, 0.03);
  Eigen::VectorXd with_vol = simulate_step(prev, fl, spec, Eigen::VectorXd::Zero(5), g);
  FactorLoadings zero = FactorLoadings::from_sigma(Eigen::MatrixXd::Zero(5, 5));
  Eigen::VectorXd without = simulate_step(prev, zero, spec, Eigen::VectorXd::Zero(5), g);
  Eigen::VectorXd hs = varsigma_diagonal(shifted_values(prev, g, true), spec);
  for (Eigen::Index j = 0; j < 5; ++j) {
    double m = g.maturities[static_cast<std::size_t>(j)];
    double sp_term = 0.5 * g.delta * hs[j] * hs[j] * sigma(j, j) / m;
    EXPECT_NEAR(with_vol[j] - without[j], sp_term, 1e-15);
  }
}

TEST(SimulatePathTest, DeterministicAndConstantForZeroSigma) {
  MaturityGrid g = testing::backtest_grid();
  Eigen::MatrixXd sigma = testing::backtest_sigma();
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec = testing::default_scaling();
  Eigen::VectorXd start = Eigen::VectorXd::Constant(5, 0.03);
  YieldPanel a = simulate_path(start, 25, fl, spec, 99, g);
  YieldPanel b = simulate_path(start, 25, fl, spec, 99, g);
  EXPECT_EQ((a.yields - b.yields).cwiseAbs().maxCoeff(), 0.0);
  YieldPanel c = simulate_path(start, 25, fl, spec, 100, g);
  EXPECT_GT((a.yields - c.yields).cwiseAbs().maxCoeff(), 0.0);

  // One step reduces to simulate_step with the stream's noise.
  GaussianStream stream(99);
  Eigen::VectorXd noise(5);
  for (Eigen::Index j = 0; j < 5; ++j) noise[j] = stream.normal(1, static_cast<std::uint64_t>(j));
  Eigen::VectorXd step = simulate_step(start, fl, spec, noise, g);
  EXPECT_EQ((a.yields.row(1).transpose() - step).cwiseAbs().maxCoeff(), 0.0);

  FactorLoadings zero = FactorLoadings::from_sigma(Eigen::MatrixXd::Zero(5, 5));
  YieldPanel flat = simulate_path(start, 10, zero, spec, 1, g);
  EXPECT_NEAR((flat.yields.rowwise() - start.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

/// One-step sample moments against the closed-form conditional law.
TEST(SimulateStepTest, MonteCarloMatchesConditionalMoments) {
  MaturityGrid g = testing::arbitrage_grid();
  Eigen::MatrixXd sigma = testing::arbitrage_sigma();
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec = testing::default_scaling();
  Eigen::VectorXd prev(3);
  prev << 0.02, 0.028, 0.034;
  Eigen::VectorXd shifted = shifted_values(prev, g, true);
  UpsilonMoments closed = upsilon_moments(shifted, prev[0], fl, spec, g.delta);

  const int n = 100000;
  GaussianStream stream(2024);
  Eigen::MatrixXd draws(n, 3);
  Eigen::VectorXd noise(3);
  for (int s = 0; s < n; ++s) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      noise[j] = stream.normal(static_cast<std::uint64_t>(s + 1), static_cast<std::uint64_t>(j));
    }
    Eigen::VectorXd next = simulate_step(prev, fl, spec, noise, g);
    for (Eigen::Index j = 0; j < 3; ++j) {
      double m = g.maturities[static_cast<std::size_t>(j)];
      draws(s, j) = m * next[j] - (m + g.delta) * shifted[j];
    }
  }
  Eigen::VectorXd mean = testing::col_mean(draws);
  Eigen::MatrixXd cov = testing::sample_covariance(draws);
  for (Eigen::Index j = 0; j < 3; ++j) {
    double se = std::sqrt(closed.covariance(j, j) / n);
    EXPECT_NEAR(mean[j], closed.mean[j], 4.0 * se);
    for (Eigen::Index l = 0; l <= j; ++l) {
      double cse = testing::cov_entry_se(closed.covariance, j, l, n);
      EXPECT_NEAR(cov(j, l), closed.covariance(j, l), 4.0 * cse);
    }
  }
}

/// Discounted bond prices are one-step martingales under the simulated law.
TEST(SimulateStepTest, MartingaleCheck) {
  MaturityGrid g = testing::backtest_grid();
  Eigen::MatrixXd sigma = testing::backtest_sigma();
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec = testing::default_scaling();
  Eigen::VectorXd prev(5);
  prev << 0.02, 0.025, 0.03, 0.032, 0.033;
  Eigen::VectorXd shifted = shifted_values(prev, g, true);

  const int n = 100000;
  GaussianStream stream(5150);
  Eigen::VectorXd noise(5);
  std::vector<std::vector<double>> ratio(5);
  for (int s = 0; s < n; ++s) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      noise[j] = stream.normal(static_cast<std::uint64_t>(s + 1), static_cast<std::uint64_t>(j));
    }
    Eigen::VectorXd next = simulate_step(prev, fl, spec, noise, g);
    for (Eigen::Index j = 1; j < 5; ++j) {
      double m = g.maturities[static_cast<std::size_t>(j)];
      // B_t^{-1} P(t,t+m) over B_{t-d}^{-1} P(t-d,t+m)
      double lhs = std::exp(-g.delta * prev[0] - m * next[j]);
      double rhs = std::exp(-(m + g.delta) * shifted[j]);
      ratio[static_cast<std::size_t>(j)].push_back(lhs / rhs);
    }
  }
  for (Eigen::Index j = 1; j < 5; ++j) {
    auto stats = testing::sample_stats(ratio[static_cast<std::size_t>(j)]);
    EXPECT_NEAR(stats.mean, 1.0, 4.0 * stats.se_mean);
  }
}

/// The one-step conditional covariance is exactly linear in the grid size.
TEST(UpsilonMomentsTest, CovarianceScalesLinearlyInDelta) {
  Eigen::MatrixXd sigma = testing::backtest_sigma();
  FactorLoadings fl = FactorLoadings::from_sigma(sigma);
  ScalingSpec spec = testing::default_scaling();
  Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 0.03);
  UpsilonMoments weekly = upsilon_moments(y, 0.02, fl, spec, 1.0 / 52.0);
  UpsilonMoments quarterly = upsilon_moments(y, 0.02, fl, spec, 0.25);
  EXPECT_LT((quarterly.covariance - (0.25 * 52.0) * weekly.covariance).cwiseAbs().maxCoeff(),
            1e-15);
}

}  // namespace
}  // namespace ycv
