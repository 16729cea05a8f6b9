#pragma once

#include <Eigen/Core>

#include "dynamics.hpp"
#include "grid.hpp"
#include "scaling.hpp"

namespace ycv::testing {

inline MaturityGrid make_grid(double delta, std::vector<double> maturities,
                              std::vector<std::string> labels) {
  MaturityGrid g;
  g.delta = delta;
  g.maturities = std::move(maturities);
  g.labels = std::move(labels);
  g.validate();
  return g;
}

inline ScalingSpec default_scaling() { return ScalingSpec{0.025, 1e-4}; }

/// Correlated long-maturity block plus a quiet short end. The scale keeps
/// simulated yields positive over very long horizons; the tight correlation
/// keeps estimation errors of different entries moving together.
inline Eigen::MatrixXd block_sigma(const std::vector<double>& big_diag, double rho,
                                   double short_var, double short_corr) {
  const Eigen::Index n = static_cast<Eigen::Index>(big_diag.size());
  Eigen::MatrixXd sigma(n + 1, n + 1);
  sigma(0, 0) = short_var;
  for (Eigen::Index i = 0; i < n; ++i) {
    double vi = std::sqrt(big_diag[static_cast<std::size_t>(i)]);
    sigma(0, i + 1) = sigma(i + 1, 0) = short_corr * std::sqrt(short_var) * vi;
    for (Eigen::Index j = 0; j < n; ++j) {
      double vj = std::sqrt(big_diag[static_cast<std::size_t>(j)]);
      sigma(i + 1, j + 1) = (i == j ? 1.0 : rho) * vi * vj;
    }
  }
  return sigma;
}

/// d = 4 recovery setup: weekly grid with {10, 15, 20} year maturities.
inline MaturityGrid recovery_grid() {
  return make_grid(1.0 / 52.0, {1.0 / 52.0, 10.0, 15.0, 20.0}, {"1W", "10Y", "15Y", "20Y"});
}
inline Eigen::MatrixXd recovery_sigma() {
  return block_sigma({0.012, 0.014, 0.016}, 0.99, 1e-8, 0.2);
}

/// d = 5 back-testing setup with annuity maturities {5, 10, 15}.
inline MaturityGrid backtest_grid() {
  return make_grid(1.0 / 52.0, {1.0 / 52.0, 5.0, 10.0, 15.0, 20.0},
                   {"1W", "5Y", "10Y", "15Y", "20Y"});
}
inline Eigen::MatrixXd backtest_sigma() {
  return block_sigma({0.012, 0.015, 0.020, 0.025}, 0.9, 1e-6, 0.3);
}

/// d = 3 arbitrage setup: nearly collinear far maturities with a 1:4
/// variance ratio, so the variance-matched hedge cancels almost all noise.
inline MaturityGrid arbitrage_grid() {
  return make_grid(1.0 / 52.0, {1.0 / 52.0, 10.0, 20.0}, {"1W", "10Y", "20Y"});
}
inline Eigen::MatrixXd arbitrage_sigma() {
  Eigen::MatrixXd sigma(3, 3);
  double s11 = 0.05, s22 = 0.20, rho = 0.99995;
  sigma << 1e-8, 0.2 * std::sqrt(1e-8 * s11), 0.2 * std::sqrt(1e-8 * s22),
      0.2 * std::sqrt(1e-8 * s11), s11, rho * std::sqrt(s11 * s22),
      0.2 * std::sqrt(1e-8 * s22), rho * std::sqrt(s11 * s22), s22;
  return sigma;
}

/// Matched-horizon bias setup: quarterly grid nested in the weekly one, with
/// the pronounced drift bias sitting on the 3M diagonal.
inline MaturityGrid bias_grid_weekly() {
  return make_grid(1.0 / 52.0, {1.0 / 52.0, 0.25, 10.0, 20.0}, {"1W", "3M", "10Y", "20Y"});
}
inline MaturityGrid bias_grid_quarterly() {
  return make_grid(0.25, {0.25, 10.0, 20.0}, {"3M", "10Y", "20Y"});
}
inline Eigen::MatrixXd bias_sigma_weekly() {
  Eigen::MatrixXd sigma(4, 4);
  // The 3M variance is kept small: its log-volatility scales like
  // sqrt(s/theta)/m, and an exploding short end drags the long yields
  // negative through the no-arbitrage drift. The quarterly drift bias on this
  // slot is still sixty times the true value, which is the point of the
  // matched-horizon comparison.
  double s3m = 1e-4, s10 = 0.012, s20 = 0.016;
  sigma.setZero();
  sigma(0, 0) = 1e-8;
  sigma(1, 1) = s3m;
  sigma(2, 2) = s10;
  sigma(3, 3) = s20;
  sigma(2, 3) = sigma(3, 2) = 0.95 * std::sqrt(s10 * s20);
  sigma(0, 1) = sigma(1, 0) = 0.5 * std::sqrt(1e-8 * s3m);
  sigma(0, 2) = sigma(2, 0) = 0.2 * std::sqrt(1e-8 * s10);
  sigma(0, 3) = sigma(3, 0) = 0.2 * std::sqrt(1e-8 * s20);
  sigma(1, 2) = sigma(2, 1) = 0.3 * std::sqrt(s3m * s10);
  sigma(1, 3) = sigma(3, 1) = 0.3 * std::sqrt(s3m * s20);
  return sigma;
}
inline Eigen::MatrixXd bias_sigma_quarterly() {
  return bias_sigma_weekly().bottomRightCorner(3, 3);
}

inline YieldPanel simulate_panel(const MaturityGrid& grid, const Eigen::MatrixXd& sigma,
                                 double level, int steps, std::uint64_t seed,
                                 const ScalingSpec& scaling = default_scaling()) {
  FactorLoadings loadings = FactorLoadings::from_sigma(sigma);
  Eigen::VectorXd initial =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), level);
  return simulate_path(initial, steps, loadings, scaling, seed, grid);
}

}  // namespace ycv::testing
