#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "grid.hpp"
#include "scaling.hpp"

namespace ycv {

/// Annuity with one unit paid at each chosen maturity. The members must be a
/// nonempty subset of the grid maturities.
struct AnnuitySpec {
  std::vector<double> maturities;

  /// The conventional choice: yearly payments 1..10 plus 15.
  static AnnuitySpec standard();

  /// Indices of the members on the grid; throws if one is missing.
  std::vector<std::size_t> indices(const MaturityGrid& grid) const;
};

/// First-order Taylor value of the annuity: sum over members of 1 - m*Y(t,t+m).
double annuity_value(const Eigen::VectorXd& curve_row, const MaturityGrid& grid,
                     const AnnuitySpec& annuity);

/// Conditional forecast moments of the annuity value one step ahead.
struct PortfolioForecast {
  double mu = 0.0;
  double tau2 = 0.0;
};

/// Standardized out-of-sample residuals z_t = (realized - mu)/tau together
/// with the conditional standard deviations used.
struct ResidualSeries {
  std::vector<Eigen::Index> times;  // row index of the realized value
  std::vector<double> residuals;
  std::vector<double> taus;
  std::string label;
};

PortfolioForecast portfolio_forecast(const YieldPanel& panel, Eigen::Index up_to_row,
                                     const AnnuitySpec& annuity, const ScalingSpec& scaling,
                                     bool extrapolate_flat = false);

/// Expanding-window residuals: each forecast at row t uses data up to t-1
/// only. The second-moment kernel is refreshed every `stride` steps (1 =
/// every step); the level scaling always uses the current curve.
ResidualSeries residual_series(const YieldPanel& panel, const AnnuitySpec& annuity,
                               const ScalingSpec& scaling, Eigen::Index window_start,
                               int stride = 1, bool extrapolate_flat = false);

/// Residual diagnostics and Q-Q plot data against the standard normal.
struct ResidualDiagnostics {
  double mean = 0.0;
  double variance = 0.0;
  double lag1_autocorr = 0.0;
  double abs_lag1_autocorr = 0.0;
  std::vector<std::pair<double, double>> qq_pairs;  // (theoretical, sample)
};
ResidualDiagnostics residual_diagnostics(const std::vector<double>& residuals);

/// Self-financing demonstration portfolio in two maturities, weighted each
/// step so the two legs' return variances match. Emits the cumulative
/// realized-minus-prognosis gains with the no-arbitrage drift term in the
/// prognosis and with it removed, plus t-statistics of the per-step errors.
struct ArbitrageResult {
  std::vector<Eigen::Index> times;
  std::vector<double> weights;
  std::vector<double> gain_with_hjm;     // cumulative
  std::vector<double> gain_without_hjm;  // cumulative
  double t_with = 0.0;
  double t_without = 0.0;
};
ArbitrageResult arbitrage_portfolio(const YieldPanel& panel, double m1, double m2,
                                    const ScalingSpec& scaling, Eigen::Index window_start,
                                    int stride = 1, bool extrapolate_flat = false);

/// Measure-change density along an innovation path for a constant market
/// price of risk: product over steps of exp(-|lambda|^2/2 + lambda'eps).
/// Returns the running values xi_1..xi_T. A correctly normalized density has
/// unit expectation at every t.
std::vector<double> density_process(const Eigen::VectorXd& lambda,
                                    const Eigen::MatrixXd& innovations);

}  // namespace ycv
