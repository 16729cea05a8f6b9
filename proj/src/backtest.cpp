#include "backtest.hpp"

#include <algorithm>
#include <cmath>

#include "calibration.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "gaussian.hpp"

namespace ycv {

namespace {

/// Expanding-window state over the scaled increments. Row t's forecast uses
/// increments 1..t-1; push() appends the increment ending at the given row.
class ExpandingKernel {
 public:
  ExpandingKernel(const YieldPanel& panel, const ScalingSpec& scaling, bool extrapolate_flat)
      : panel_(panel),
        scaling_(scaling),
        extrapolate_(extrapolate_flat),
        d_(static_cast<Eigen::Index>(panel.cols())),
        m_(Eigen::MatrixXd::Zero(d_, d_)),
        cached_cc_(Eigen::MatrixXd::Zero(d_, d_)) {
    panel.grid.require_short_maturity();
    scaling.validate();
  }

  /// Consume the increment from row-1 to row.
  void push(Eigen::Index row) {
    Eigen::VectorXd shifted =
        shifted_values(panel_.yields.row(row - 1).transpose(), panel_.grid, extrapolate_);
    Eigen::VectorXd u(d_);
    for (Eigen::Index j = 0; j < d_; ++j) {
      double m = panel_.grid.maturities[static_cast<std::size_t>(j)];
      double ups = m * panel_.yields(row, j) - (m + panel_.grid.delta) * shifted[j];
      u[j] = ups / h_scale(shifted[j], scaling_);
    }
    m_.selfadjointView<Eigen::Lower>().rankUpdate(u);
    ++count_;
  }

  Eigen::Index count() const { return count_; }

  /// Refresh the cached second-moment kernel C_(K) C_(K)'.
  void refresh() {
    if (count_ == 0) fail(ErrorCode::kData, "backtest: empty estimation window");
    cached_cc_ = m_.selfadjointView<Eigen::Lower>();
    cached_cc_ /= static_cast<double>(count_);
  }

  /// S_(K)(y) from the cached kernel, level-scaled at the given curve.
  Eigen::MatrixXd s_matrix(const Eigen::VectorXd& y) const {
    Eigen::VectorXd hs = varsigma_diagonal(y, scaling_);
    return (hs * hs.transpose()).cwiseProduct(cached_cc_);
  }

 private:
  const YieldPanel& panel_;
  ScalingSpec scaling_;
  bool extrapolate_;
  Eigen::Index d_;
  Eigen::MatrixXd m_;
  Eigen::MatrixXd cached_cc_;
  Eigen::Index count_ = 0;
};

double sum_sq(const std::vector<double>& v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double t_statistic(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = mean_of(v);
  double sd = std::sqrt(sum_sq(v, m) / (n - 1.0));
  if (sd == 0.0) fail(ErrorCode::kNumeric, "t-statistic: zero variance");
  return m / (sd / std::sqrt(n));
}

}  // namespace

AnnuitySpec AnnuitySpec::standard() {
  AnnuitySpec spec;
  for (int m = 1; m <= 10; ++m) spec.maturities.push_back(m);
  spec.maturities.push_back(15.0);
  return spec;
}

std::vector<std::size_t> AnnuitySpec::indices(const MaturityGrid& grid) const {
  if (maturities.empty()) fail(ErrorCode::kInvalidArgument, "annuity: empty maturity set");
  std::vector<std::size_t> idx;
  idx.reserve(maturities.size());
  for (double m : maturities) {
    try {
      idx.push_back(grid.index_of(m));
    } catch (const Error&) {
      fail(ErrorCode::kInvalidArgument,
           "annuity: maturity " + format_double(m) + " is not on the grid");
    }
  }
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    fail(ErrorCode::kInvalidArgument, "annuity: duplicate maturity");
  }
  return idx;
}

double annuity_value(const Eigen::VectorXd& curve_row, const MaturityGrid& grid,
                     const AnnuitySpec& annuity) {
  double value = 0.0;
  for (std::size_t j : annuity.indices(grid)) {
    value += 1.0 - grid.maturities[j] * curve_row[static_cast<Eigen::Index>(j)];
  }
  return value;
}

PortfolioForecast portfolio_forecast(const YieldPanel& panel, Eigen::Index up_to_row,
                                     const AnnuitySpec& annuity, const ScalingSpec& scaling,
                                     bool extrapolate_flat) {
  if (up_to_row < 1 || up_to_row >= static_cast<Eigen::Index>(panel.rows())) {
    fail(ErrorCode::kInvalidArgument, "portfolio_forecast: conditioning row out of range");
  }
  ExpandingKernel kernel(panel, scaling, extrapolate_flat);
  for (Eigen::Index r = 1; r <= up_to_row; ++r) kernel.push(r);
  kernel.refresh();

  auto idx = annuity.indices(panel.grid);
  const double d3 = static_cast<double>(idx.size());
  const double delta = panel.grid.delta;
  Eigen::VectorXd shifted =
      shifted_values(panel.yields.row(up_to_row).transpose(), panel.grid, extrapolate_flat);
  Eigen::MatrixXd s = kernel.s_matrix(shifted);

  PortfolioForecast fc;
  fc.mu = d3 + d3 * delta * panel.yields(up_to_row, 0);
  fc.tau2 = 0.0;
  for (std::size_t a : idx) {
    double m = panel.grid.maturities[a];
    fc.mu -= (m + delta) * shifted[static_cast<Eigen::Index>(a)];
    fc.mu -= 0.5 * s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
    for (std::size_t b : idx) {
      fc.tau2 += s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  if (!(fc.tau2 > 0.0)) fail(ErrorCode::kNumeric, "portfolio_forecast: degenerate tau^2");
  return fc;
}

ResidualSeries residual_series(const YieldPanel& panel, const AnnuitySpec& annuity,
                               const ScalingSpec& scaling, Eigen::Index window_start, int stride,
                               bool extrapolate_flat) {
  const Eigen::Index rows = static_cast<Eigen::Index>(panel.rows());
  if (window_start < 2 || window_start >= rows) {
    fail(ErrorCode::kInvalidArgument, "residuals: window start must lie inside the panel");
  }
  if (stride < 1) fail(ErrorCode::kInvalidArgument, "residuals: stride must be >= 1");
  auto idx = annuity.indices(panel.grid);
  const double d3 = static_cast<double>(idx.size());
  const double delta = panel.grid.delta;

  ExpandingKernel kernel(panel, scaling, extrapolate_flat);
  for (Eigen::Index r = 1; r < window_start; ++r) kernel.push(r);

  ResidualSeries series;
  series.label = "portfolio";
  for (Eigen::Index t = window_start; t < rows; ++t) {
    if ((t - window_start) % stride == 0) kernel.refresh();
    Eigen::VectorXd shifted =
        shifted_values(panel.yields.row(t - 1).transpose(), panel.grid, extrapolate_flat);
    Eigen::MatrixXd s = kernel.s_matrix(shifted);

    double mu = d3 + d3 * delta * panel.yields(t - 1, 0);
    double tau2 = 0.0;
    for (std::size_t a : idx) {
      double m = panel.grid.maturities[a];
      mu -= (m + delta) * shifted[static_cast<Eigen::Index>(a)];
      mu -= 0.5 * s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
      for (std::size_t b : idx) {
        tau2 += s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
    if (!(tau2 > 0.0)) {
      fail(ErrorCode::kNumeric, "residuals: degenerate tau^2 at row " + std::to_string(t));
    }
    double realized = annuity_value(panel.yields.row(t).transpose(), panel.grid, annuity);
    series.times.push_back(t);
    series.taus.push_back(std::sqrt(tau2));
    series.residuals.push_back((realized - mu) / series.taus.back());
    kernel.push(t);
  }
  return series;
}

ResidualDiagnostics residual_diagnostics(const std::vector<double>& residuals) {
  const std::size_t n = residuals.size();
  if (n < 3) fail(ErrorCode::kInvalidArgument, "diagnostics: need at least 3 residuals");
  ResidualDiagnostics diag;
  diag.mean = mean_of(residuals);
  diag.variance = sum_sq(residuals, diag.mean) / static_cast<double>(n - 1);
  if (diag.variance == 0.0) fail(ErrorCode::kNumeric, "diagnostics: zero variance");

  auto lag1 = [n](const std::vector<double>& v) {
    double m = mean_of(v);
    double denom = sum_sq(v, m);
    double num = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) num += (v[i] - m) * (v[i + 1] - m);
    return num / denom;
  };
  diag.lag1_autocorr = lag1(residuals);
  std::vector<double> abs_res(n);
  for (std::size_t i = 0; i < n; ++i) abs_res[i] = std::abs(residuals[i]);
  double abs_mean = mean_of(abs_res);
  if (sum_sq(abs_res, abs_mean) == 0.0) {
    diag.abs_lag1_autocorr = 0.0;
  } else {
    diag.abs_lag1_autocorr = lag1(abs_res);
  }

  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  diag.qq_pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    diag.qq_pairs.emplace_back(inverse_normal_cdf(p), sorted[i]);
  }
  return diag;
}

ArbitrageResult arbitrage_portfolio(const YieldPanel& panel, double m1, double m2,
                                    const ScalingSpec& scaling, Eigen::Index window_start,
                                    int stride, bool extrapolate_flat) {
  if (m1 == m2) fail(ErrorCode::kInvalidArgument, "arbitrage: maturities must differ");
  const Eigen::Index i1 = static_cast<Eigen::Index>(panel.grid.index_of(m1));
  const Eigen::Index i2 = static_cast<Eigen::Index>(panel.grid.index_of(m2));
  const Eigen::Index rows = static_cast<Eigen::Index>(panel.rows());
  if (window_start < 2 || window_start >= rows) {
    fail(ErrorCode::kInvalidArgument, "arbitrage: window start must lie inside the panel");
  }
  if (stride < 1) fail(ErrorCode::kInvalidArgument, "arbitrage: stride must be >= 1");
  const double delta = panel.grid.delta;

  ExpandingKernel kernel(panel, scaling, extrapolate_flat);
  for (Eigen::Index r = 1; r < window_start; ++r) kernel.push(r);

  // Per-step prognosis errors of the two legs' returns m_i*Y(t,t+m_i) -
  // (m_i+delta)*Y(t-delta,t+m_i), weighted so their variances match. The
  // prognosis mean carries the 0.5*sp(S) drift term in the with-series and
  // drops it in the without-series.
  std::vector<double> err_with, err_without;
  ArbitrageResult result;
  double cum_with = 0.0, cum_without = 0.0;
  for (Eigen::Index t = window_start; t < rows; ++t) {
    if ((t - window_start) % stride == 0) kernel.refresh();
    Eigen::VectorXd shifted =
        shifted_values(panel.yields.row(t - 1).transpose(), panel.grid, extrapolate_flat);
    Eigen::MatrixXd s = kernel.s_matrix(shifted);
    double tau1 = std::sqrt(s(i1, i1));
    double tau2 = std::sqrt(s(i2, i2));
    if (!(tau1 > 0.0)) {
      fail(ErrorCode::kNumeric, "arbitrage: degenerate leg volatility at row " + std::to_string(t));
    }
    double w = tau2 / tau1;

    double ups1 = m1 * panel.yields(t, i1) - (m1 + delta) * shifted[i1];
    double ups2 = m2 * panel.yields(t, i2) - (m2 + delta) * shifted[i2];
    double realized = w * ups1 - ups2;
    double base = -delta * panel.yields(t - 1, 0);
    double prog_with = w * (base + 0.5 * s(i1, i1)) - (base + 0.5 * s(i2, i2));
    double prog_without = w * base - base;

    err_with.push_back(realized - prog_with);
    err_without.push_back(realized - prog_without);
    cum_with += err_with.back();
    cum_without += err_without.back();
    result.times.push_back(t);
    result.weights.push_back(w);
    result.gain_with_hjm.push_back(cum_with);
    result.gain_without_hjm.push_back(cum_without);
    kernel.push(t);
  }
  result.t_with = t_statistic(err_with);
  result.t_without = t_statistic(err_without);
  return result;
}

std::vector<double> density_process(const Eigen::VectorXd& lambda,
                                    const Eigen::MatrixXd& innovations) {
  if (innovations.cols() != lambda.size()) {
    fail(ErrorCode::kInvalidArgument, "density process: innovation dimension mismatch");
  }
  std::vector<double> xi(static_cast<std::size_t>(innovations.rows()));
  double log_xi = 0.0;
  const double half_norm = 0.5 * lambda.squaredNorm();
  for (Eigen::Index t = 0; t < innovations.rows(); ++t) {
    log_xi += -half_norm + lambda.dot(innovations.row(t));
    xi[static_cast<std::size_t>(t)] = std::exp(log_xi);
  }
  return xi;
}

}  // namespace ycv
