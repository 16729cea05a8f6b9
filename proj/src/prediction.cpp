#include "prediction.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "dynamics.hpp"
#include "errors.hpp"

namespace ycv {

ForecastDistribution kappa_moments(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const ScaledReturnMatrix& scaled, const ScalingSpec& spec) {
  if (x.size() != y.size() || x.size() != scaled.values.rows()) {
    fail(ErrorCode::kInvalidArgument, "kappa_moments: dimension mismatch");
  }
  ForecastDistribution dist;
  dist.covariance = raw_s(scaled, y, spec);
  dist.mean = -scaled.delta * x + 0.5 * dist.covariance.diagonal();
  dist.horizon = scaled.delta;
  return dist;
}

Eigen::VectorXd kappa_sample(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const ScaledReturnMatrix& scaled, const ScalingSpec& spec,
                             const Eigen::VectorXd& noise) {
  if (noise.size() != scaled.K) {
    fail(ErrorCode::kInvalidArgument, "kappa_sample: noise length must equal K");
  }
  ForecastDistribution moments = kappa_moments(x, y, scaled, spec);
  Eigen::VectorXd hs = varsigma_diagonal(y, spec);
  // varsigma(y) * C_(K) * W with C_(K) = values / sqrt(K)
  Eigen::VectorXd shock =
      hs.cwiseProduct(scaled.values * noise) / std::sqrt(static_cast<double>(scaled.K));
  return moments.mean + shock;
}

CurveForecast predict_next_curve(const YieldPanel& panel, const ScalingSpec& spec,
                                 bool extrapolate_flat) {
  panel.grid.require_short_maturity();
  UpsilonSeries upsilon = compute_upsilon(panel, extrapolate_flat);
  ScaledReturnMatrix scaled = scaled_returns(upsilon, panel, spec, extrapolate_flat);
  const Eigen::Index d = scaled.values.rows();
  const Eigen::Index last = static_cast<Eigen::Index>(panel.rows()) - 1;

  CurveForecast fc;
  fc.shifted = shifted_curve(panel, last, extrapolate_flat).values;
  fc.x = Eigen::VectorXd::Constant(d, panel.yields(last, 0));
  fc.increment = kappa_moments(fc.x, fc.shifted, scaled, spec);
  fc.increment.conditioning_row = last;

  const double delta = panel.grid.delta;
  fc.yields.mean.resize(d);
  fc.yields.covariance.resize(d, d);
  fc.roll_down.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double mi = panel.grid.maturities[static_cast<std::size_t>(i)];
    fc.yields.mean[i] = ((mi + delta) * fc.shifted[i] + fc.increment.mean[i]) / mi;
    fc.roll_down[i] = ((mi + delta) * fc.shifted[i] - delta * fc.x[i]) / mi;
    for (Eigen::Index j = 0; j < d; ++j) {
      double mj = panel.grid.maturities[static_cast<std::size_t>(j)];
      fc.yields.covariance(i, j) = fc.increment.covariance(i, j) / (mi * mj);
    }
  }
  fc.yields.horizon = delta;
  fc.yields.conditioning_row = last;
  return fc;
}

Eigen::VectorXd sample_next_curve(const CurveForecast& forecast,
                                  const ScaledReturnMatrix& scaled, const ScalingSpec& spec,
                                  const MaturityGrid& grid, const Eigen::VectorXd& noise) {
  Eigen::VectorXd kappa = kappa_sample(forecast.x, forecast.shifted, scaled, spec, noise);
  Eigen::VectorXd out(kappa.size());
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    double m = grid.maturities[static_cast<std::size_t>(i)];
    out[i] = ((m + grid.delta) * forecast.shifted[i] + kappa[i]) / m;
  }
  return out;
}

Eigen::VectorXd mpr_adjusted_mean(const ForecastDistribution& base, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd& y, const ScaledReturnMatrix& scaled,
                                  const ScalingSpec& spec) {
  if (!lambda.allFinite()) fail(ErrorCode::kInvalidArgument, "mpr: lambda must be finite");
  if (lambda.size() != base.mean.size()) {
    fail(ErrorCode::kInvalidArgument, "mpr: lambda dimension mismatch");
  }
  Eigen::MatrixXd s = raw_s(scaled, y, spec) / scaled.delta;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kNumeric, "mpr: estimated covariance is not factorizable");
  }
  Eigen::MatrixXd factor = llt.matrixL();
  return base.mean + std::sqrt(scaled.delta) * (factor * lambda);
}

}  // namespace ycv
