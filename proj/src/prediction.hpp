#pragma once

#include <Eigen/Core>

#include "calibration.hpp"
#include "grid.hpp"
#include "scaling.hpp"

namespace ycv {

/// One-step-ahead Gaussian conditional law.
struct ForecastDistribution {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double horizon = 0.0;            // delta
  Eigen::Index conditioning_row = 0;
};

/// Closed-form conditional moments of the resampled increment: mean
/// -delta*x + 0.5*sp(S_(K)(y)), covariance S_(K)(y).
ForecastDistribution kappa_moments(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const ScaledReturnMatrix& scaled, const ScalingSpec& spec);

/// Filtered-historical-simulation draw: the moments' mean plus
/// varsigma(y) * C_(K) * noise, where noise holds K standard normals
/// re-simulating the scaled historical increments.
Eigen::VectorXd kappa_sample(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const ScaledReturnMatrix& scaled, const ScalingSpec& spec,
                             const Eigen::VectorXd& noise);

/// Next-curve forecast in yield space. The increment law maps to yields
/// through the affine transform Y(t,t+m) = ((m+delta)*Y(t-delta,t+m) + k_m)/m,
/// so the Gaussian law transforms exactly.
struct CurveForecast {
  ForecastDistribution yields;     // per-maturity law in yield space
  ForecastDistribution increment;  // underlying kappa law
  Eigen::VectorXd roll_down;       // deterministic part (zero-covariance forecast)
  Eigen::VectorXd shifted;         // Y(t-delta, t+m), the conditioning curve
  Eigen::VectorXd x;               // replicated short yield
};

CurveForecast predict_next_curve(const YieldPanel& panel, const ScalingSpec& spec,
                                 bool extrapolate_flat = false);

/// Sampled next curve consistent with predict_next_curve, using K draws.
Eigen::VectorXd sample_next_curve(const CurveForecast& forecast,
                                  const ScaledReturnMatrix& scaled, const ScalingSpec& spec,
                                  const MaturityGrid& grid, const Eigen::VectorXd& noise);

/// Mean shifted by the market-price-of-risk drift sqrt(delta) * L * lambda,
/// where L is the lower Cholesky factor of S_(K)(y)/delta (the estimated
/// loadings are identified only up to rotation, so a Cholesky convention is
/// used). The covariance is unchanged.
Eigen::VectorXd mpr_adjusted_mean(const ForecastDistribution& base, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd& y, const ScaledReturnMatrix& scaled,
                                  const ScalingSpec& spec);

}  // namespace ycv
