#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "grid.hpp"
#include "scaling.hpp"

namespace ycv {

/// Return-direction covariance: a symmetric PSD matrix together with a square
/// root used for sampling. Only the product Lambda*Lambda' is identified, so
/// any square root works; the lower Cholesky factor is used when it exists,
/// with a symmetric-eigenvalue fallback (small negatives clipped to zero).
class FactorLoadings {
 public:
  static FactorLoadings from_sigma(const Eigen::MatrixXd& sigma);

  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& factor() const { return factor_; }
  Eigen::Index dim() const { return sigma_.rows(); }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd factor_;
};

/// Scaled one-step curve increments and the short-yield series that goes with
/// them. values(j,k) holds the increment at maturity j for step k = 1..K;
/// short_yields has K+1 entries, one per panel row.
struct UpsilonSeries {
  MaturityGrid grid;
  Eigen::MatrixXd values;        // d x K
  Eigen::VectorXd short_yields;  // K+1

  Eigen::Index count() const { return values.cols(); }
};

/// Increment at a single maturity: m*Y(t,t+m) - (m+delta)*Y(t-delta,t+m).
/// The second term comes from the interpolated shifted curve.
UpsilonSeries compute_upsilon(const YieldPanel& panel, bool extrapolate_flat = false);

/// Drift vector of the increment process: delta * (-short_yield * 1 +
/// 0.5 * diag(varsigma(y) Sigma varsigma(y))). The diagonal extraction is the
/// sp(.) operation on the scaled covariance.
Eigen::VectorXd hjm_drift(const Eigen::VectorXd& shifted_curve, double short_yield,
                          const FactorLoadings& sigma, const ScalingSpec& spec, double delta);

/// Conditional mean and covariance of the next increment given the previous
/// curve (closed form of the one-step Gaussian law).
struct UpsilonMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
UpsilonMoments upsilon_moments(const Eigen::VectorXd& shifted_curve, double short_yield,
                               const FactorLoadings& sigma, const ScalingSpec& spec, double delta);

/// One simulation step: draws the increment from its conditional law and maps
/// it back to yields via Y(t,t+m) = ((m+delta)*Y(t-delta,t+m) + increment)/m.
/// `noise` must hold d standard normals. Requires the smallest maturity to
/// equal delta. The shifted curve is interpolated with flat extrapolation at
/// the top, mirroring the calibration-side treatment.
Eigen::VectorXd simulate_step(const Eigen::VectorXd& prev_curve, const FactorLoadings& sigma,
                              const ScalingSpec& spec, const Eigen::VectorXd& noise,
                              const MaturityGrid& grid);

/// Iterates simulate_step for n steps from an initial curve; the noise for
/// step s, component j comes from stream.normal(s, j), so a fixed seed gives
/// bit-identical panels. Dates are synthesized.
YieldPanel simulate_path(const Eigen::VectorXd& initial_curve, int steps,
                         const FactorLoadings& sigma, const ScalingSpec& spec,
                         std::uint64_t seed, const MaturityGrid& grid);

}  // namespace ycv
