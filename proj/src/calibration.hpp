#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "grid.hpp"
#include "scaling.hpp"

namespace ycv {

/// Columns are the scaled increments varsigma(prev curve)^{-1} * increment,
/// one per observation step (sqrt(K) times the normalized return matrix).
struct ScaledReturnMatrix {
  Eigen::MatrixXd values;  // d x K
  Eigen::Index K = 0;
  double delta = 0.0;
};

/// Inputs of the diagonal bias quadratic a*s^2 + b*s + c = 0, with the
/// expectations replaced by sample averages over the observation window.
struct BiasInputs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Full covariance calibration output: the raw estimator, the bias-corrected
/// matrix, their difference, the correlation normalization and its spectrum.
struct CovarianceEstimate {
  Eigen::MatrixXd s_bias;       // delta^{-1} S_(K)(1)
  Eigen::MatrixXd s_corrected;  // bias-corrected entries
  Eigen::MatrixXd beta;         // s_bias - s_corrected
  Eigen::MatrixXd correlation;  // unit diagonal; NaN rows where the diagonal degenerates
  std::vector<double> eigen_shares;       // descending fractions; empty if degenerate
  std::vector<std::size_t> degenerate;    // indices with s_corrected(i,i) <= 0
  std::vector<std::string> labels;
  Eigen::Index K = 0;
  double delta = 0.0;
  double theta = 0.0;
};

ScaledReturnMatrix scaled_returns(const UpsilonSeries& upsilon, const YieldPanel& panel,
                                  const ScalingSpec& spec, bool extrapolate_flat = false);

/// S_(K)(y) = varsigma(y) * (1/K) * values * values' * varsigma(y)'.
Eigen::MatrixXd raw_s(const ScaledReturnMatrix& scaled, const Eigen::VectorXd& eval_curve,
                      const ScalingSpec& spec);

BiasInputs bias_inputs(const UpsilonSeries& upsilon, const YieldPanel& panel,
                       const ScalingSpec& spec, std::size_t i, bool extrapolate_flat = false);

/// Root of the bias quadratic near -c/b: (-b + sqrt(b^2 - 4ac)) / (2a), with
/// the continuous limit -c/b when a vanishes.
double solve_diag(double a, double b, double c);

double solve_offdiag(const UpsilonSeries& upsilon, const YieldPanel& panel,
                     const ScalingSpec& spec, std::size_t i, std::size_t j, double s_ii,
                     double s_jj, bool extrapolate_flat = false);

/// Whole pipeline: raw estimator, diagonal solves, then off-diagonals (which
/// consume the diagonal solutions), correlation and eigen shares. Off-diagonal
/// pairs are independent and computed in parallel when threads > 1.
CovarianceEstimate calibrate(const YieldPanel& panel, const ScalingSpec& spec,
                             bool extrapolate_flat = false, int threads = 1);

/// Correlation normalization of a covariance-like matrix. Entries whose
/// diagonal is nonpositive come back as NaN and their indices are reported.
Eigen::MatrixXd correlation_from_sigma(const Eigen::MatrixXd& sigma,
                                       std::vector<std::size_t>* degenerate = nullptr);

/// Descending eigenvalue fractions of a symmetric matrix.
std::vector<double> eigen_shares(const Eigen::MatrixXd& sym);

struct PcaReport {
  std::vector<double> shares;
  std::vector<double> cumulative;
};

/// Eigen shares of the correlation matrix restricted to `subset` (all
/// maturities when empty), with cumulative sums.
PcaReport pca_report(const Eigen::MatrixXd& correlation,
                     const std::vector<std::size_t>& subset);

/// One row per prefix K and maturity: the raw and corrected diagonal
/// estimates as functions of the sample size (convergence diagnostic).
struct ConvergencePoint {
  Eigen::Index K;
  std::size_t maturity_index;
  double s_bias;
  double s_corrected;
};
std::vector<ConvergencePoint> convergence_series(const YieldPanel& panel, const ScalingSpec& spec,
                                                 bool extrapolate_flat = false);

/// Subsample the panel to every `coarse_factor`-th row, recalibrate on the
/// coarse grid (maturities below the coarse delta are dropped), and return
/// the elementwise relative difference (fine - coarse)/coarse on the common
/// maturities. Zero coarse entries give NaN.
struct GridCompareResult {
  std::vector<std::string> labels;          // common maturities
  Eigen::MatrixXd fine;                     // corrected estimates, fine grid
  Eigen::MatrixXd coarse;                   // corrected estimates, coarse grid
  Eigen::MatrixXd relative_difference;
};
GridCompareResult grid_compare(const YieldPanel& panel, int coarse_factor,
                               const ScalingSpec& spec, bool extrapolate_flat = false);

/// Labeled square matrix CSV (`label,<l1>,...` header), used for the shipped
/// covariance fixture and for simulation inputs.
struct LabeledMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};
LabeledMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const LabeledMatrix& matrix, const std::string& path);

}  // namespace ycv
