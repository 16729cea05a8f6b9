#include "dynamics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "errors.hpp"
#include "gaussian.hpp"

namespace ycv {

FactorLoadings FactorLoadings::from_sigma(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    fail(ErrorCode::kInvalidArgument, "factor loadings: matrix must be square and nonempty");
  }
  double scale = sigma.cwiseAbs().maxCoeff();
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) {
    fail(ErrorCode::kInvalidArgument, "factor loadings: matrix must be symmetric");
  }
  Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  double tol = 1e-12 * std::max(1.0, sym.trace());

  FactorLoadings out;
  out.sigma_ = sym;
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) {
    out.factor_ = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -tol) {
      fail(ErrorCode::kInvalidArgument, "factor loadings: matrix is not positive semi-definite");
    }
    out.factor_ = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  if ((out.factor_ * out.factor_.transpose() - sym).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) {
    fail(ErrorCode::kNumeric, "factor loadings: factorization did not reproduce the matrix");
  }
  return out;
}

UpsilonSeries compute_upsilon(const YieldPanel& panel, bool extrapolate_flat) {
  if (panel.rows() < 2) fail(ErrorCode::kData, "upsilon: panel needs at least 2 rows");
  panel.grid.require_short_maturity();
  const Eigen::Index d = static_cast<Eigen::Index>(panel.cols());
  const Eigen::Index K = static_cast<Eigen::Index>(panel.rows()) - 1;

  UpsilonSeries series;
  series.grid = panel.grid;
  series.values.resize(d, K);
  series.short_yields.resize(K + 1);
  for (Eigen::Index r = 0; r <= K; ++r) series.short_yields[r] = panel.yields(r, 0);
  for (Eigen::Index k = 1; k <= K; ++k) {
    Eigen::VectorXd shifted =
        shifted_values(panel.yields.row(k - 1).transpose(), panel.grid, extrapolate_flat);
    for (Eigen::Index j = 0; j < d; ++j) {
      double m = panel.grid.maturities[static_cast<std::size_t>(j)];
      series.values(j, k - 1) = m * panel.yields(k, j) - (m + panel.grid.delta) * shifted[j];
    }
  }
  if (!series.values.allFinite()) fail(ErrorCode::kNumeric, "upsilon: non-finite increment");
  return series;
}

Eigen::VectorXd hjm_drift(const Eigen::VectorXd& shifted_curve, double short_yield,
                          const FactorLoadings& sigma, const ScalingSpec& spec, double delta) {
  if (shifted_curve.size() != sigma.dim()) {
    fail(ErrorCode::kInvalidArgument, "hjm_drift: dimension mismatch");
  }
  Eigen::VectorXd hs = varsigma_diagonal(shifted_curve, spec);
  Eigen::VectorXd sp = hs.array().square() * sigma.sigma().diagonal().array();
  return delta * (0.5 * sp.array() - short_yield);
}

UpsilonMoments upsilon_moments(const Eigen::VectorXd& shifted_curve, double short_yield,
                               const FactorLoadings& sigma, const ScalingSpec& spec, double delta) {
  UpsilonMoments m;
  m.mean = hjm_drift(shifted_curve, short_yield, sigma, spec, delta);
  Eigen::VectorXd hs = varsigma_diagonal(shifted_curve, spec);
  m.covariance = delta * (hs * hs.transpose()).cwiseProduct(sigma.sigma());
  return m;
}

Eigen::VectorXd simulate_step(const Eigen::VectorXd& prev_curve, const FactorLoadings& sigma,
                              const ScalingSpec& spec, const Eigen::VectorXd& noise,
                              const MaturityGrid& grid) {
  grid.require_short_maturity();
  const Eigen::Index d = static_cast<Eigen::Index>(grid.size());
  if (prev_curve.size() != d || noise.size() != d || sigma.dim() != d) {
    fail(ErrorCode::kInvalidArgument, "simulate_step: dimension mismatch");
  }
  Eigen::VectorXd shifted = shifted_values(prev_curve, grid, /*extrapolate_flat=*/true);
  double short_yield = prev_curve[0];
  Eigen::VectorXd hs = varsigma_diagonal(shifted, spec);
  Eigen::VectorXd upsilon = hjm_drift(shifted, short_yield, sigma, spec, grid.delta) +
                            std::sqrt(grid.delta) * hs.cwiseProduct(sigma.factor() * noise);
  Eigen::VectorXd next(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double m = grid.maturities[static_cast<std::size_t>(j)];
    next[j] = ((m + grid.delta) * shifted[j] + upsilon[j]) / m;
  }
  if (!next.allFinite()) fail(ErrorCode::kNumeric, "simulate_step: non-finite yields");
  return next;
}

YieldPanel simulate_path(const Eigen::VectorXd& initial_curve, int steps,
                         const FactorLoadings& sigma, const ScalingSpec& spec,
                         std::uint64_t seed, const MaturityGrid& grid) {
  grid.validate();
  if (steps < 1) fail(ErrorCode::kInvalidArgument, "simulate_path: steps must be >= 1");
  const Eigen::Index d = static_cast<Eigen::Index>(grid.size());

  YieldPanel panel;
  panel.grid = grid;
  panel.yields.resize(steps + 1, d);
  panel.yields.row(0) = initial_curve.transpose();
  GaussianStream stream(seed);
  Eigen::VectorXd noise(d);
  for (int s = 1; s <= steps; ++s) {
    for (Eigen::Index j = 0; j < d; ++j) {
      noise[j] = stream.normal(static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(j));
    }
    try {
      panel.yields.row(s) =
          simulate_step(panel.yields.row(s - 1).transpose(), sigma, spec, noise, grid).transpose();
    } catch (const Error& e) {
      fail(e.code(), "simulate_path: step " + std::to_string(s) + ": " + e.what());
    }
  }
  panel.dates = synthetic_dates(panel.rows(), grid.delta);
  return panel;
}

}  // namespace ycv
