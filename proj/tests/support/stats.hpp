#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

namespace ycv::testing {

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se_mean = 0.0;
};

inline SampleStats sample_stats(const std::vector<double>& x) {
  SampleStats s;
  const double n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  for (double v : x) s.variance += (v - s.mean) * (v - s.mean);
  s.variance /= (n - 1.0);
  s.se_mean = std::sqrt(s.variance / n);
  return s;
}

inline double lag1_autocorr(const std::vector<double>& x) {
  SampleStats s = sample_stats(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - s.mean) * (x[i] - s.mean);
    if (i + 1 < x.size()) num += (x[i] - s.mean) * (x[i + 1] - s.mean);
  }
  return num / den;
}

/// Column-wise mean of draws stored row-per-draw.
inline Eigen::VectorXd col_mean(const Eigen::MatrixXd& draws) {
  return draws.colwise().mean().transpose();
}

/// Unbiased sample covariance of draws stored row-per-draw.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& draws) {
  Eigen::MatrixXd centered = draws.rowwise() - draws.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(draws.rows() - 1);
}

/// Asymptotic standard error of a Gaussian sample-covariance entry.
inline double cov_entry_se(const Eigen::MatrixXd& cov, Eigen::Index i, Eigen::Index j,
                           Eigen::Index n) {
  return std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / static_cast<double>(n));
}

}  // namespace ycv::testing
