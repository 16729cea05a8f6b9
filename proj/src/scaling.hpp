#pragma once

#include <Eigen/Core>
#include <optional>

namespace ycv {

/// Volatility scaling configuration: threshold below which the scaling is
/// linear in the yield (square-root above), and an optional floor substituted
/// into the scaling function so it stays positive on bad inputs. The floor
/// never modifies the yields themselves.
struct ScalingSpec {
  double theta = 0.025;
  std::optional<double> floor = 1e-4;

  void validate() const;
};

/// Volatility scale of a single yield: y/sqrt(theta) for y <= theta,
/// sqrt(y) above. Continuous at the threshold. Throws on nonpositive input
/// when the floor is disabled.
double h_scale(double y, const ScalingSpec& spec);

/// Diagonal of the scaling map for a whole curve, entries h(y_1)..h(y_d).
Eigen::VectorXd varsigma_diagonal(const Eigen::VectorXd& curve, const ScalingSpec& spec);

/// Applies the inverse scaling (division by h entrywise).
Eigen::VectorXd varsigma_inverse_apply(const Eigen::VectorXd& curve, const ScalingSpec& spec,
                                       const Eigen::VectorXd& v);

}  // namespace ycv
