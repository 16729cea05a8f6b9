#include "scaling.hpp"

#include <cmath>

#include "errors.hpp"
#include "grid.hpp"

namespace ycv {

void ScalingSpec::validate() const {
  if (!(theta >= 0.0)) fail(ErrorCode::kInvalidArgument, "scaling: theta must be >= 0");
  if (floor && !(*floor > 0.0)) fail(ErrorCode::kInvalidArgument, "scaling: floor must be > 0");
}

double h_scale(double y, const ScalingSpec& spec) {
  double v = spec.floor ? std::max(y, *spec.floor) : y;
  if (!(v > 0.0)) {
    fail(ErrorCode::kNumeric,
         "scaling: nonpositive yield " + format_double(y) + " with floor disabled");
  }
  if (spec.theta > 0.0 && v <= spec.theta) return v / std::sqrt(spec.theta);
  return std::sqrt(v);
}

Eigen::VectorXd varsigma_diagonal(const Eigen::VectorXd& curve, const ScalingSpec& spec) {
  Eigen::VectorXd out(curve.size());
  for (Eigen::Index j = 0; j < curve.size(); ++j) out[j] = h_scale(curve[j], spec);
  return out;
}

Eigen::VectorXd varsigma_inverse_apply(const Eigen::VectorXd& curve, const ScalingSpec& spec,
                                       const Eigen::VectorXd& v) {
  if (curve.size() != v.size()) fail(ErrorCode::kInvalidArgument, "varsigma: dimension mismatch");
  return v.array() / varsigma_diagonal(curve, spec).array();
}

}  // namespace ycv
