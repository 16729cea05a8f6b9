#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "backtest.hpp"
#include "grid.hpp"

namespace ycv {

/// One-factor mean-reverting short-rate parameters.
struct VasicekParams {
  double kappa = 0.0;  // mean-reversion speed, 1/years
  double theta = 0.0;  // long-run level
  double g = 0.0;      // volatility per sqrt(year)

  void validate() const;
};

struct OuMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact one-step conditional law of the Ornstein-Uhlenbeck short rate:
/// mean r*e^{-k d} + theta(1 - e^{-k d}), variance g^2/(2k) (1 - e^{-2k d}).
OuMoments ou_conditional_moments(double r_prev, const VasicekParams& params, double delta);

/// Gaussian MLE via the exact discretization: regress r_t on r_{t-delta};
/// kappa = -log(slope)/delta, theta = intercept/(1-slope) and g^2 recovers
/// the stationary diffusion scale from the residual variance. Rejects samples
/// without mean reversion (slope outside (0,1)).
VasicekParams fit_mle(const std::vector<double>& short_rates, double delta);

/// Zero-coupon bond exponents: price = exp(A(m) - r*B(m)) with
/// B(m) = (1-e^{-k m})/k and the standard closed form for A.
struct AffineAb {
  double A = 0.0;
  double B = 0.0;
};
AffineAb affine_ab(double m, const VasicekParams& params);

double zcb_price(double r, double m, const VasicekParams& params);

/// OU path simulated from the exact transition, using the counter-based
/// normal stream (step index s, component 0).
std::vector<double> simulate_ou(const VasicekParams& params, double r0, int steps, double delta,
                                std::uint64_t seed);

/// Panel whose yields are the affine-model yields -(A(m) - r B(m))/m of a
/// given short-rate path (the model's own world, used for self-consistency
/// checks).
YieldPanel affine_panel(const std::vector<double>& short_rates, const VasicekParams& params,
                        const MaturityGrid& grid);

/// Expanding-window residuals of the annuity value under the fitted model.
/// The shortest-maturity yield proxies the short rate; parameters are
/// refitted each step from the data seen so far. With `fixed_params` set the
/// refits are skipped and the given parameters price every window — the
/// self-consistency mode, since refit residuals carry affine level errors
/// from parameter noise that are far larger than the one-step forecast width.
struct VasicekBacktest {
  ResidualSeries residuals;
  std::vector<VasicekParams> window_params;  // one per evaluation step
};
VasicekBacktest vasicek_residuals(const YieldPanel& panel, const AnnuitySpec& annuity,
                                  Eigen::Index window_start,
                                  std::optional<VasicekParams> fixed_params = std::nullopt);

}  // namespace ycv
