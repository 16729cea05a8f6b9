#include "vasicek.hpp"

#include <cmath>

#include "errors.hpp"
#include "gaussian.hpp"

namespace ycv {

void VasicekParams::validate() const {
  if (!(kappa > 0.0)) fail(ErrorCode::kInvalidArgument, "vasicek: kappa must be > 0");
  if (!(g > 0.0)) fail(ErrorCode::kInvalidArgument, "vasicek: g must be > 0");
}

OuMoments ou_conditional_moments(double r_prev, const VasicekParams& params, double delta) {
  if (!(delta > 0.0)) fail(ErrorCode::kInvalidArgument, "vasicek: delta must be > 0");
  OuMoments m;
  double decay = std::exp(-params.kappa * delta);
  m.mean = r_prev * decay + params.theta * (1.0 - decay);
  m.variance = params.g * params.g / (2.0 * params.kappa) * (1.0 - decay * decay);
  return m;
}

VasicekParams fit_mle(const std::vector<double>& short_rates, double delta) {
  const std::size_t n = short_rates.size();
  if (n < 3) fail(ErrorCode::kData, "vasicek MLE: need at least 3 observations");

  // OLS of r_t on r_{t-delta} with intercept.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    double x = short_rates[k - 1], y = short_rates[k];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double var_x = sxx - sx * sx / m;
  if (var_x <= 0.0) fail(ErrorCode::kData, "vasicek MLE: constant series");
  double slope = (sxy - sx * sy / m) / var_x;
  double intercept = (sy - slope * sx) / m;
  if (slope >= 1.0) fail(ErrorCode::kData, "vasicek MLE: no mean reversion (slope >= 1)");
  if (slope <= 0.0) fail(ErrorCode::kData, "vasicek MLE: slope <= 0");

  double rss = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double e = short_rates[k] - intercept - slope * short_rates[k - 1];
    rss += e * e;
  }
  VasicekParams params;
  params.kappa = -std::log(slope) / delta;
  params.theta = intercept / (1.0 - slope);
  params.g = std::sqrt(rss / m * 2.0 * params.kappa / (1.0 - slope * slope));
  if (!(params.g > 0.0)) fail(ErrorCode::kData, "vasicek MLE: degenerate residuals");
  return params;
}

AffineAb affine_ab(double m, const VasicekParams& params) {
  if (!(m > 0.0)) fail(ErrorCode::kInvalidArgument, "vasicek: maturity must be > 0");
  AffineAb ab;
  double k = params.kappa;
  ab.B = (1.0 - std::exp(-k * m)) / k;
  double g2 = params.g * params.g;
  ab.A = (params.theta - g2 / (2.0 * k * k)) * (ab.B - m) - g2 * ab.B * ab.B / (4.0 * k);
  return ab;
}

double zcb_price(double r, double m, const VasicekParams& params) {
  AffineAb ab = affine_ab(m, params);
  return std::exp(ab.A - r * ab.B);
}

std::vector<double> simulate_ou(const VasicekParams& params, double r0, int steps, double delta,
                                std::uint64_t seed) {
  params.validate();
  if (steps < 1) fail(ErrorCode::kInvalidArgument, "vasicek: steps must be >= 1");
  GaussianStream stream(seed);
  std::vector<double> path(static_cast<std::size_t>(steps) + 1);
  path[0] = r0;
  for (int s = 1; s <= steps; ++s) {
    OuMoments m = ou_conditional_moments(path[static_cast<std::size_t>(s) - 1], params, delta);
    path[static_cast<std::size_t>(s)] =
        m.mean + std::sqrt(m.variance) * stream.normal(static_cast<std::uint64_t>(s), 0);
  }
  return path;
}

YieldPanel affine_panel(const std::vector<double>& short_rates, const VasicekParams& params,
                        const MaturityGrid& grid) {
  grid.validate();
  YieldPanel panel;
  panel.grid = grid;
  panel.yields.resize(static_cast<Eigen::Index>(short_rates.size()),
                      static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    AffineAb ab = affine_ab(grid.maturities[j], params);
    for (std::size_t r = 0; r < short_rates.size(); ++r) {
      panel.yields(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          -(ab.A - short_rates[r] * ab.B) / grid.maturities[j];
    }
  }
  panel.dates = synthetic_dates(panel.rows(), grid.delta);
  return panel;
}

VasicekBacktest vasicek_residuals(const YieldPanel& panel, const AnnuitySpec& annuity,
                                  Eigen::Index window_start,
                                  std::optional<VasicekParams> fixed_params) {
  const Eigen::Index rows = static_cast<Eigen::Index>(panel.rows());
  if (window_start < 3 || window_start >= rows) {
    fail(ErrorCode::kInvalidArgument, "vasicek residuals: window start must lie inside the panel");
  }
  if (fixed_params) fixed_params->validate();
  auto idx = annuity.indices(panel.grid);
  const double delta = panel.grid.delta;

  VasicekBacktest bt;
  bt.residuals.label = "vasicek";
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < window_start; ++r) rates.push_back(panel.yields(r, 0));

  for (Eigen::Index t = window_start; t < rows; ++t) {
    VasicekParams params;
    if (fixed_params) {
      params = *fixed_params;
    } else {
      try {
        params = fit_mle(rates, delta);
      } catch (const Error& e) {
        fail(e.code(), "vasicek residuals: refit at row " + std::to_string(t) + ": " + e.what());
      }
    }
    OuMoments next = ou_conditional_moments(rates.back(), params, delta);

    double mu = 0.0, b_sum = 0.0;
    for (std::size_t a : idx) {
      AffineAb ab = affine_ab(panel.grid.maturities[a], params);
      mu += 1.0 + ab.A - next.mean * ab.B;
      b_sum += ab.B;
    }
    double var = next.variance * b_sum * b_sum;
    if (!(var > 0.0)) fail(ErrorCode::kNumeric, "vasicek residuals: degenerate variance");

    double realized = annuity_value(panel.yields.row(t).transpose(), panel.grid, annuity);
    bt.residuals.times.push_back(t);
    bt.residuals.taus.push_back(std::sqrt(var));
    bt.residuals.residuals.push_back((realized - mu) / bt.residuals.taus.back());
    bt.window_params.push_back(params);
    rates.push_back(panel.yields(t, 0));
  }
  return bt;
}

}  // namespace ycv
