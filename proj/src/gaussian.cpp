#include "gaussian.hpp"

#include <cmath>

#include "errors.hpp"

namespace ycv {
namespace {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

// Acklam's rational approximation, |relative error| < 1.2e-9.
double acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "inverse_normal_cdf: p must lie in (0,1)");
  }
  double x = acklam(p);
  // Halley refinement: e = Phi(x) - p, Phi via erfc for tail accuracy.
  for (int iter = 0; iter < 2; ++iter) {
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double GaussianStream::uniform(std::uint64_t step, std::uint64_t component) const {
  std::uint64_t h = mix64(seed_ + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (step + 0xbf58476d1ce4e5b9ULL));
  h = mix64(h ^ (component + 0x94d049bb133111ebULL));
  // 53-bit mantissa, shifted by half a unit so the result is strictly inside (0,1).
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::normal(std::uint64_t step, std::uint64_t component) const {
  return inverse_normal_cdf(uniform(step, component));
}

}  // namespace ycv
