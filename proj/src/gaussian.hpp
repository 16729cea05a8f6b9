#pragma once

#include <cstdint>

namespace ycv {

/// Quantile function of the standard normal distribution for p in (0,1).
/// Rational initial guess refined with two Halley steps on erfc, accurate to
/// a few ulps over the full open interval.
double inverse_normal_cdf(double p);

/// Counter-based standard normal stream.
///
/// Every draw is a pure function of (seed, step, component): the stream has no
/// mutable state, so a path simulated in any evaluation order, or across
/// threads, produces identical numbers. Uniforms come from a SplitMix64-style
/// avalanche over the three keys and are mapped through the normal quantile.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}

  /// Uniform draw in the open interval (0,1).
  double uniform(std::uint64_t step, std::uint64_t component) const;

  /// Standard normal draw.
  double normal(std::uint64_t step, std::uint64_t component) const;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace ycv
