#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grid.hpp"
#include "scaling.hpp"

namespace ycv {

/// Line-oriented `key = value` run configuration. Keys must come from the
/// known registry; values are kept as strings and validated by the typed
/// accessors. '#' starts a comment.
class RunConfig {
 public:
  static RunConfig parse(std::istream& in);
  static RunConfig load(const std::string& path);

  /// Set or override one entry (CLI flags funnel through here).
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_seed() const;  // key "seed", default 0
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_number_list(const std::string& key) const;

  /// Grid from `delta`, `maturities` and optional `labels` (defaults to the
  /// maturity tokens as written).
  MaturityGrid grid() const;

  /// Scaling from `theta` (default 0.025) and `scaling_floor` (decimal or
  /// "off", default 0.0001).
  ScalingSpec scaling() const;

  bool extrapolate_flat() const { return get_bool("extrapolate_flat", false); }
  int threads() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Numeric token that may be a fraction like "1/52".
double parse_number_token(const std::string& token, const std::string& context);

}  // namespace ycv
