#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace ycv {

/// The model's cross-section: grid size and the ordered set of times to
/// maturity (in years) at which curves are observed.
struct MaturityGrid {
  double delta = 0.0;                // grid size, 1/n years for integer n >= 1
  std::vector<double> maturities;    // strictly increasing, all > 0
  std::vector<std::string> labels;   // display name per maturity

  std::size_t size() const { return maturities.size(); }

  /// Validates the invariants above; throws Error on violation.
  void validate() const;

  /// Index of a maturity given in years (exact up to 1e-12), or throws.
  std::size_t index_of(double maturity) const;

  /// Throws unless the smallest maturity equals delta. Simulation and
  /// back-testing need it to read off Y(t - delta, t).
  void require_short_maturity() const;
};

/// Parse a maturity label such as "1W", "3M", "10Y" into years.
/// Plain numbers and fractions ("0.25", "1/52") are accepted as well.
double parse_maturity_label(const std::string& label);

/// Time-indexed panel of continuously-compounded spot yields, one column per
/// grid maturity. Row r corresponds to model time r*delta; observation dates
/// are kept only for round-tripping the CSV form.
struct YieldPanel {
  MaturityGrid grid;
  std::vector<std::string> dates;  // ISO yyyy-mm-dd, one per row
  Eigen::MatrixXd yields;          // (K+1) x d

  std::size_t rows() const { return static_cast<std::size_t>(yields.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(yields.cols()); }
};

/// Curve observed at time index `base_row`, evaluated at times to maturity
/// m + delta for every grid maturity m (the previous curve seen from today).
struct ShiftedCurveView {
  Eigen::Index base_row = 0;
  Eigen::VectorXd values;
};

/// Linear interpolation of a curve row in time to maturity.
///
/// For target in (m, m~] between consecutive grid maturities the value is
/// ((m~ - target)/(m~ - m)) * Y(m) + ((target - m)/(m~ - m)) * Y(m~); a target
/// coinciding with a knot returns the observed value unchanged. Targets above
/// the longest maturity use the last knot when `extrapolate_flat` is set and
/// are an error otherwise.
double interpolate_shifted_yield(const Eigen::VectorXd& panel_row, double target_ttm,
                                 const MaturityGrid& grid, bool extrapolate_flat = false);

/// The vector (Y(t-delta, t+m))_m read from panel row `time_index` via
/// interpolate_shifted_yield at m + delta.
ShiftedCurveView shifted_curve(const YieldPanel& panel, Eigen::Index time_index,
                               bool extrapolate_flat = false);

/// Same, for a bare curve row on a given grid.
Eigen::VectorXd shifted_values(const Eigen::VectorXd& row, const MaturityGrid& grid,
                               bool extrapolate_flat);

/// Parse a yield panel from CSV with header `date,<label1>,...`; yields are
/// decimals. Dates must be strictly increasing ISO dates with no gaps; they
/// are mapped to consecutive grid indices by row order.
YieldPanel parse_yield_csv(std::istream& source, const MaturityGrid& grid);
YieldPanel read_yield_csv(const std::string& path, const MaturityGrid& grid);

/// Serialize in the same schema; numbers are written round-trip exact.
void write_yield_csv(const YieldPanel& panel, std::ostream& out);
void write_yield_csv(const YieldPanel& panel, const std::string& path);

/// Days since 1970-01-01 for an ISO date, and back.
long days_from_civil(int y, unsigned m, unsigned d);
std::string civil_from_days(long days);
long parse_iso_date(const std::string& iso);

/// Synthesize evenly spaced ISO dates for simulated panels (one per row,
/// spacing round(365.2425 * delta) days, starting 2000-01-03).
std::vector<std::string> synthetic_dates(std::size_t rows, double delta);

/// Round-trip exact formatting for doubles in CSV output.
std::string format_double(double v);

}  // namespace ycv
