#include "grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace ycv {

void MaturityGrid::validate() const {
  if (!(delta > 0.0)) fail(ErrorCode::kInvalidArgument, "grid: delta must be positive");
  double n = 1.0 / delta;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n) || std::round(n) < 1.0) {
    fail(ErrorCode::kInvalidArgument, "grid: 1/delta must be a positive integer");
  }
  if (maturities.empty()) fail(ErrorCode::kInvalidArgument, "grid: no maturities");
  if (labels.size() != maturities.size()) {
    fail(ErrorCode::kInvalidArgument, "grid: labels and maturities differ in length");
  }
  for (std::size_t j = 0; j < maturities.size(); ++j) {
    if (!(maturities[j] > 0.0)) fail(ErrorCode::kInvalidArgument, "grid: maturities must be positive");
    if (j > 0 && !(maturities[j] > maturities[j - 1])) {
      fail(ErrorCode::kInvalidArgument, "grid: maturities must be strictly increasing");
    }
  }
}

std::size_t MaturityGrid::index_of(double maturity) const {
  for (std::size_t j = 0; j < maturities.size(); ++j) {
    if (std::abs(maturities[j] - maturity) <= 1e-12 * std::max(1.0, std::abs(maturity))) return j;
  }
  fail(ErrorCode::kInvalidArgument, "grid: maturity " + format_double(maturity) + " not on grid");
}

void MaturityGrid::require_short_maturity() const {
  if (maturities.empty() || std::abs(maturities.front() - delta) > 1e-12) {
    fail(ErrorCode::kData, "grid: smallest maturity must equal delta for simulation/back-testing");
  }
}

double parse_maturity_label(const std::string& label) {
  if (label.empty()) fail(ErrorCode::kParse, "empty maturity label");
  char suffix = label.back();
  auto parse_num = [&](const std::string& s) -> double {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) fail(ErrorCode::kParse, "bad maturity label '" + label + "'");
      return v;
    } catch (const Error&) {
      throw;
    } catch (...) {
      fail(ErrorCode::kParse, "bad maturity label '" + label + "'");
    }
  };
  if (suffix == 'W' || suffix == 'w') return parse_num(label.substr(0, label.size() - 1)) / 52.0;
  if (suffix == 'M' || suffix == 'm') return parse_num(label.substr(0, label.size() - 1)) / 12.0;
  if (suffix == 'Y' || suffix == 'y') return parse_num(label.substr(0, label.size() - 1));
  auto slash = label.find('/');
  if (slash != std::string::npos) {
    double num = parse_num(label.substr(0, slash));
    double den = parse_num(label.substr(slash + 1));
    if (den == 0.0) fail(ErrorCode::kParse, "bad maturity label '" + label + "'");
    return num / den;
  }
  return parse_num(label);
}

double interpolate_shifted_yield(const Eigen::VectorXd& panel_row, double target_ttm,
                                 const MaturityGrid& grid, bool extrapolate_flat) {
  const auto& m = grid.maturities;
  if (static_cast<std::size_t>(panel_row.size()) != m.size()) {
    fail(ErrorCode::kInvalidArgument, "interpolation: row length does not match grid");
  }
  const double tol = 1e-12;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (std::abs(target_ttm - m[j]) <= tol * std::max(1.0, m[j])) {
      return panel_row[static_cast<Eigen::Index>(j)];
    }
  }
  if (target_ttm > m.back()) {
    if (!extrapolate_flat) {
      fail(ErrorCode::kData, "interpolation: target " + format_double(target_ttm) +
                                 " beyond longest maturity and flat extrapolation is disabled");
    }
    return panel_row[panel_row.size() - 1];
  }
  if (target_ttm < m.front()) {
    fail(ErrorCode::kData, "interpolation: target " + format_double(target_ttm) +
                               " below shortest maturity");
  }
  auto it = std::upper_bound(m.begin(), m.end(), target_ttm);
  std::size_t right = static_cast<std::size_t>(it - m.begin());
  std::size_t left = right - 1;
  double ml = m[left], mr = m[right];
  double w = (target_ttm - ml) / (mr - ml);
  return (1.0 - w) * panel_row[static_cast<Eigen::Index>(left)] +
         w * panel_row[static_cast<Eigen::Index>(right)];
}

Eigen::VectorXd shifted_values(const Eigen::VectorXd& row, const MaturityGrid& grid,
                               bool extrapolate_flat) {
  Eigen::VectorXd out(row.size());
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    out[j] = interpolate_shifted_yield(row, grid.maturities[static_cast<std::size_t>(j)] + grid.delta,
                                       grid, extrapolate_flat);
  }
  return out;
}

ShiftedCurveView shifted_curve(const YieldPanel& panel, Eigen::Index time_index,
                               bool extrapolate_flat) {
  if (time_index < 0 || time_index >= panel.yields.rows()) {
    fail(ErrorCode::kInvalidArgument, "shifted_curve: row index out of range");
  }
  ShiftedCurveView view;
  view.base_row = time_index;
  view.values = shifted_values(panel.yields.row(time_index).transpose(), panel.grid, extrapolate_flat);
  return view;
}

// Howard Hinnant's civil-date algorithms.
long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

std::string civil_from_days(long z) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", y + (m <= 2), m, d);
  return buf;
}

long parse_iso_date(const std::string& iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' ||
      std::sscanf(iso.c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 || d > 31) {
    fail(ErrorCode::kParse, "bad ISO date '" + iso + "'");
  }
  return days_from_civil(y, m, d);
}

std::vector<std::string> synthetic_dates(std::size_t rows, double delta) {
  long step = std::max(1L, std::lround(365.2425 * delta));
  long start = days_from_civil(2000, 1, 3);
  std::vector<std::string> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) out.push_back(civil_from_days(start + step * static_cast<long>(r)));
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
    return v;
  } catch (...) {
    fail(ErrorCode::kParse,
         "non-numeric cell '" + cell + "' in row " + std::to_string(row) + ", column " + col);
  }
}

void check_date_spacing(const std::vector<long>& days, double delta) {
  // The grid mapping is by row order; calendar spacing is only sanity-checked.
  // Sub-weekly grids (business days) have irregular calendar spacing, skip those.
  if (delta < 1.0 / 53.0) return;
  long expected = std::lround(365.2425 * delta);
  long tol = std::max(4L, expected / 2);
  for (std::size_t r = 1; r < days.size(); ++r) {
    long gap = days[r] - days[r - 1];
    if (gap > expected + tol || gap < expected - tol) {
      fail(ErrorCode::kData, "date gap between rows " + std::to_string(r - 1) + " and " +
                                 std::to_string(r) + " (" + std::to_string(gap) +
                                 " days, expected about " + std::to_string(expected) + ")");
    }
  }
}

}  // namespace

YieldPanel parse_yield_csv(std::istream& source, const MaturityGrid& grid) {
  grid.validate();
  std::string line;
  if (!std::getline(source, line)) fail(ErrorCode::kParse, "empty CSV");
  auto header = split_csv_line(line);
  for (auto& cell : header) cell = trim(cell);
  if (header.empty() || header[0] != "date") {
    fail(ErrorCode::kParse, "CSV header must start with 'date'");
  }
  // Map each grid label to its CSV column.
  std::vector<std::size_t> col_of(grid.size());
  std::vector<bool> used(header.size(), false);
  used[0] = true;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    bool found = false;
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (header[c] == grid.labels[j]) {
        if (used[c]) fail(ErrorCode::kParse, "duplicate maturity column '" + header[c] + "'");
        col_of[j] = c;
        used[c] = true;
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorCode::kParse, "missing maturity column '" + grid.labels[j] + "'");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (!used[c]) fail(ErrorCode::kParse, "unknown column '" + header[c] + "'");
  }

  std::vector<std::string> dates;
  std::vector<long> day_numbers;
  std::vector<double> cells;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      fail(ErrorCode::kParse, "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(header.size()));
    }
    std::string date = trim(fields[0]);
    long dn = parse_iso_date(date);
    if (!day_numbers.empty() && dn <= day_numbers.back()) {
      fail(ErrorCode::kData, "non-monotone dates at row " + std::to_string(row));
    }
    dates.push_back(date);
    day_numbers.push_back(dn);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      cells.push_back(parse_cell(trim(fields[col_of[j]]), row, grid.labels[j]));
    }
    ++row;
  }
  if (row < 2) fail(ErrorCode::kData, "panel needs at least 2 rows");
  check_date_spacing(day_numbers, grid.delta);

  YieldPanel panel;
  panel.grid = grid;
  panel.dates = std::move(dates);
  panel.yields.resize(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t r = 0; r < row; ++r) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      panel.yields(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          cells[r * grid.size() + j];
    }
  }
  return panel;
}

YieldPanel read_yield_csv(const std::string& path, const MaturityGrid& grid) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  return parse_yield_csv(in, grid);
}

void write_yield_csv(const YieldPanel& panel, std::ostream& out) {
  out << "date";
  for (const auto& label : panel.grid.labels) out << ',' << label;
  out << '\n';
  for (std::size_t r = 0; r < panel.rows(); ++r) {
    out << panel.dates[r];
    for (std::size_t j = 0; j < panel.cols(); ++j) {
      out << ',' << format_double(panel.yields(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
}

void write_yield_csv(const YieldPanel& panel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  write_yield_csv(panel, out);
}

}  // namespace ycv
