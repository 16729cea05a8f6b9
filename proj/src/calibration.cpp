#include "calibration.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "errors.hpp"

namespace ycv {

namespace {

constexpr double kDiagEpsilon = 1e-14;  // below this the quadratic degenerates to linear

/// Shifted curves for every observation step: row k-1 holds
/// Y(delta(k-1), delta k + m_j) for k = 1..K.
Eigen::MatrixXd shifted_matrix(const YieldPanel& panel, bool extrapolate_flat) {
  const Eigen::Index K = static_cast<Eigen::Index>(panel.rows()) - 1;
  const Eigen::Index d = static_cast<Eigen::Index>(panel.cols());
  Eigen::MatrixXd out(K, d);
  for (Eigen::Index k = 0; k < K; ++k) {
    out.row(k) =
        shifted_values(panel.yields.row(k).transpose(), panel.grid, extrapolate_flat).transpose();
  }
  return out;
}

void check_series(const UpsilonSeries& upsilon, const YieldPanel& panel) {
  if (upsilon.count() + 1 != static_cast<Eigen::Index>(panel.rows())) {
    fail(ErrorCode::kInvalidArgument, "calibration: upsilon/panel length mismatch");
  }
  if (upsilon.values.rows() != static_cast<Eigen::Index>(panel.cols())) {
    fail(ErrorCode::kInvalidArgument, "calibration: upsilon/panel dimension mismatch");
  }
}

/// Shared per-window quantities: h values of the shifted curves and the raw
/// scaled returns. Built once, reused by every bias formula.
struct CalibrationContext {
  Eigen::MatrixXd shifted;  // K x d
  Eigen::MatrixXd hs;       // K x d, h of shifted
  Eigen::MatrixXd scaled;   // d x K
  Eigen::VectorXd short_y;  // K entries, Y(delta(k-1), delta k)
  Eigen::MatrixXd s_bias;   // delta^{-1} * scaled*scaled'/K
  double delta = 0.0;
  Eigen::Index K = 0;

  static CalibrationContext build(const UpsilonSeries& upsilon, const YieldPanel& panel,
                                  const ScalingSpec& spec, bool extrapolate_flat) {
    check_series(upsilon, panel);
    spec.validate();
    CalibrationContext ctx;
    ctx.delta = panel.grid.delta;
    ctx.K = upsilon.count();
    ctx.shifted = shifted_matrix(panel, extrapolate_flat);
    const Eigen::Index d = ctx.shifted.cols();
    ctx.hs.resize(ctx.K, d);
    for (Eigen::Index k = 0; k < ctx.K; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) {
        try {
          ctx.hs(k, j) = h_scale(ctx.shifted(k, j), spec);
        } catch (const Error& e) {
          fail(e.code(), "calibration: step " + std::to_string(k + 1) + ", maturity " +
                             panel.grid.labels[static_cast<std::size_t>(j)] + ": " + e.what());
        }
      }
    }
    ctx.scaled = upsilon.values.cwiseQuotient(ctx.hs.transpose());
    ctx.short_y = upsilon.short_yields.head(ctx.K);
    ctx.s_bias = (ctx.scaled * ctx.scaled.transpose()) /
                 (static_cast<double>(ctx.K) * ctx.delta);
    return ctx;
  }

  BiasInputs diag_inputs(Eigen::Index i) const {
    BiasInputs in;
    const double Kd = static_cast<double>(K);
    in.a = delta / (4.0 * Kd) * hs.col(i).squaredNorm();
    in.b = 1.0 - delta / Kd * short_y.sum();
    in.c = -s_bias(i, i) +
           delta / Kd * (short_y.array() / hs.col(i).array()).square().sum();
    return in;
  }

  double offdiag(Eigen::Index i, Eigen::Index j, double s_ii, double s_jj) const {
    const double Kd = static_cast<double>(K);
    double e1 = (short_y.array().square() / (hs.col(i).array() * hs.col(j).array())).sum() / Kd;
    double e2 = (hs.col(i).array() * hs.col(j).array()).sum() / Kd;
    double e3 = (short_y.array() * shifted.col(i).array() / hs.col(j).array()).sum() / Kd;
    double e4 = (short_y.array() * shifted.col(j).array() / hs.col(i).array()).sum() / Kd;
    return s_bias(i, j) -
           delta * (e1 + 0.25 * e2 * s_ii * s_jj - 0.5 * e3 * s_ii - 0.5 * e4 * s_jj);
  }
};

void parallel_for_pairs(Eigen::Index d, int threads,
                        const std::function<void(Eigen::Index, Eigen::Index)>& body) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  if (threads <= 1 || pairs.size() < 2) {
    for (auto [i, j] : pairs) body(i, j);
    return;
  }
  std::atomic<std::size_t> next{0};
  unsigned n = std::min<std::size_t>(static_cast<std::size_t>(threads), pairs.size());
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = next.fetch_add(1); k < pairs.size(); k = next.fetch_add(1)) {
          body(pairs[k].first, pairs[k].second);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

ScaledReturnMatrix scaled_returns(const UpsilonSeries& upsilon, const YieldPanel& panel,
                                  const ScalingSpec& spec, bool extrapolate_flat) {
  auto ctx = CalibrationContext::build(upsilon, panel, spec, extrapolate_flat);
  ScaledReturnMatrix out;
  out.values = std::move(ctx.scaled);
  out.K = ctx.K;
  out.delta = ctx.delta;
  return out;
}

Eigen::MatrixXd raw_s(const ScaledReturnMatrix& scaled, const Eigen::VectorXd& eval_curve,
                      const ScalingSpec& spec) {
  if (eval_curve.size() != scaled.values.rows()) {
    fail(ErrorCode::kInvalidArgument, "raw_s: dimension mismatch");
  }
  if (scaled.K < 1) fail(ErrorCode::kInvalidArgument, "raw_s: empty return matrix");
  Eigen::VectorXd hs = varsigma_diagonal(eval_curve, spec);
  Eigen::MatrixXd inner =
      (scaled.values * scaled.values.transpose()) / static_cast<double>(scaled.K);
  return (hs * hs.transpose()).cwiseProduct(inner);
}

BiasInputs bias_inputs(const UpsilonSeries& upsilon, const YieldPanel& panel,
                       const ScalingSpec& spec, std::size_t i, bool extrapolate_flat) {
  auto ctx = CalibrationContext::build(upsilon, panel, spec, extrapolate_flat);
  if (i >= static_cast<std::size_t>(ctx.hs.cols())) {
    fail(ErrorCode::kInvalidArgument, "bias_inputs: maturity index out of range");
  }
  return ctx.diag_inputs(static_cast<Eigen::Index>(i));
}

double solve_diag(double a, double b, double c) {
  if (a < 0.0) fail(ErrorCode::kInvalidArgument, "solve_diag: a must be >= 0");
  if (a < kDiagEpsilon) {
    if (b <= 0.0) fail(ErrorCode::kNumeric, "solve_diag: b <= 0 in the linear limit");
    return -c / b;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) fail(ErrorCode::kNumeric, "bias quadratic unsolvable (negative discriminant)");
  return (-b + std::sqrt(disc)) / (2.0 * a);
}

double solve_offdiag(const UpsilonSeries& upsilon, const YieldPanel& panel,
                     const ScalingSpec& spec, std::size_t i, std::size_t j, double s_ii,
                     double s_jj, bool extrapolate_flat) {
  if (i == j) fail(ErrorCode::kInvalidArgument, "solve_offdiag: i and j must differ");
  auto ctx = CalibrationContext::build(upsilon, panel, spec, extrapolate_flat);
  if (i >= static_cast<std::size_t>(ctx.hs.cols()) || j >= static_cast<std::size_t>(ctx.hs.cols())) {
    fail(ErrorCode::kInvalidArgument, "solve_offdiag: maturity index out of range");
  }
  return ctx.offdiag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), s_ii, s_jj);
}

Eigen::MatrixXd correlation_from_sigma(const Eigen::MatrixXd& sigma,
                                       std::vector<std::size_t>* degenerate) {
  const Eigen::Index d = sigma.rows();
  Eigen::MatrixXd rho(d, d);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd sd(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (sigma(i, i) > 0.0) {
      sd[i] = std::sqrt(sigma(i, i));
    } else {
      sd[i] = nan;
      if (degenerate) degenerate->push_back(static_cast<std::size_t>(i));
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      rho(i, j) = i == j ? (sigma(i, i) > 0.0 ? 1.0 : nan) : sigma(i, j) / (sd[i] * sd[j]);
    }
  }
  return rho;
}

std::vector<double> eigen_shares(const Eigen::MatrixXd& sym) {
  if (!sym.allFinite()) fail(ErrorCode::kNumeric, "eigen_shares: matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  double total = ev.sum();
  if (total == 0.0) fail(ErrorCode::kNumeric, "eigen_shares: zero trace");
  std::vector<double> shares(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    shares[static_cast<std::size_t>(i)] = ev[ev.size() - 1 - i] / total;
  }
  return shares;
}

PcaReport pca_report(const Eigen::MatrixXd& correlation, const std::vector<std::size_t>& subset) {
  Eigen::MatrixXd sub;
  if (subset.empty()) {
    sub = correlation;
  } else {
    sub.resize(static_cast<Eigen::Index>(subset.size()), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t a = 0; a < subset.size(); ++a) {
      for (std::size_t b = 0; b < subset.size(); ++b) {
        if (subset[a] >= static_cast<std::size_t>(correlation.rows())) {
          fail(ErrorCode::kInvalidArgument, "pca_report: subset index out of range");
        }
        sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            correlation(static_cast<Eigen::Index>(subset[a]), static_cast<Eigen::Index>(subset[b]));
      }
    }
  }
  if (sub.size() == 0) fail(ErrorCode::kInvalidArgument, "pca_report: empty subset");
  PcaReport report;
  report.shares = eigen_shares(sub);
  report.cumulative.resize(report.shares.size());
  double run = 0.0;
  for (std::size_t i = 0; i < report.shares.size(); ++i) {
    run += report.shares[i];
    report.cumulative[i] = run;
  }
  return report;
}

CovarianceEstimate calibrate(const YieldPanel& panel, const ScalingSpec& spec,
                             bool extrapolate_flat, int threads) {
  if (panel.rows() < 3) fail(ErrorCode::kData, "calibrate: need K >= 2 observations");
  UpsilonSeries upsilon = compute_upsilon(panel, extrapolate_flat);
  auto ctx = CalibrationContext::build(upsilon, panel, spec, extrapolate_flat);
  const Eigen::Index d = ctx.hs.cols();

  CovarianceEstimate est;
  est.s_bias = ctx.s_bias;
  est.s_corrected.resize(d, d);
  est.K = ctx.K;
  est.delta = ctx.delta;
  est.theta = spec.theta;
  est.labels = panel.grid.labels;

  for (Eigen::Index i = 0; i < d; ++i) {
    BiasInputs in = ctx.diag_inputs(i);
    try {
      est.s_corrected(i, i) = solve_diag(in.a, in.b, in.c);
    } catch (const Error& e) {
      fail(e.code(),
           "calibrate: diagonal " + panel.grid.labels[static_cast<std::size_t>(i)] + ": " + e.what());
    }
  }
  parallel_for_pairs(d, threads, [&](Eigen::Index i, Eigen::Index j) {
    double v = ctx.offdiag(i, j, est.s_corrected(i, i), est.s_corrected(j, j));
    est.s_corrected(i, j) = v;
    est.s_corrected(j, i) = v;
  });

  est.beta = est.s_bias - est.s_corrected;
  est.correlation = correlation_from_sigma(est.s_corrected, &est.degenerate);
  if (est.degenerate.empty()) {
    est.eigen_shares = eigen_shares(est.correlation);
  }
  return est;
}

std::vector<ConvergencePoint> convergence_series(const YieldPanel& panel, const ScalingSpec& spec,
                                                 bool extrapolate_flat) {
  UpsilonSeries upsilon = compute_upsilon(panel, extrapolate_flat);
  auto ctx = CalibrationContext::build(upsilon, panel, spec, extrapolate_flat);
  const Eigen::Index d = ctx.hs.cols();
  const double delta = ctx.delta;

  std::vector<ConvergencePoint> out;
  out.reserve(static_cast<std::size_t>(ctx.K * d));
  // Running sums over the prefix k = 1..K reproduce every prefix estimate in
  // one pass.
  Eigen::VectorXd sum_u2 = Eigen::VectorXd::Zero(d);   // scaled increments squared
  Eigen::VectorXd sum_h2 = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sum_yh2 = Eigen::VectorXd::Zero(d);  // (short/h)^2
  double sum_y = 0.0;
  for (Eigen::Index k = 0; k < ctx.K; ++k) {
    sum_u2 += ctx.scaled.col(k).cwiseAbs2();
    sum_h2 += ctx.hs.row(k).transpose().cwiseAbs2();
    sum_yh2 +=
        (ctx.short_y[k] / ctx.hs.row(k).transpose().array()).square().matrix();
    sum_y += ctx.short_y[k];
    const double Kd = static_cast<double>(k + 1);
    double b = 1.0 - delta / Kd * sum_y;
    for (Eigen::Index j = 0; j < d; ++j) {
      double s_bias = sum_u2[j] / (Kd * delta);
      double a = delta / (4.0 * Kd) * sum_h2[j];
      double c = -s_bias + delta / Kd * sum_yh2[j];
      ConvergencePoint p;
      p.K = k + 1;
      p.maturity_index = static_cast<std::size_t>(j);
      p.s_bias = s_bias;
      double disc = b * b - 4.0 * a * c;
      p.s_corrected = disc >= 0.0 && a >= kDiagEpsilon ? (-b + std::sqrt(disc)) / (2.0 * a)
                      : b > 0.0                        ? -c / b
                                 : std::numeric_limits<double>::quiet_NaN();
      out.push_back(p);
    }
  }
  return out;
}

GridCompareResult grid_compare(const YieldPanel& panel, int coarse_factor,
                               const ScalingSpec& spec, bool extrapolate_flat) {
  if (coarse_factor < 1) fail(ErrorCode::kInvalidArgument, "grid_compare: coarse_factor must be >= 1");
  const Eigen::Index K = static_cast<Eigen::Index>(panel.rows()) - 1;
  if (K % coarse_factor != 0) {
    fail(ErrorCode::kInvalidArgument, "grid_compare: coarse_factor must divide the number of increments");
  }
  CovarianceEstimate fine = calibrate(panel, spec, extrapolate_flat);

  double coarse_delta = panel.grid.delta * coarse_factor;
  // Keep the maturities that exist on the coarse grid; the coarse delta itself
  // must be one of them so the short yield stays observable.
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < panel.grid.size(); ++j) {
    if (panel.grid.maturities[j] >= coarse_delta - 1e-12) keep.push_back(j);
  }
  if (keep.empty() ||
      std::abs(panel.grid.maturities[keep.front()] - coarse_delta) > 1e-12) {
    fail(ErrorCode::kData, "grid_compare: coarse delta is not a grid maturity");
  }

  YieldPanel coarse;
  coarse.grid.delta = coarse_delta;
  for (std::size_t j : keep) {
    coarse.grid.maturities.push_back(panel.grid.maturities[j]);
    coarse.grid.labels.push_back(panel.grid.labels[j]);
  }
  const Eigen::Index rows = K / coarse_factor + 1;
  if (rows < 3) fail(ErrorCode::kData, "grid_compare: insufficient rows after subsampling");
  coarse.yields.resize(rows, static_cast<Eigen::Index>(keep.size()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    coarse.dates.push_back(panel.dates[static_cast<std::size_t>(r) * coarse_factor]);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      coarse.yields(r, static_cast<Eigen::Index>(j)) =
          panel.yields(r * coarse_factor, static_cast<Eigen::Index>(keep[j]));
    }
  }
  CovarianceEstimate coarse_est = calibrate(coarse, spec, extrapolate_flat);

  GridCompareResult result;
  result.labels = coarse.grid.labels;
  const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
  result.fine.resize(n, n);
  result.coarse = coarse_est.s_corrected;
  result.relative_difference.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      double f = fine.s_corrected(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(a)]),
                                  static_cast<Eigen::Index>(keep[static_cast<std::size_t>(b)]));
      double c = coarse_est.s_corrected(a, b);
      result.fine(a, b) = f;
      result.relative_difference(a, b) =
          c != 0.0 ? (f - c) / c : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return result;
}

LabeledMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, "empty matrix CSV");
  std::stringstream header(line);
  std::string cell;
  std::vector<std::string> labels;
  bool first = true;
  while (std::getline(header, cell, ',')) {
    if (!first) labels.push_back(cell);
    first = false;
  }
  if (labels.empty()) fail(ErrorCode::kParse, "matrix CSV header has no labels");
  const std::size_t n = labels.size();
  LabeledMatrix out;
  out.labels = labels;
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::size_t r = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (r >= n) fail(ErrorCode::kParse, "matrix CSV has too many rows");
    std::stringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    if (field != labels[r]) {
      fail(ErrorCode::kParse, "matrix CSV row label '" + field + "' does not match '" + labels[r] + "'");
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::getline(row, field, ',')) fail(ErrorCode::kParse, "matrix CSV row too short");
      try {
        out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::stod(field);
      } catch (...) {
        fail(ErrorCode::kParse, "non-numeric matrix cell '" + field + "'");
      }
    }
    ++r;
  }
  if (r != n) fail(ErrorCode::kParse, "matrix CSV has too few rows");
  return out;
}

void write_matrix_csv(const LabeledMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << "label";
  for (const auto& l : matrix.labels) out << ',' << l;
  out << '\n';
  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
    out << matrix.labels[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) {
      out << ',' << format_double(matrix.values(r, c));
    }
    out << '\n';
  }
}

}  // namespace ycv
