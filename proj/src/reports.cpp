#include "reports.hpp"

#include <json.hpp>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "backtest.hpp"
#include "calibration.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "grid.hpp"
#include "prediction.hpp"
#include "vasicek.hpp"

namespace ycv {

namespace {

using json = nlohmann::ordered_json;

std::filesystem::path prepare_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir + "'");
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

YieldPanel load_panel(const RunConfig& cfg) {
  return read_yield_csv(cfg.get_string("data"), cfg.grid());
}

AnnuitySpec annuity_from(const RunConfig& cfg) {
  AnnuitySpec annuity;
  if (cfg.has("annuity_maturities")) {
    annuity.maturities = cfg.get_number_list("annuity_maturities");
  } else {
    annuity = AnnuitySpec::standard();
  }
  return annuity;
}

json scaling_to_json(const ScalingSpec& spec) {
  json j;
  j["theta"] = spec.theta;
  if (spec.floor) {
    j["scaling_floor"] = *spec.floor;
  } else {
    j["scaling_floor"] = "off";
  }
  return j;
}

void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& dir) {
  MaturityGrid grid = cfg.grid();
  grid.require_short_maturity();
  ScalingSpec scaling = cfg.scaling();

  LabeledMatrix sigma_csv = read_matrix_csv(cfg.get_string("sigma"));
  if (sigma_csv.labels != grid.labels) {
    fail(ErrorCode::kData, "simulate: sigma matrix labels do not match the grid labels");
  }
  FactorLoadings loadings = FactorLoadings::from_sigma(sigma_csv.values);

  Eigen::VectorXd initial;
  std::string initial_source;
  if (cfg.has("initial_curve")) {
    YieldPanel start = read_yield_csv(cfg.get_string("initial_curve"), grid);
    initial = start.yields.row(start.yields.rows() - 1).transpose();
    initial_source = cfg.get_string("initial_curve");
  } else {
    initial = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()),
                                        cfg.get_double("initial_flat"));
    initial_source = "flat " + format_double(cfg.get_double("initial_flat"));
  }
  long steps = cfg.get_int("steps");
  if (steps < 1) fail(ErrorCode::kInvalidArgument, "simulate: steps must be >= 1");

  YieldPanel panel =
      simulate_path(initial, static_cast<int>(steps), loadings, scaling, cfg.get_seed(), grid);
  write_yield_csv(panel, (dir / "panel.csv").string());

  json meta;
  meta["command"] = "simulate";
  meta["seed"] = cfg.get_seed();
  meta["steps"] = steps;
  meta["delta"] = grid.delta;
  meta["maturities"] = grid.maturities;
  meta["labels"] = grid.labels;
  meta["sigma_source"] = cfg.get_string("sigma");
  meta["initial"] = initial_source;
  meta["scaling"] = scaling_to_json(scaling);
  meta["extrapolate_flat_top"] = true;  // simulation always closes the top end flat
  write_json(dir / "simulate_meta.json", meta);
}

/// PCA fields shared by both calibrate modes: full-set shares plus the
/// restriction to maturities of at least one year when that is a proper
/// nonempty subset.
void append_pca(json& doc, const Eigen::MatrixXd& correlation,
                const std::vector<std::string>& labels) {
  PcaReport full = pca_report(correlation, {});
  doc["eigen_shares"] = full.shares;
  doc["cumulative_shares"] = full.cumulative;
  std::vector<std::size_t> subset;
  std::vector<std::string> subset_labels;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    double m;
    try {
      m = parse_maturity_label(labels[j]);
    } catch (const Error&) {
      continue;
    }
    if (m >= 1.0) {
      subset.push_back(j);
      subset_labels.push_back(labels[j]);
    }
  }
  if (!subset.empty() && subset.size() < labels.size()) {
    PcaReport restricted = pca_report(correlation, subset);
    json r;
    r["min_maturity"] = 1.0;
    r["labels"] = subset_labels;
    r["eigen_shares"] = restricted.shares;
    r["cumulative_shares"] = restricted.cumulative;
    doc["restricted_pca"] = std::move(r);
  }
}

void cmd_calibrate(const RunConfig& cfg, const std::filesystem::path& dir) {
  json doc;
  if (cfg.has("matrix")) {
    LabeledMatrix fixture = read_matrix_csv(cfg.get_string("matrix"));
    std::vector<std::size_t> degenerate;
    Eigen::MatrixXd correlation = correlation_from_sigma(fixture.values, &degenerate);
    if (!degenerate.empty()) {
      fail(ErrorCode::kData, "calibrate: fixture matrix has a nonpositive diagonal entry");
    }
    doc["mode"] = "matrix";
    doc["labels"] = fixture.labels;
    doc["s_corrected"] = matrix_to_json(fixture.values);
    doc["correlation"] = matrix_to_json(correlation);
    append_pca(doc, correlation, fixture.labels);
  } else {
    YieldPanel panel = load_panel(cfg);
    ScalingSpec scaling = cfg.scaling();
    CovarianceEstimate est =
        calibrate(panel, scaling, cfg.extrapolate_flat(), cfg.threads());
    doc["mode"] = "panel";
    doc["labels"] = est.labels;
    doc["K"] = est.K;
    doc["delta"] = est.delta;
    doc["theta"] = est.theta;
    doc["s_bias"] = matrix_to_json(est.s_bias);
    doc["s_corrected"] = matrix_to_json(est.s_corrected);
    doc["beta"] = matrix_to_json(est.beta);
    doc["correlation"] = matrix_to_json(est.correlation);
    doc["degenerate_diagonals"] = est.degenerate;
    if (est.degenerate.empty()) {
      append_pca(doc, est.correlation, est.labels);
    }
    if (cfg.get_bool("convergence", false)) {
      auto series = convergence_series(panel, scaling, cfg.extrapolate_flat());
      std::string csv = "K,maturity,s_bias,s_corrected\n";
      for (const auto& p : series) {
        csv += std::to_string(p.K) + ',' + panel.grid.labels[p.maturity_index] + ',' +
               format_double(p.s_bias) + ',' + format_double(p.s_corrected) + '\n';
      }
      write_text(dir / "convergence.csv", csv);
    }
  }
  write_json(dir / "calibration.json", doc);
}

void cmd_predict(const RunConfig& cfg, const std::filesystem::path& dir) {
  YieldPanel panel = load_panel(cfg);
  ScalingSpec scaling = cfg.scaling();
  const bool extrap = cfg.extrapolate_flat();
  CurveForecast fc = predict_next_curve(panel, scaling, extrap);

  json doc;
  doc["conditioning_row"] = fc.yields.conditioning_row;
  doc["delta"] = panel.grid.delta;
  json per_maturity = json::array();
  for (Eigen::Index j = 0; j < fc.yields.mean.size(); ++j) {
    json entry;
    entry["label"] = panel.grid.labels[static_cast<std::size_t>(j)];
    entry["maturity"] = panel.grid.maturities[static_cast<std::size_t>(j)];
    entry["mean_yield"] = fc.yields.mean[j];
    entry["stdev_yield"] = std::sqrt(fc.yields.covariance(j, j));
    entry["roll_down_yield"] = fc.roll_down[j];
    per_maturity.push_back(std::move(entry));
  }
  doc["forecasts"] = std::move(per_maturity);

  UpsilonSeries upsilon = compute_upsilon(panel, extrap);
  ScaledReturnMatrix scaled = scaled_returns(upsilon, panel, scaling, extrap);
  if (cfg.has("lambda")) {
    auto lam = cfg.get_number_list("lambda");
    if (lam.size() != static_cast<std::size_t>(fc.increment.mean.size())) {
      fail(ErrorCode::kInvalidArgument, "predict: lambda length must match the grid dimension");
    }
    Eigen::VectorXd lambda =
        Eigen::Map<const Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
    Eigen::VectorXd adj = mpr_adjusted_mean(fc.increment, lambda, fc.shifted, scaled, scaling);
    json adjusted = json::array();
    for (Eigen::Index j = 0; j < adj.size(); ++j) {
      double m = panel.grid.maturities[static_cast<std::size_t>(j)];
      adjusted.push_back(((m + panel.grid.delta) * fc.shifted[j] + adj[j]) / m);
    }
    doc["mean_yield_mpr"] = std::move(adjusted);
    doc["lambda"] = lam;
  }
  write_json(dir / "forecast.json", doc);

  long samples = cfg.get_int("samples", 0);
  if (samples > 0) {
    GaussianStream stream(cfg.get_seed());
    std::string csv = "sample";
    for (const auto& l : panel.grid.labels) csv += ',' + l;
    csv += '\n';
    Eigen::VectorXd noise(scaled.K);
    for (long s = 0; s < samples; ++s) {
      for (Eigen::Index k = 0; k < scaled.K; ++k) {
        noise[k] = stream.normal(static_cast<std::uint64_t>(s + 1), static_cast<std::uint64_t>(k));
      }
      Eigen::VectorXd curve = sample_next_curve(fc, scaled, scaling, panel.grid, noise);
      csv += std::to_string(s);
      for (Eigen::Index j = 0; j < curve.size(); ++j) csv += ',' + format_double(curve[j]);
      csv += '\n';
    }
    write_text(dir / "samples.csv", csv);
  }
}

std::string residual_csv(const ResidualSeries& series, const char* value_name) {
  std::string csv = std::string("time,") + value_name + ",tau\n";
  for (std::size_t i = 0; i < series.residuals.size(); ++i) {
    csv += std::to_string(series.times[i]) + ',' + format_double(series.residuals[i]) + ',' +
           format_double(series.taus[i]) + '\n';
  }
  return csv;
}

json diagnostics_to_json(const ResidualDiagnostics& diag, std::size_t n) {
  json j;
  j["n"] = n;
  j["mean"] = diag.mean;
  j["variance"] = diag.variance;
  j["lag1_autocorr"] = diag.lag1_autocorr;
  j["abs_lag1_autocorr"] = diag.abs_lag1_autocorr;
  return j;
}

void cmd_backtest(const RunConfig& cfg, const std::filesystem::path& dir) {
  YieldPanel panel = load_panel(cfg);
  ScalingSpec scaling = cfg.scaling();
  AnnuitySpec annuity = annuity_from(cfg);
  Eigen::Index window_start = cfg.get_int("window_start");
  if (window_start >= static_cast<Eigen::Index>(panel.rows())) {
    fail(ErrorCode::kInvalidArgument, "backtest: window start is after the data end");
  }
  int stride = static_cast<int>(cfg.get_int("stride", 1));
  const bool extrap = cfg.extrapolate_flat();

  ResidualSeries series = residual_series(panel, annuity, scaling, window_start, stride, extrap);
  write_text(dir / "residuals.csv", residual_csv(series, "z"));
  ResidualDiagnostics diag = residual_diagnostics(series.residuals);

  std::string qq = "theoretical,sample\n";
  for (const auto& [q, s] : diag.qq_pairs) {
    qq += format_double(q) + ',' + format_double(s) + '\n';
  }
  write_text(dir / "qq.csv", qq);

  json doc;
  doc["window_start"] = window_start;
  doc["stride"] = stride;
  doc["annuity_maturities"] = annuity.maturities;
  doc["scaling"] = scaling_to_json(scaling);
  doc["portfolio"] = diagnostics_to_json(diag, series.residuals.size());

  json per_maturity = json::array();
  for (double m : annuity.maturities) {
    AnnuitySpec single;
    single.maturities = {m};
    ResidualSeries s = residual_series(panel, single, scaling, window_start, stride, extrap);
    std::size_t idx = panel.grid.index_of(m);
    write_text(dir / ("residuals_m_" + panel.grid.labels[idx] + ".csv"), residual_csv(s, "z"));
    json entry = diagnostics_to_json(residual_diagnostics(s.residuals), s.residuals.size());
    entry["label"] = panel.grid.labels[idx];
    per_maturity.push_back(std::move(entry));
  }
  doc["per_maturity"] = std::move(per_maturity);
  write_json(dir / "backtest.json", doc);
}

void cmd_vasicek(const RunConfig& cfg, const std::filesystem::path& dir) {
  YieldPanel panel = load_panel(cfg);
  ScalingSpec scaling = cfg.scaling();
  AnnuitySpec annuity = annuity_from(cfg);
  Eigen::Index window_start = cfg.get_int("window_start");
  int stride = static_cast<int>(cfg.get_int("stride", 1));
  const bool extrap = cfg.extrapolate_flat();

  VasicekBacktest bt = vasicek_residuals(panel, annuity, window_start);
  write_text(dir / "vasicek_residuals.csv", residual_csv(bt.residuals, "v"));

  std::string params_csv = "time,kappa,theta,g\n";
  for (std::size_t i = 0; i < bt.window_params.size(); ++i) {
    const auto& p = bt.window_params[i];
    params_csv += std::to_string(bt.residuals.times[i]) + ',' + format_double(p.kappa) + ',' +
                  format_double(p.theta) + ',' + format_double(p.g) + '\n';
  }
  write_text(dir / "vasicek_params.csv", params_csv);

  // Side-by-side with the non-parametric model's residuals on the same window.
  ResidualSeries z = residual_series(panel, annuity, scaling, window_start, stride, extrap);
  std::string cmp = "time,z,v\n";
  for (std::size_t i = 0; i < z.residuals.size(); ++i) {
    cmp += std::to_string(z.times[i]) + ',' + format_double(z.residuals[i]) + ',' +
           format_double(bt.residuals.residuals[i]) + '\n';
  }
  write_text(dir / "comparison.csv", cmp);

  const auto& last = bt.window_params.back();
  json doc;
  doc["window_start"] = window_start;
  doc["annuity_maturities"] = annuity.maturities;
  json params;
  params["kappa"] = last.kappa;
  params["theta"] = last.theta;
  params["g"] = last.g;
  doc["final_params"] = std::move(params);
  json window_params = json::array();
  for (std::size_t i = 0; i < bt.window_params.size(); ++i) {
    const auto& wp = bt.window_params[i];
    window_params.push_back(
        {static_cast<double>(bt.residuals.times[i]), wp.kappa, wp.theta, wp.g});
  }
  doc["window_params"] = std::move(window_params);
  doc["vasicek"] = diagnostics_to_json(residual_diagnostics(bt.residuals.residuals),
                                       bt.residuals.residuals.size());
  doc["portfolio"] = diagnostics_to_json(residual_diagnostics(z.residuals), z.residuals.size());
  write_json(dir / "vasicek.json", doc);
}

void cmd_arbitrage(const RunConfig& cfg, const std::filesystem::path& dir) {
  YieldPanel panel = load_panel(cfg);
  ScalingSpec scaling = cfg.scaling();
  Eigen::Index window_start = cfg.get_int("window_start");
  int stride = static_cast<int>(cfg.get_int("stride", 1));
  double m1 = cfg.get_double("m1");
  double m2 = cfg.get_double("m2");

  ArbitrageResult res = arbitrage_portfolio(panel, m1, m2, scaling, window_start, stride,
                                            cfg.extrapolate_flat());
  std::string csv = "time,w,gain_with_hjm,gain_without_hjm\n";
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    csv += std::to_string(res.times[i]) + ',' + format_double(res.weights[i]) + ',' +
           format_double(res.gain_with_hjm[i]) + ',' + format_double(res.gain_without_hjm[i]) + '\n';
  }
  write_text(dir / "arbitrage.csv", csv);

  json doc;
  doc["m1"] = m1;
  doc["m2"] = m2;
  doc["window_start"] = window_start;
  doc["n"] = res.times.size();
  doc["t_with_hjm"] = res.t_with;
  doc["t_without_hjm"] = res.t_without;
  doc["w_min"] = *std::min_element(res.weights.begin(), res.weights.end());
  doc["w_max"] = *std::max_element(res.weights.begin(), res.weights.end());
  write_json(dir / "arbitrage.json", doc);
}

void cmd_grid_compare(const RunConfig& cfg, const std::filesystem::path& dir) {
  YieldPanel panel = load_panel(cfg);
  int factor = static_cast<int>(cfg.get_int("coarse_factor"));
  GridCompareResult res =
      grid_compare(panel, factor, cfg.scaling(), cfg.extrapolate_flat());

  LabeledMatrix rel;
  rel.labels = res.labels;
  rel.values = res.relative_difference;
  write_matrix_csv(rel, (dir / "grid_compare.csv").string());

  double median = 0.0;
  {
    std::vector<double> entries;
    for (Eigen::Index r = 0; r < res.relative_difference.rows(); ++r) {
      for (Eigen::Index c = 0; c < res.relative_difference.cols(); ++c) {
        double v = res.relative_difference(r, c);
        if (std::isfinite(v)) entries.push_back(std::abs(v));
      }
    }
    if (!entries.empty()) {
      std::sort(entries.begin(), entries.end());
      median = entries[entries.size() / 2];
    }
  }
  json doc;
  doc["coarse_factor"] = factor;
  doc["labels"] = res.labels;
  doc["median_abs_relative_difference"] = median;
  doc["fine"] = matrix_to_json(res.fine);
  doc["coarse"] = matrix_to_json(res.coarse);
  doc["relative_difference"] = matrix_to_json(res.relative_difference);
  write_json(dir / "grid_compare.json", doc);
}

}  // namespace

void run_command(const RunConfig& config, const std::string& command, const std::string& out_dir) {
  std::filesystem::path dir = prepare_dir(out_dir);
  if (command == "simulate") return cmd_simulate(config, dir);
  if (command == "calibrate") return cmd_calibrate(config, dir);
  if (command == "predict") return cmd_predict(config, dir);
  if (command == "backtest") return cmd_backtest(config, dir);
  if (command == "vasicek") return cmd_vasicek(config, dir);
  if (command == "arbitrage") return cmd_arbitrage(config, dir);
  if (command == "grid-compare") return cmd_grid_compare(config, dir);
  fail(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
}

}  // namespace ycv
