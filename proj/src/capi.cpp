#include "ycurve/ycurve.h"

#include <cstring>
#include <string>

#include "calibration.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "reports.hpp"

namespace {

thread_local std::string g_last_error;

ycv_status status_of(const ycv::Error& e) {
  switch (e.code()) {
    case ycv::ErrorCode::kInvalidArgument:
      return YCV_EINVAL;
    case ycv::ErrorCode::kParse:
      return YCV_EPARSE;
    case ycv::ErrorCode::kData:
      return YCV_EDATA;
    case ycv::ErrorCode::kNumeric:
      return YCV_ENUMERIC;
    case ycv::ErrorCode::kIo:
      return YCV_EIO;
  }
  return YCV_EUNKNOWN;
}

template <typename Fn>
ycv_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return YCV_OK;
  } catch (const ycv::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return YCV_EUNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return YCV_EUNKNOWN;
  }
}

ycv_status invalid(const char* message) {
  g_last_error = message;
  return YCV_EINVAL;
}

}  // namespace

struct ycv_config {
  ycv::RunConfig config;
};

struct ycv_panel {
  ycv::YieldPanel panel;
};

struct ycv_calibration {
  ycv::CovarianceEstimate estimate;
};

extern "C" {

const char* ycv_version(void) { return "0.1.0"; }

const char* ycv_last_error(void) { return g_last_error.c_str(); }

ycv_status ycv_config_create(ycv_config** out) {
  if (!out) return invalid("null output pointer");
  return guarded([&] { *out = new ycv_config{}; });
}

ycv_status ycv_config_load(const char* path, ycv_config** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] { *out = new ycv_config{ycv::RunConfig::load(path)}; });
}

ycv_status ycv_config_set(ycv_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("null argument");
  return guarded([&] { config->config.set(key, value); });
}

void ycv_config_free(ycv_config* config) { delete config; }

ycv_status ycv_panel_read_csv(const char* path, const ycv_config* config, ycv_panel** out) {
  if (!path || !config || !out) return invalid("null argument");
  return guarded([&] {
    *out = new ycv_panel{ycv::read_yield_csv(path, config->config.grid())};
  });
}

ycv_status ycv_panel_write_csv(const ycv_panel* panel, const char* path) {
  if (!panel || !path) return invalid("null argument");
  return guarded([&] { ycv::write_yield_csv(panel->panel, path); });
}

ycv_status ycv_panel_shape(const ycv_panel* panel, size_t* rows, size_t* cols) {
  if (!panel || !rows || !cols) return invalid("null argument");
  *rows = panel->panel.rows();
  *cols = panel->panel.cols();
  return YCV_OK;
}

ycv_status ycv_panel_yield(const ycv_panel* panel, size_t row, size_t col, double* out) {
  if (!panel || !out) return invalid("null argument");
  if (row >= panel->panel.rows() || col >= panel->panel.cols()) {
    return invalid("panel index out of range");
  }
  *out = panel->panel.yields(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  return YCV_OK;
}

void ycv_panel_free(ycv_panel* panel) { delete panel; }

ycv_status ycv_simulate(const ycv_config* config, ycv_panel** out) {
  if (!config || !out) return invalid("null argument");
  return guarded([&] {
    const ycv::RunConfig& cfg = config->config;
    ycv::MaturityGrid grid = cfg.grid();
    ycv::LabeledMatrix sigma = ycv::read_matrix_csv(cfg.get_string("sigma"));
    if (sigma.labels != grid.labels) {
      ycv::fail(ycv::ErrorCode::kData, "simulate: sigma matrix labels do not match the grid");
    }
    ycv::FactorLoadings loadings = ycv::FactorLoadings::from_sigma(sigma.values);
    Eigen::VectorXd initial;
    if (cfg.has("initial_curve")) {
      ycv::YieldPanel start = ycv::read_yield_csv(cfg.get_string("initial_curve"), grid);
      initial = start.yields.row(start.yields.rows() - 1).transpose();
    } else {
      initial = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()),
                                          cfg.get_double("initial_flat"));
    }
    *out = new ycv_panel{ycv::simulate_path(initial, static_cast<int>(cfg.get_int("steps")),
                                            loadings, cfg.scaling(), cfg.get_seed(), grid)};
  });
}

ycv_status ycv_calibrate(const ycv_panel* panel, const ycv_config* config,
                         ycv_calibration** out) {
  if (!panel || !config || !out) return invalid("null argument");
  return guarded([&] {
    const ycv::RunConfig& cfg = config->config;
    *out = new ycv_calibration{ycv::calibrate(panel->panel, cfg.scaling(),
                                              cfg.extrapolate_flat(), cfg.threads())};
  });
}

ycv_status ycv_calibration_dim(const ycv_calibration* calibration, size_t* d) {
  if (!calibration || !d) return invalid("null argument");
  *d = static_cast<size_t>(calibration->estimate.s_corrected.rows());
  return YCV_OK;
}

ycv_status ycv_calibration_matrix(const ycv_calibration* calibration, const char* name,
                                  double* buf, size_t buflen) {
  if (!calibration || !name || !buf) return invalid("null argument");
  const ycv::CovarianceEstimate& est = calibration->estimate;
  const Eigen::MatrixXd* m = nullptr;
  if (std::strcmp(name, "s_bias") == 0) m = &est.s_bias;
  if (std::strcmp(name, "s_corrected") == 0) m = &est.s_corrected;
  if (std::strcmp(name, "beta") == 0) m = &est.beta;
  if (std::strcmp(name, "correlation") == 0) m = &est.correlation;
  if (!m) return invalid("unknown matrix name");
  size_t need = static_cast<size_t>(m->rows()) * static_cast<size_t>(m->cols());
  if (buflen < need) return invalid("buffer too small");
  for (Eigen::Index r = 0; r < m->rows(); ++r) {
    for (Eigen::Index c = 0; c < m->cols(); ++c) {
      buf[static_cast<size_t>(r) * static_cast<size_t>(m->cols()) + static_cast<size_t>(c)] =
          (*m)(r, c);
    }
  }
  return YCV_OK;
}

ycv_status ycv_calibration_eigen_share(const ycv_calibration* calibration, size_t i,
                                       double* out) {
  if (!calibration || !out) return invalid("null argument");
  const auto& shares = calibration->estimate.eigen_shares;
  if (i >= shares.size()) return invalid("eigen share index out of range");
  *out = shares[i];
  return YCV_OK;
}

void ycv_calibration_free(ycv_calibration* calibration) { delete calibration; }

ycv_status ycv_run(const ycv_config* config, const char* command, const char* out_dir) {
  if (!config || !command || !out_dir) return invalid("null argument");
  return guarded([&] { ycv::run_command(config->config, command, out_dir); });
}

}  // extern "C"
