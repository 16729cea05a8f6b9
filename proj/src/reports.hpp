#pragma once

#include <string>

#include "config.hpp"

namespace ycv {

/// Runs one pipeline command ("simulate", "calibrate", "predict", "backtest",
/// "vasicek", "arbitrage", "grid-compare") with the given configuration and
/// writes its CSV/JSON outputs into `out_dir` (created if missing). Outputs
/// are deterministic functions of the configuration, including the seed.
void run_command(const RunConfig& config, const std::string& command, const std::string& out_dir);

}  // namespace ycv
