#include "reports.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "calibration.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "support/fixtures.hpp"
#include "support/schema_check.hpp"

#ifndef YCV_DATA_DIR
#define YCV_DATA_DIR "."
#endif
#ifndef YCV_SCHEMA_DIR
#define YCV_SCHEMA_DIR "."
#endif

namespace ycv {
namespace {

namespace fs = std::filesystem;

class ReportsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    work_ = fs::path("reports_test_work");
    fs::remove_all(work_);
    fs::create_directories(work_);

    // Small oracle panel plus its sigma fixture on disk.
    LabeledMatrix sigma;
    sigma.labels = {"1W", "5Y", "10Y", "15Y", "20Y"};
    sigma.values = testing::backtest_sigma();
    write_matrix_csv(sigma, (work_ / "sigma.csv").string());
    YieldPanel panel =
        testing::simulate_panel(testing::backtest_grid(), sigma.values, 0.03, 160, 2718);
    write_yield_csv(panel, (work_ / "panel.csv").string());
  }

  RunConfig base_config() const {
    std::istringstream in(
        "delta = 1/52\n"
        "maturities = 1/52, 5, 10, 15, 20\n"
        "labels = 1W, 5Y, 10Y, 15Y, 20Y\n"
        "extrapolate_flat = true\n"
        "data = " + (work_ / "panel.csv").string() + "\n" +
        "sigma = " + (work_ / "sigma.csv").string() + "\n");
    return RunConfig::parse(in);
  }

  void expect_schema(const std::string& file, const std::string& schema) const {
    auto doc = testing::load_json((work_ / file).string());
    auto sch = testing::load_json(std::string(YCV_SCHEMA_DIR) + "/" + schema);
    std::string error;
    testing::check_schema(doc, sch, &error);
    EXPECT_TRUE(error.empty()) << file << ": " << error;
  }

  fs::path work_;
};

TEST_F(ReportsTest, SimulateWritesPanelAndMetadata) {
  RunConfig cfg = base_config();
  cfg.set("steps", "30");
  cfg.set("initial_flat", "0.03");
  cfg.set("seed", "9");
  run_command(cfg, "simulate", work_.string());
  expect_schema("simulate_meta.json", "simulate_meta.schema.json");
  YieldPanel out = read_yield_csv((work_ / "panel.csv").string(), cfg.grid());
  EXPECT_EQ(out.rows(), 31u);
}

TEST_F(ReportsTest, CalibratePanelMode) {
  RunConfig cfg = base_config();
  cfg.set("convergence", "true");
  run_command(cfg, "calibrate", work_.string());
  expect_schema("calibration.json", "calibration_panel.schema.json");
  auto doc = testing::load_json((work_ / "calibration.json").string());
  EXPECT_EQ(doc["mode"], "panel");
  // beta = s_bias - s_corrected, verified from the emitted numbers.
  double b = doc["beta"][1][2].get<double>();
  EXPECT_NEAR(b, doc["s_bias"][1][2].get<double>() - doc["s_corrected"][1][2].get<double>(),
              1e-15);
  std::ifstream conv(work_ / "convergence.csv");
  std::string header;
  std::getline(conv, header);
  EXPECT_EQ(header, "K,maturity,s_bias,s_corrected");
}

TEST_F(ReportsTest, CalibrateMatrixPassthrough) {
  RunConfig cfg;
  cfg.set("matrix", std::string(YCV_DATA_DIR) + "/table1.csv");
  run_command(cfg, "calibrate", work_.string());
  expect_schema("calibration.json", "calibration_matrix.schema.json");
  auto doc = testing::load_json((work_ / "calibration.json").string());
  EXPECT_EQ(doc["mode"], "matrix");
  EXPECT_GE(doc["cumulative_shares"][4].get<double>(), 0.95);
  ASSERT_TRUE(doc.contains("restricted_pca"));
  EXPECT_EQ(doc["restricted_pca"]["labels"].size(), 13u);
}

TEST_F(ReportsTest, PredictWithSamplesAndMpr) {
  RunConfig cfg = base_config();
  cfg.set("samples", "5");
  cfg.set("seed", "3");
  cfg.set("lambda", "0, 0, 0, 0, 0");
  run_command(cfg, "predict", work_.string());
  expect_schema("forecast.json", "forecast.schema.json");
  auto doc = testing::load_json((work_ / "forecast.json").string());
  ASSERT_EQ(doc["forecasts"].size(), 5u);
  // Zero market price of risk leaves the forecast unchanged.
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_NEAR(doc["mean_yield_mpr"][j].get<double>(),
                doc["forecasts"][j]["mean_yield"].get<double>(), 1e-12);
  }
  std::ifstream samples(work_ / "samples.csv");
  std::string line;
  int lines = 0;
  while (std::getline(samples, line)) ++lines;
  EXPECT_EQ(lines, 6);  // header + 5 draws
}

TEST_F(ReportsTest, BacktestOutputs) {
  RunConfig cfg = base_config();
  cfg.set("annuity_maturities", "5, 10, 15");
  cfg.set("window_start", "120");
  run_command(cfg, "backtest", work_.string());
  expect_schema("backtest.json", "backtest.schema.json");
  std::ifstream res(work_ / "residuals.csv");
  std::string header;
  std::getline(res, header);
  EXPECT_EQ(header, "time,z,tau");
  EXPECT_TRUE(fs::exists(work_ / "residuals_m_10Y.csv"));
  EXPECT_TRUE(fs::exists(work_ / "qq.csv"));
}

TEST_F(ReportsTest, BacktestWindowAfterDataEndFails) {
  RunConfig cfg = base_config();
  cfg.set("annuity_maturities", "5, 10");
  cfg.set("window_start", "500");
  EXPECT_THROW(run_command(cfg, "backtest", work_.string()), Error);
}

TEST_F(ReportsTest, VasicekOutputs) {
  RunConfig cfg = base_config();
  cfg.set("annuity_maturities", "5, 10");
  cfg.set("window_start", "120");
  run_command(cfg, "vasicek", work_.string());
  expect_schema("vasicek.json", "vasicek.schema.json");
  std::ifstream cmp(work_ / "comparison.csv");
  std::string header;
  std::getline(cmp, header);
  EXPECT_EQ(header, "time,z,v");
  EXPECT_TRUE(fs::exists(work_ / "vasicek_params.csv"));
}

TEST_F(ReportsTest, ArbitrageOutputs) {
  RunConfig cfg = base_config();
  cfg.set("m1", "10");
  cfg.set("m2", "20");
  cfg.set("window_start", "120");
  run_command(cfg, "arbitrage", work_.string());
  expect_schema("arbitrage.json", "arbitrage.schema.json");
  std::ifstream csv(work_ / "arbitrage.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "time,w,gain_with_hjm,gain_without_hjm");
}

TEST_F(ReportsTest, GridCompareOutputs) {
  RunConfig cfg = base_config();
  cfg.set("coarse_factor", "4");
  // 160 increments divide evenly into 40 coarse steps; coarse delta 4/52
  // is not a maturity, so this must fail loudly.
  EXPECT_THROW(run_command(cfg, "grid-compare", work_.string()), Error);

  // With factor 1 the command degenerates to a zero matrix.
  cfg.set("coarse_factor", "1");
  run_command(cfg, "grid-compare", work_.string());
  expect_schema("grid_compare.json", "grid_compare.schema.json");
  auto doc = testing::load_json((work_ / "grid_compare.json").string());
  EXPECT_NEAR(doc["median_abs_relative_difference"].get<double>(), 0.0, 1e-12);
}

TEST_F(ReportsTest, UnknownCommandFails) {
  RunConfig cfg = base_config();
  EXPECT_THROW(run_command(cfg, "frobnicate", work_.string()), Error);
}

}  // namespace
}  // namespace ycv
