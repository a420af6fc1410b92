#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hermicop/calibration.hpp"

namespace hermicop::cli {

// exit codes
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kMissingData = 3;
inline constexpr int kNumericalError = 4;

/// Thrown when a required file or data row is absent (exit code 3).
struct MissingData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One row of the pillar CSV
/// `date,pair,tenor,F,D_dom,D_for,atm,c25,p25,c10,p10`.
struct PillarRow {
  std::string date;
  std::string pair;
  SmilePillars pillars;
  bool full_smile = false;  // all five vols present and positive
};

std::vector<PillarRow> read_pillar_csv(const std::string& path);
void write_pillar_csv(const std::string& path, const std::vector<PillarRow>& rows);

struct FitDensityConfig {
  std::string family = "clayton";
  double spearman = 0.6;
  double bound = 6.0;
  int sections = 200;
  int n_max = 4;
  double tol = 1e-10;
  int max_sweeps = 5000;
  int max_order = 8;
  std::string out_dir = ".";
};
int cmd_fit_density(const FitDensityConfig& cfg);

struct CorrectConfig {
  std::string in_csv;
  std::string in_meta;
  std::string out_csv;
  std::string out_meta;
  std::string report;
  int n_max = 0;  // 0: normalization + non-negativity only
  double tol = 1e-10;
  int max_sweeps = 5000;
};
int cmd_correct(const CorrectConfig& cfg);

struct PriceConfig {
  std::string xz_csv;
  std::string yz_csv;
  bool invert_yz = false;
  std::string copula = "gauss";  // family name or "hermite"
  double theta = 0.0;
  std::string params_json;  // hermite parameters
  double strike_lo = 0.0, strike_hi = 0.0;
  int strike_count = 21;
  PricingNumerics numerics{};
  std::string out_dir = ".";
};
int cmd_price(const PriceConfig& cfg);

struct CalibrateConfig {
  std::string xz_csv;
  std::string yz_csv;
  std::string cross_csv;
  std::string family = "hermite";
  PricingNumerics numerics{};
  std::string out_dir = ".";
};
int cmd_calibrate(const CalibrateConfig& cfg);

struct BacktestConfig {
  std::string data_csv;
  std::string family = "hermite";
  std::string setting = "c";
  PricingNumerics numerics{};
  std::string out_dir = ".";
};
int cmd_backtest(const BacktestConfig& cfg);

struct ParamSweepConfig {
  std::string xz_csv;
  std::string yz_csv;
  std::string params_json;
  std::string param = "rho";  // rho | m3 | m4 | m5 | m6
  double lo = 0.0, hi = 0.0;
  int steps = 1;
  PricingNumerics numerics{};
  std::string out_csv = "sweep.csv";
};
int cmd_param_sweep(const ParamSweepConfig& cfg);

}  // namespace hermicop::cli
