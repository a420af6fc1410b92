#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"

namespace cli = hermicop::cli;

namespace {

// --config file.json provides defaults; explicit flags win.
nlohmann::json load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw cli::MissingData(std::string("config file not found: ") + argv[i + 1]);
      return nlohmann::json::parse(in);
    }
  }
  return nlohmann::json::object();
}

template <typename T>
void from_config(const nlohmann::json& cfg, const char* key, T& value) {
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

void add_numerics(CLI::App* cmd, hermicop::PricingNumerics& num) {
  cmd->add_option("--sections", num.sections, "grid sections per dimension");
  cmd->add_option("--halfwidth", num.halfwidth, "grid half width");
  cmd->add_option("--nodes", num.classical_nodes, "Gauss-Legendre budget per axis");
  cmd->add_option("--curve-grid", num.curve_grid, "smile curve density cells");
  cmd->add_option("--dykstra-tol", num.dykstra.tol, "projection stopping tolerance");
  cmd->add_option("--dykstra-sweeps", num.dykstra.max_sweeps, "projection sweep cap");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrected Hermite expansion copulas and cross FX smiles"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with flag defaults");

  nlohmann::json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const cli::MissingData& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return cli::kMissingData;
  } catch (const std::exception& ex) {
    std::cerr << "error: bad config: " << ex.what() << "\n";
    return cli::kInputError;
  }

  cli::FitDensityConfig fit;
  from_config(cfg, "family", fit.family);
  from_config(cfg, "spearman", fit.spearman);
  from_config(cfg, "sections", fit.sections);
  auto* fit_cmd = app.add_subcommand("fit-density",
                                     "approximate a copula joint density and correct it");
  fit_cmd->add_option("--family", fit.family, "clayton|frank|gumbel|plackett|gauss");
  fit_cmd->add_option("--spearman", fit.spearman, "target Spearman rank correlation");
  fit_cmd->add_option("--bound", fit.bound, "grid half width");
  fit_cmd->add_option("--sections", fit.sections, "grid sections per dimension");
  fit_cmd->add_option("--n-max", fit.n_max, "expansion truncation order");
  fit_cmd->add_option("--tol", fit.tol, "projection stopping tolerance");
  fit_cmd->add_option("--max-sweeps", fit.max_sweeps, "projection sweep cap");
  fit_cmd->add_option("--max-order", fit.max_order, "moment table order");
  fit_cmd->add_option("--out", fit.out_dir, "output directory");

  cli::CorrectConfig correct;
  auto* correct_cmd = app.add_subcommand("correct", "project a grid density onto the constraint set");
  correct_cmd->add_option("--in", correct.in_csv, "input density CSV")->required();
  correct_cmd->add_option("--meta", correct.in_meta, "input sidecar JSON")->required();
  correct_cmd->add_option("--out", correct.out_csv, "output density CSV")->required();
  correct_cmd->add_option("--out-meta", correct.out_meta, "output sidecar JSON")->required();
  correct_cmd->add_option("--report", correct.report, "projection report JSON");
  correct_cmd->add_option("--n-max", correct.n_max,
                          "preserve expansion coefficients up to this order");
  correct_cmd->add_option("--tol", correct.tol, "projection stopping tolerance");
  correct_cmd->add_option("--max-sweeps", correct.max_sweeps, "projection sweep cap");

  cli::PriceConfig price;
  from_config(cfg, "copula", price.copula);
  auto* price_cmd = app.add_subcommand("price", "price a cross-pair smile from straight pairs");
  price_cmd->add_option("--xz", price.xz_csv, "X-Z pillar CSV")->required();
  price_cmd->add_option("--yz", price.yz_csv, "Y-Z pillar CSV")->required();
  price_cmd->add_flag("--invert-yz", price.invert_yz, "quotes are Z-Y; invert the pair");
  price_cmd->add_option("--copula", price.copula, "family name or 'hermite'");
  price_cmd->add_option("--theta", price.theta, "classical copula parameter");
  price_cmd->add_option("--params", price.params_json, "hermite parameter JSON");
  price_cmd->add_option("--strike-lo", price.strike_lo, "smile strike range low");
  price_cmd->add_option("--strike-hi", price.strike_hi, "smile strike range high");
  price_cmd->add_option("--strike-count", price.strike_count, "smile strike count");
  price_cmd->add_option("--out", price.out_dir, "output directory");
  add_numerics(price_cmd, price.numerics);

  cli::CalibrateConfig calib;
  from_config(cfg, "family", calib.family);
  auto* calib_cmd = app.add_subcommand("calibrate", "fit copula parameters to a cross smile");
  calib_cmd->add_option("--xz", calib.xz_csv, "X-Z pillar CSV")->required();
  calib_cmd->add_option("--yz", calib.yz_csv, "Y-Z pillar CSV")->required();
  calib_cmd->add_option("--cross", calib.cross_csv, "cross pillar CSV")->required();
  calib_cmd->add_option("--family", calib.family, "family name or 'hermite'");
  calib_cmd->add_option("--out", calib.out_dir, "output directory");
  add_numerics(calib_cmd, calib.numerics);

  cli::BacktestConfig bt;
  from_config(cfg, "family", bt.family);
  from_config(cfg, "setting", bt.setting);
  auto* bt_cmd = app.add_subcommand("backtest", "month backtest under setting (c) or (d)");
  bt_cmd->add_option("--data", bt.data_csv, "pillar CSV with XZ/YZ/XY rows per date")->required();
  bt_cmd->add_option("--family", bt.family, "family name or 'hermite'");
  bt_cmd->add_option("--setting", bt.setting, "c (daily ATM recalibration) or d (frozen)");
  bt_cmd->add_option("--out", bt.out_dir, "output directory");
  add_numerics(bt_cmd, bt.numerics);

  cli::ParamSweepConfig sweep;
  auto* sweep_cmd = app.add_subcommand("param-sweep", "ATM vol against one shifted parameter");
  sweep_cmd->add_option("--xz", sweep.xz_csv, "X-Z pillar CSV")->required();
  sweep_cmd->add_option("--yz", sweep.yz_csv, "Y-Z pillar CSV")->required();
  sweep_cmd->add_option("--params", sweep.params_json, "hermite parameter JSON")->required();
  sweep_cmd->add_option("--param", sweep.param, "rho|m3|m4|m5|m6");
  sweep_cmd->add_option("--lo", sweep.lo, "sweep start");
  sweep_cmd->add_option("--hi", sweep.hi, "sweep end");
  sweep_cmd->add_option("--steps", sweep.steps, "sweep points");
  sweep_cmd->add_option("--out", sweep.out_csv, "output CSV");
  add_numerics(sweep_cmd, sweep.numerics);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }

  try {
    if (fit_cmd->parsed()) return cli::cmd_fit_density(fit);
    if (correct_cmd->parsed()) return cli::cmd_correct(correct);
    if (price_cmd->parsed()) return cli::cmd_price(price);
    if (calib_cmd->parsed()) return cli::cmd_calibrate(calib);
    if (bt_cmd->parsed()) return cli::cmd_backtest(bt);
    if (sweep_cmd->parsed()) return cli::cmd_param_sweep(sweep);
  } catch (const cli::MissingData& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return cli::kMissingData;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return cli::kInputError;
  } catch (const std::domain_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return cli::kInputError;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return cli::kNumericalError;
  }
  return cli::kOk;
}
