#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "hermicop/copulas.hpp"
#include "hermicop/correction.hpp"

namespace fs = std::filesystem;

namespace hermicop::cli {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& s, const std::string& what, std::size_t row) {
  if (s.empty()) return 0.0;
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad " + what + " at row " + std::to_string(row) +
                                ": '" + s + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  return out;
}

void require_file(const std::string& path) {
  if (path.empty() || !fs::exists(path)) {
    throw MissingData("required input file not found: " + path);
  }
}

FamilyChoice family_choice_from_name(const std::string& name) {
  if (name == "hermite") return HermiteFamily{6};
  return family_from_name(name);
}

// hermite parameter JSON: {"rho":..,"n_max":..,"m_check":[m3,..]}
struct HermiteParams {
  double rho = 0.0;
  int n_max = 6;
  std::vector<double> m_check;
};

HermiteParams read_hermite_params(const std::string& path) {
  require_file(path);
  std::ifstream in(path);
  nlohmann::json j = nlohmann::json::parse(in);
  HermiteParams p;
  p.rho = j.at("rho").get<double>();
  p.n_max = j.value("n_max", 6);
  p.m_check = j.at("m_check").get<std::vector<double>>();
  if (static_cast<int>(p.m_check.size()) != p.n_max - 2) {
    throw std::invalid_argument("hermite params: m_check must list m_3..m_{n_max}");
  }
  return p;
}

CopulaModel copula_from_flags(const std::string& name, double theta,
                              const std::string& params_json,
                              const PricingNumerics& num) {
  if (name == "hermite") {
    HermiteParams p = read_hermite_params(params_json);
    ScaledCoefficients sc;
    sc.n_max = p.n_max;
    sc.values = p.m_check;
    HermitePricingSpec spec;
    spec.model = unscale_coefficients(sc, p.n_max, p.rho);
    spec.sections = num.sections;
    spec.halfwidth = num.halfwidth;
    spec.dykstra = num.dykstra;
    return spec;
  }
  return make_copula(family_from_name(name), theta);
}

PillarRow select_row(const std::vector<PillarRow>& rows, const std::string& path) {
  if (rows.empty()) throw MissingData("no pillar rows in " + path);
  return rows.front();
}

void write_moment_table(const std::string& path, const GridDensity& density,
                        int max_order) {
  const CartesianGrid& g = density.grid;
  std::vector<double> abs = density.absolute_values();
  auto n1 = static_cast<std::size_t>(g.sections[0]);
  auto n2 = static_cast<std::size_t>(g.sections[1]);

  std::ofstream out = open_out(path);
  out << "moment";
  for (int i = 0; i <= max_order; ++i) out << ",x1^" << i;
  out << "\n";
  std::vector<double> terms(n1 * n2);
  for (int j = 0; j <= max_order; ++j) {
    out << "x2^" << j;
    for (int i = 0; i <= max_order; ++i) {
      if (i + j > max_order) {
        out << ",";
        continue;
      }
      for (std::size_t a = 0; a < n1; ++a) {
        double x1 = g.coord(0, static_cast<int>(a));
        double p1 = std::pow(x1, i);
        for (std::size_t b = 0; b < n2; ++b) {
          double x2 = g.coord(1, static_cast<int>(b));
          terms[a * n2 + b] = p1 * std::pow(x2, j) * abs[a * n2 + b];
        }
      }
      out << "," << g.cell_weight * pairwise_sum(terms);
    }
    out << "\n";
  }
}

}  // namespace

std::vector<PillarRow> read_pillar_csv(const std::string& path) {
  require_file(path);
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty pillar CSV: " + path);
  std::vector<PillarRow> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 11) {
      throw std::invalid_argument("pillar CSV row " + std::to_string(row_no) +
                                  " has " + std::to_string(f.size()) +
                                  " fields, expected 11");
    }
    PillarRow r;
    r.date = f[0];
    r.pair = f[1];
    r.pillars.tenor = parse_field(f[2], "tenor", row_no);
    r.pillars.forward = parse_field(f[3], "forward", row_no);
    r.pillars.df_dom = parse_field(f[4], "D_dom", row_no);
    r.pillars.df_for = parse_field(f[5], "D_for", row_no);
    r.pillars.atm = parse_field(f[6], "atm", row_no);
    r.pillars.c25 = parse_field(f[7], "c25", row_no);
    r.pillars.p25 = parse_field(f[8], "p25", row_no);
    r.pillars.c10 = parse_field(f[9], "c10", row_no);
    r.pillars.p10 = parse_field(f[10], "p10", row_no);
    r.full_smile = r.pillars.atm > 0.0 && r.pillars.c25 > 0.0 && r.pillars.p25 > 0.0 &&
                   r.pillars.c10 > 0.0 && r.pillars.p10 > 0.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_pillar_csv(const std::string& path, const std::vector<PillarRow>& rows) {
  std::ofstream out = open_out(path);
  out << "date,pair,tenor,F,D_dom,D_for,atm,c25,p25,c10,p10\n";
  for (const auto& r : rows) {
    const SmilePillars& p = r.pillars;
    out << r.date << "," << r.pair << "," << p.tenor << "," << p.forward << ","
        << p.df_dom << "," << p.df_for << "," << p.atm << "," << p.c25 << "," << p.p25
        << "," << p.c10 << "," << p.p10 << "\n";
  }
}

int cmd_fit_density(const FitDensityConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  CopulaFamily family = family_from_name(cfg.family);
  double theta = spearman_to_theta(family, cfg.spearman);
  ClassicalCopula copula = make_copula(family, theta);

  CartesianGrid grid = build_grid({{-cfg.bound, cfg.bound}, {-cfg.bound, cfg.bound}},
                                  {cfg.sections, cfg.sections});
  GridDensity target;
  target.grid = grid;
  target.kind = DensityKind::Absolute;
  target.rho = 0.0;
  target.weight_density = gaussian_weight_independent(grid);
  target.values.resize(grid.node_count());
  auto n1 = static_cast<std::size_t>(grid.sections[0]);
  auto n2 = static_cast<std::size_t>(grid.sections[1]);
  for (std::size_t a = 0; a < n1; ++a) {
    double x1 = grid.coord(0, static_cast<int>(a));
    for (std::size_t b = 0; b < n2; ++b) {
      target.values[a * n2 + b] =
          joint_density_normal_marginals(copula, x1, grid.coord(1, static_cast<int>(b)));
    }
  }

  auto out_path = [&](const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
  };
  write_grid_density(target, out_path("target.csv"), out_path("target.json"));
  write_moment_table(out_path("moments_target.csv"), target, cfg.max_order);

  DykstraOptions opts{cfg.tol, cfg.max_sweeps};

  // case (a): identity weight; case (b): weight carries the grid correlation
  struct Case {
    const char* tag;
    double rho;
  };
  double grid_corr;
  {
    std::vector<double> terms(n1 * n2);
    for (std::size_t a = 0; a < n1; ++a) {
      double x1 = grid.coord(0, static_cast<int>(a));
      for (std::size_t b = 0; b < n2; ++b) {
        terms[a * n2 + b] = x1 * grid.coord(1, static_cast<int>(b)) * target.values[a * n2 + b];
      }
    }
    grid_corr = grid.cell_weight * pairwise_sum(terms);
  }
  const Case cases[2] = {{"a", 0.0}, {"b", grid_corr}};

  for (const Case& c : cases) {
    ExpansionModel model = estimate_coefficients(target, c.rho, cfg.n_max);
    GridDensity raw = evaluate_expansion(model, grid);
    GridDensity raw_abs = raw;
    raw_abs.values = raw.absolute_values();
    raw_abs.kind = DensityKind::Absolute;
    std::string tag(c.tag);
    write_grid_density(raw_abs, out_path("case_" + tag + "_uncorrected.csv"),
                       out_path("case_" + tag + "_uncorrected.json"));

    DykstraReport report;
    GridDensity corrected = correct_expansion(model, grid, opts, &report);
    GridDensity corr_abs = corrected;
    corr_abs.values = corrected.absolute_values();
    corr_abs.kind = DensityKind::Absolute;
    write_grid_density(corr_abs, out_path("case_" + tag + "_corrected.csv"),
                       out_path("case_" + tag + "_corrected.json"));
    write_moment_table(out_path("moments_case_" + tag + ".csv"), corr_abs, cfg.max_order);
    std::ofstream rep = open_out(out_path("dykstra_case_" + tag + ".json"));
    rep << report.to_json() << "\n";
    if (!report.converged) {
      std::cerr << "fit-density: case " << tag << " projection did not converge\n";
      return kNumericalError;
    }
  }
  std::cout << "fit-density: family=" << cfg.family << " theta=" << theta
            << " grid_correlation=" << grid_corr << "\n";
  return kOk;
}

int cmd_correct(const CorrectConfig& cfg) {
  require_file(cfg.in_csv);
  require_file(cfg.in_meta);
  GridDensity input = read_grid_density(cfg.in_csv, cfg.in_meta);
  std::vector<double> phi = input.ratio_values();

  std::vector<ConvexConstraint> constraints;
  if (cfg.n_max >= 1) {
    if (input.grid.dim() != 2) {
      throw std::invalid_argument("correct: --n-max needs a 2D density");
    }
    GridDensity est_input = input;
    est_input.values = input.absolute_values();
    est_input.kind = DensityKind::Absolute;
    ExpansionModel model =
        estimate_coefficients(est_input, input.rho, std::max(cfg.n_max, 3));
    model.n_max = std::max(cfg.n_max, 3);
    constraints = expansion_constraints(model, input.grid, false);
  } else {
    constraints.emplace_back(Normalization{1.0});
    constraints.emplace_back(NonNegativity{});
  }

  auto [corrected, report] =
      dykstra(phi, constraints, input.weight_density, input.grid,
              DykstraOptions{cfg.tol, cfg.max_sweeps});

  GridDensity out = input;
  out.values = std::move(corrected);
  out.kind = DensityKind::Ratio;
  if (input.kind == DensityKind::Absolute) {
    out.values = out.absolute_values();
    out.kind = DensityKind::Absolute;
  }
  write_grid_density(out, cfg.out_csv, cfg.out_meta);
  if (!cfg.report.empty()) {
    std::ofstream rep = open_out(cfg.report);
    rep << report.to_json() << "\n";
  }
  if (!report.converged) {
    std::cerr << "correct: projection did not converge (sweeps=" << report.sweeps << ")\n";
    return kNumericalError;
  }
  return kOk;
}

namespace {

CrossSetup setup_from_configs(const std::string& xz_csv, const std::string& yz_csv,
                              bool invert_yz, const CopulaModel& copula,
                              const PricingNumerics& num) {
  PillarRow xz = select_row(read_pillar_csv(xz_csv), xz_csv);
  PillarRow yz = select_row(read_pillar_csv(yz_csv), yz_csv);
  SmilePillars yz_pillars = invert_yz ? invert_pair(yz.pillars) : yz.pillars;
  CrossSetup setup = make_cross_setup(build_curve(xz.pillars, num.curve_grid),
                                      build_curve(yz_pillars, num.curve_grid), copula);
  setup.classical_nodes = num.classical_nodes;
  return setup;
}

}  // namespace

int cmd_price(const PriceConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  CopulaModel copula =
      copula_from_flags(cfg.copula, cfg.theta, cfg.params_json, cfg.numerics);
  CrossSetup setup =
      setup_from_configs(cfg.xz_csv, cfg.yz_csv, cfg.invert_yz, copula, cfg.numerics);
  CrossPricer pricer(setup);

  SmilePillars pillars = cross_smile_pillars(setup);
  auto pillars_path = (fs::path(cfg.out_dir) / "cross_pillars.csv").string();
  {
    std::ofstream out = open_out(pillars_path);
    out << "pillar,strike,vol\n";
    const char* names[5] = {"10dp", "25dp", "atm", "25dc", "10dc"};
    Pillar order[5] = {Pillar::Put10, Pillar::Put25, Pillar::Atm, Pillar::Call25,
                       Pillar::Call10};
    for (int i = 0; i < 5; ++i) {
      out << names[i] << "," << delta_to_strike(pillars, order[i]) << ","
          << pillars.vol(i) << "\n";
    }
  }

  double lo = cfg.strike_lo, hi = cfg.strike_hi;
  double f_cross = pricer.cross_forward();
  if (!(lo > 0.0) || !(hi > lo)) {
    lo = 0.7 * f_cross;
    hi = 1.4 * f_cross;
  }
  int count = std::max(cfg.strike_count, 2);
  auto smile_path = (fs::path(cfg.out_dir) / "cross_smile.csv").string();
  {
    std::ofstream out = open_out(smile_path);
    out << "strike,call_price,implied_vol\n";
    for (int i = 0; i < count; ++i) {
      double k = lo + (hi - lo) * i / (count - 1);
      out << k << "," << pricer.call(k) << "," << pricer.implied_vol(k) << "\n";
    }
  }
  std::ofstream meta = open_out((fs::path(cfg.out_dir) / "price_summary.json").string());
  nlohmann::json j;
  j["cross_forward"] = f_cross;
  j["forward_consistency_error"] = forward_consistency(setup);
  j["copula"] = cfg.copula;
  meta << j.dump(2) << "\n";
  return kOk;
}

int cmd_calibrate(const CalibrateConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  PillarRow xz = select_row(read_pillar_csv(cfg.xz_csv), cfg.xz_csv);
  PillarRow yz = select_row(read_pillar_csv(cfg.yz_csv), cfg.yz_csv);
  auto cross_rows = read_pillar_csv(cfg.cross_csv);
  auto it = std::find_if(cross_rows.begin(), cross_rows.end(),
                         [](const PillarRow& r) { return r.full_smile; });
  if (it == cross_rows.end()) {
    throw MissingData("calibrate: no full cross smile row in " + cfg.cross_csv);
  }

  SmileCurve xz_curve = build_curve(xz.pillars, cfg.numerics.curve_grid);
  SmileCurve yz_curve = build_curve(yz.pillars, cfg.numerics.curve_grid);
  CalibrationResult fit = calibrate_smile(it->pillars, xz_curve, yz_curve,
                                          family_choice_from_name(cfg.family),
                                          cfg.numerics);

  nlohmann::json j;
  j["date"] = it->date;
  j["tenor"] = it->pillars.tenor;
  j["family"] = cfg.family;
  j["objective"] = fit.objective;
  j["converged"] = fit.converged;
  if (fit.hermite) {
    j["rho"] = fit.rho;
    j["n_max"] = fit.n_max;
    j["m_check"] = fit.m_check;
  } else {
    j["theta"] = fit.theta;
  }
  std::ofstream params = open_out((fs::path(cfg.out_dir) / "fitted_params.json").string());
  params << j.dump(2) << "\n";

  std::ofstream fitted = open_out((fs::path(cfg.out_dir) / "fitted_smile.csv").string());
  fitted << "pillar,target_vol,model_vol,residual\n";
  const char* names[5] = {"10dp", "25dp", "atm", "25dc", "10dc"};
  for (int p = 0; p < 5; ++p) {
    double target = it->pillars.vol(p);
    double res = fit.residuals[static_cast<std::size_t>(p)];
    fitted << names[p] << "," << target << "," << (target + res) << "," << res << "\n";
  }
  if (!fit.converged) {
    std::cerr << "calibrate: optimizer flagged non-convergence\n";
    return kNumericalError;
  }
  return kOk;
}

int cmd_backtest(const BacktestConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  auto rows = read_pillar_csv(cfg.data_csv);

  // group rows by date; pairs XZ, YZ, XY
  std::vector<std::string> dates;
  for (const auto& r : rows) {
    if (std::find(dates.begin(), dates.end(), r.date) == dates.end()) {
      dates.push_back(r.date);
    }
  }
  std::sort(dates.begin(), dates.end());

  auto day_for = [&](const std::string& date) {
    BacktestDay day;
    day.date = date;
    bool have_xz = false, have_yz = false;
    for (const auto& r : rows) {
      if (r.date != date) continue;
      if (r.pair == "XZ") {
        day.xz = r.pillars;
        have_xz = true;
      } else if (r.pair == "YZ") {
        day.yz = r.pillars;
        have_yz = true;
      } else if (r.pair == "XY") {
        day.cross_atm = r.pillars.atm;
        if (r.full_smile) day.cross_smile = r.pillars;
      }
    }
    if (!have_xz || !have_yz) {
      throw MissingData("backtest: missing straight pillars on " + date);
    }
    return day;
  };

  BacktestDay month_end = day_for(dates.front());
  if (!month_end.cross_smile.has_value()) {
    throw MissingData("backtest: first date must carry the full month-end cross smile");
  }
  std::vector<BacktestDay> days;
  for (std::size_t i = 1; i < dates.size(); ++i) days.push_back(day_for(dates[i]));

  BacktestSetting setting = cfg.setting == "d" ? BacktestSetting::FrozenParameters
                                               : BacktestSetting::DailyAtmRecalibration;
  BacktestReport report = backtest(month_end, days, setting,
                                   family_choice_from_name(cfg.family), cfg.numerics);

  std::ofstream out = open_out((fs::path(cfg.out_dir) / "backtest_report.csv").string());
  out << "date,setting,family,tenor,rmse,atm_err,c25_err,p25_err,c10_err,p10_err\n";
  for (const auto& d : report.days) {
    if (!d.ok) {
      std::cerr << "backtest: skipped " << d.date << ": " << d.message << "\n";
      continue;
    }
    out << d.date << "," << cfg.setting << "," << report.family << "," << report.tenor
        << "," << d.rmse << "," << d.errors[2] << "," << d.errors[3] << ","
        << d.errors[1] << "," << d.errors[4] << "," << d.errors[0] << "\n";
  }

  nlohmann::json j;
  j["family"] = report.family;
  j["setting"] = cfg.setting;
  j["objective"] = report.month_end_fit.objective;
  if (report.month_end_fit.hermite) {
    j["rho"] = report.month_end_fit.rho;
    j["m_check"] = report.month_end_fit.m_check;
  } else {
    j["theta"] = report.month_end_fit.theta;
  }
  std::ofstream meta = open_out((fs::path(cfg.out_dir) / "month_end_fit.json").string());
  meta << j.dump(2) << "\n";
  return kOk;
}

int cmd_param_sweep(const ParamSweepConfig& cfg) {
  HermiteParams base = read_hermite_params(cfg.params_json);
  PillarRow xz = select_row(read_pillar_csv(cfg.xz_csv), cfg.xz_csv);
  PillarRow yz = select_row(read_pillar_csv(cfg.yz_csv), cfg.yz_csv);
  SmileCurve xz_curve = build_curve(xz.pillars, cfg.numerics.curve_grid);
  SmileCurve yz_curve = build_curve(yz.pillars, cfg.numerics.curve_grid);

  int index = -1;
  if (cfg.param == "rho") {
    index = 0;
  } else if (cfg.param.size() == 2 && cfg.param[0] == 'm') {
    index = cfg.param[1] - '2';  // m3 -> 1, m4 -> 2, ...
    if (index < 1 || index > base.n_max - 2) {
      throw std::invalid_argument("param-sweep: parameter out of range: " + cfg.param);
    }
  } else {
    throw std::invalid_argument("param-sweep: unknown parameter " + cfg.param);
  }

  auto atm_for = [&](double value) {
    HermiteParams p = base;
    if (index == 0) {
      p.rho = value;
    } else {
      p.m_check[static_cast<std::size_t>(index - 1)] = value;
    }
    ScaledCoefficients sc;
    sc.n_max = p.n_max;
    sc.values = p.m_check;
    HermitePricingSpec spec;
    spec.model = unscale_coefficients(sc, p.n_max, p.rho);
    spec.sections = cfg.numerics.sections;
    spec.halfwidth = cfg.numerics.halfwidth;
    spec.dykstra = cfg.numerics.dykstra;
    CrossSetup setup = make_cross_setup(xz_curve, yz_curve, spec);
    setup.classical_nodes = cfg.numerics.classical_nodes;
    CrossPricer pricer(setup);
    double f_cross = pricer.cross_forward();
    double sigma = pricer.implied_vol(f_cross);
    for (int iter = 0; iter < 20; ++iter) {
      double strike = f_cross * std::exp(0.5 * sigma * sigma * xz_curve.tenor());
      double next = pricer.implied_vol(strike);
      if (std::fabs(next - sigma) < 1e-10) return next;
      sigma = next;
    }
    return sigma;
  };

  std::ofstream out = open_out(cfg.out_csv);
  out << "param,value,atm_vol\n";
  if (cfg.steps <= 1 || cfg.lo == cfg.hi) {
    double v = index == 0 ? base.rho : base.m_check[static_cast<std::size_t>(index - 1)];
    out << cfg.param << "," << v << "," << atm_for(v) << "\n";
    return kOk;
  }
  for (int i = 0; i < cfg.steps; ++i) {
    double v = cfg.lo + (cfg.hi - cfg.lo) * i / (cfg.steps - 1);
    out << cfg.param << "," << v << "," << atm_for(v) << "\n";
  }
  return kOk;
}

}  // namespace hermicop::cli
