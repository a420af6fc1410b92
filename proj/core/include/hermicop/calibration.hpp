#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hermicop/crossfx.hpp"

namespace hermicop {

/// Brent's minimizer (parabolic interpolation with golden-section fallback)
/// on a bracket. Returns the abscissa of the located minimum.
double brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-8, int max_iter = 200);

/// Brent's zeroin root finder on a sign-changing bracket.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-10, int max_iter = 200);

struct QuasiNewtonResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

/// BFGS with central-difference gradients (relative step 1e-5) and a
/// backtracking line search with one quadratic-interpolation refinement.
/// Monotone in f; returns the best point found. With scale_from_curvature
/// the initial inverse Hessian is the inverse diagonal curvature at x0,
/// which pays off on near-quadratic objectives whose parameters act at
/// very different magnitudes (the calibration objective does).
QuasiNewtonResult quasi_newton_minimize(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, double tol = 1e-10, int max_iter = 100,
    bool scale_from_curvature = false);

/// The gradient quasi_newton_minimize uses, exposed for cross-checks.
std::vector<double> central_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step = 1e-5);

/// Corrected-Hermite copula family with free parameters
/// (rho, m_check_3 .. m_check_{n_max}); all other coefficients zero.
struct HermiteFamily {
  int n_max = 6;
};

using FamilyChoice = std::variant<CopulaFamily, HermiteFamily>;

std::string family_label(const FamilyChoice& family);

/// Shared numerical settings for pricing inside calibration loops.
struct PricingNumerics {
  int sections = 200;
  double halfwidth = 6.0;
  DykstraOptions dykstra{};
  int classical_nodes = 400;
  int curve_grid = 4000;
};

struct CalibrationResult {
  bool hermite = false;
  CopulaFamily family = CopulaFamily::Gauss;  // classical fits
  double theta = 0.0;
  double rho = 0.0;                     // Hermite correlation
  std::vector<double> m_check;          // m_check_3.., Hermite fits
  int n_max = 6;
  double objective = 0.0;               // mean of squared pillar vol errors
  std::array<double, 5> residuals{};    // model - target, pillar order p10..c10
  int iterations = 0;
  bool converged = false;
};

/// The copula a calibration result describes, ready for pricing.
CopulaModel copula_from_result(const CalibrationResult& r, const PricingNumerics& num);

/// Mean squared pillar vol error of a copula against target cross pillars.
double pillar_objective(const SmilePillars& target, const SmileCurve& xz,
                        const SmileCurve& yz, const CopulaModel& copula,
                        const PricingNumerics& num,
                        std::array<double, 5>* residuals = nullptr);

/// Fit copula parameters to a target cross smile. Classical families use
/// Brent over theta on the family bracket; the Hermite family first fits its
/// Gauss sub-model (m_check = 0) by Brent over rho, then runs BFGS over
/// (rho, m_check_3..6) from that point, so the fitted objective can only
/// improve on the sub-model's.
CalibrationResult calibrate_smile(const SmilePillars& target_cross,
                                  const SmileCurve& xz, const SmileCurve& yz,
                                  const FamilyChoice& family,
                                  const PricingNumerics& num = {});

/// Re-solve the dependence parameter so the model ATM vol matches
/// atm_target, holding every other parameter fixed (rho for Hermite fits,
/// theta for classical ones). Throws std::domain_error when the target is
/// outside the attainable range over the parameter interval.
CalibrationResult recalibrate_rho_to_atm(const CalibrationResult& prev,
                                         const SmileCurve& xz, const SmileCurve& yz,
                                         double atm_target,
                                         const PricingNumerics& num = {});

enum class BacktestSetting { DailyAtmRecalibration, FrozenParameters };  // (c) / (d)

struct BacktestDay {
  std::string date;
  SmilePillars xz;
  SmilePillars yz;
  double cross_atm = 0.0;
  std::optional<SmilePillars> cross_smile;  // needed for error reporting
};

struct BacktestDayResult {
  std::string date;
  bool ok = false;
  std::string message;
  double rmse = 0.0;
  std::array<double, 5> errors{};  // pillar order p10..c10
};

struct BacktestReport {
  BacktestSetting setting = BacktestSetting::DailyAtmRecalibration;
  std::string family;
  double tenor = 0.0;
  CalibrationResult month_end_fit;
  std::vector<BacktestDayResult> days;
};

/// Month backtest: calibrate to the month-end cross smile, then per day
/// either recalibrate the dependence parameter to the day's cross ATM
/// (setting c) or reprice with frozen parameters (setting d), reporting the
/// five-pillar RMSE against the day's observed cross smile. Days with
/// missing or unusable data are skipped with a message.
BacktestReport backtest(const BacktestDay& month_end, const std::vector<BacktestDay>& days,
                        BacktestSetting setting, const FamilyChoice& family,
                        const PricingNumerics& num = {});

}  // namespace hermicop
