#include "hermicop/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "hermicop/parallel.hpp"

namespace hermicop {

int max_threads() {
  if (const char* env = std::getenv("HERMICOP_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = static_cast<std::size_t>(t); i < n;
           i += static_cast<std::size_t>(workers)) {
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

double brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                      double tol, int max_iter) {
  if (!(hi > lo)) throw std::invalid_argument("brent_minimize: invalid bracket");
  constexpr double kGold = 0.3819660112501051;
  double a = lo, b = hi;
  double x = a + kGold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    double xm = 0.5 * (a + b);
    double tol1 = tol * std::fabs(x) + 1e-14;
    double tol2 = 2.0 * tol1;
    if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) return x;
    bool golden = true;
    if (std::fabs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      double e_old = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
        golden = false;
      }
    }
    if (golden) {
      e = (x >= xm) ? a - x : b - x;
      d = kGold * e;
    }
    double u = (std::fabs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
    double fu = f(u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; w = x; x = u;
      fv = fw; fw = fx; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; w = u; fv = fw; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return x;
}

double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double tol, int max_iter) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw std::invalid_argument("brent_root: no sign change on bracket");
  }
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; d = b - a; e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 1e-16 * std::fabs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d; d = p / q;
      } else {
        d = xm; e = d;
      }
    } else {
      d = xm; e = d;
    }
    a = b; fa = fb;
    b += (std::fabs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  return b;
}

std::vector<double> central_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step) {
  std::vector<double> g(x.size());
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double h = rel_step * std::max(1.0, std::fabs(x[i]));
    probe[i] = x[i] + h;
    double fp = f(probe);
    probe[i] = x[i] - h;
    double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

QuasiNewtonResult quasi_newton_minimize(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, double tol, int max_iter, bool scale_from_curvature) {
  std::size_t n = x0.size();
  QuasiNewtonResult result;
  result.x = x0;
  result.value = f(x0);

  std::vector<double> x = x0;
  double fx = result.value;

  // gradient plus diagonal curvature from one central-difference stencil;
  // the curvature scales the initial inverse Hessian, which matters when the
  // parameters act on the objective at very different magnitudes
  std::vector<double> grad(n), curv(n);
  {
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < n; ++i) {
      double h = 1e-5 * std::max(1.0, std::fabs(x[i]));
      probe[i] = x[i] + h;
      double fp = f(probe);
      probe[i] = x[i] - h;
      double fm = f(probe);
      probe[i] = x[i];
      grad[i] = (fp - fm) / (2.0 * h);
      curv[i] = (fp - 2.0 * fx + fm) / (h * h);
    }
  }
  std::vector<double> h_inv(n * n, 0.0);
  double curv_floor = 0.0;
  if (scale_from_curvature) {
    for (std::size_t i = 0; i < n; ++i) curv_floor = std::max(curv_floor, curv[i]);
    curv_floor = curv_floor > 0.0 ? 1e-8 * curv_floor : 0.0;
  }
  auto initial_diag = [&](std::size_t i) {
    return scale_from_curvature && curv[i] > curv_floor && curv_floor > 0.0
               ? 1.0 / curv[i]
               : 1.0;
  };
  for (std::size_t i = 0; i < n; ++i) h_inv[i * n + i] = initial_diag(i);

  for (int iter = 1; iter <= max_iter; ++iter) {
    result.iterations = iter;
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::fabs(g));
    if (gmax < tol) {
      result.converged = true;
      break;
    }

    std::vector<double> dir(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) dir[i] -= h_inv[i * n + j] * grad[j];
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += dir[i] * grad[i];
    if (slope >= 0.0) {
      // reset a non-descent direction to preconditioned steepest descent
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) h_inv[i * n + j] = (i == j) ? initial_diag(i) : 0.0;
        dir[i] = -h_inv[i * n + i] * grad[i];
      }
      slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += dir[i] * grad[i];
      if (slope >= 0.0) {
        result.converged = true;  // zero gradient
        break;
      }
    }

    // backtracking with one quadratic interpolation refinement; exact for
    // quadratic objectives, Armijo-safe otherwise
    constexpr double kArmijo = 1e-4;
    auto trial = [&](double t) {
      std::vector<double> xt(n);
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + t * dir[i];
      return std::make_pair(xt, f(xt));
    };
    double step = 1.0;
    auto [xt, ft] = trial(step);
    {
      double denom = 2.0 * (ft - fx - slope * step);
      if (denom > 0.0) {
        double t_star = -slope * step * step / denom;
        if (t_star > 1e-12 && t_star < 1e3) {
          auto [xs, fs] = trial(t_star);
          if (fs < ft) {
            step = t_star;
            xt = std::move(xs);
            ft = fs;
          }
        }
      }
    }
    int backtracks = 0;
    while (ft > fx + kArmijo * step * slope && backtracks < 40) {
      step *= 0.5;
      std::tie(xt, ft) = trial(step);
      ++backtracks;
    }
    if (ft > fx + kArmijo * step * slope) {
      result.line_search_failed = true;
      break;
    }

    std::vector<double> grad_new = central_difference_gradient(f, xt);
    std::vector<double> s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xt[i] - x[i];
      y[i] = grad_new[i] - grad[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-14) {
      // BFGS inverse update
      std::vector<double> hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) hy[i] += h_inv[i * n + j] * y[j];
      }
      double yhy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
      double rho_bfgs = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h_inv[i * n + j] += (1.0 + yhy * rho_bfgs) * rho_bfgs * s[i] * s[j] -
                              rho_bfgs * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
    }

    double step_norm = 0.0, fdrop = fx - ft;
    for (std::size_t i = 0; i < n; ++i) step_norm = std::max(step_norm, std::fabs(s[i]));
    x = std::move(xt);
    fx = ft;
    grad = std::move(grad_new);
    if (fx < result.value) {
      result.value = fx;
      result.x = x;
    }
    if (step_norm < tol && fdrop < tol * std::max(1.0, std::fabs(fx))) {
      result.converged = true;
      break;
    }
  }
  if (fx < result.value) {
    result.value = fx;
    result.x = x;
  }
  return result;
}

std::string family_label(const FamilyChoice& family) {
  if (const auto* classical = std::get_if<CopulaFamily>(&family)) {
    return family_name(*classical);
  }
  return "hermite";
}

CopulaModel copula_from_result(const CalibrationResult& r, const PricingNumerics& num) {
  if (!r.hermite) return make_copula(r.family, r.theta);
  ScaledCoefficients sc;
  sc.n_max = r.n_max;
  sc.values = r.m_check;
  HermitePricingSpec spec;
  spec.model = unscale_coefficients(sc, r.n_max, r.rho);
  spec.sections = num.sections;
  spec.halfwidth = num.halfwidth;
  spec.dykstra = num.dykstra;
  return spec;
}

double pillar_objective(const SmilePillars& target, const SmileCurve& xz,
                        const SmileCurve& yz, const CopulaModel& copula,
                        const PricingNumerics& num, std::array<double, 5>* residuals) {
  CrossSetup setup = make_cross_setup(xz, yz, copula);
  setup.classical_nodes = num.classical_nodes;
  SmilePillars model = cross_smile_pillars(setup);
  std::array<double, 5> res{};
  for (int p = 0; p < 5; ++p) res[static_cast<std::size_t>(p)] = model.vol(p) - target.vol(p);
  if (residuals) *residuals = res;
  double acc = 0.0;
  for (double r : res) acc += r * r;
  return acc / 5.0;
}

namespace {

struct ThetaBracket {
  double lo, hi;
};

ThetaBracket theta_bracket(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Clayton: return {1e-4, 30.0};
    case CopulaFamily::Frank: return {-50.0, 50.0};
    case CopulaFamily::Gumbel: return {1.0, 30.0};
    case CopulaFamily::Plackett: return {1e-4, 100.0};
    case CopulaFamily::Gauss: return {-0.999, 0.999};
  }
  throw std::invalid_argument("theta_bracket: unknown family");
}

constexpr double kRhoBound = 0.999;

double rho_from_raw(double z) { return kRhoBound * std::tanh(z); }
double raw_from_rho(double rho) {
  double r = std::clamp(rho / kRhoBound, -1.0 + 1e-12, 1.0 - 1e-12);
  return std::atanh(r);
}

HermitePricingSpec hermite_spec(double rho, const std::vector<double>& m_check,
                                int n_max, const PricingNumerics& num) {
  ScaledCoefficients sc;
  sc.n_max = n_max;
  sc.values = m_check;
  HermitePricingSpec spec;
  spec.model = unscale_coefficients(sc, n_max, rho);
  spec.sections = num.sections;
  spec.halfwidth = num.halfwidth;
  spec.dykstra = num.dykstra;
  return spec;
}

}  // namespace

CalibrationResult calibrate_smile(const SmilePillars& target_cross,
                                  const SmileCurve& xz, const SmileCurve& yz,
                                  const FamilyChoice& family,
                                  const PricingNumerics& num) {
  CalibrationResult result;

  if (const auto* classical = std::get_if<CopulaFamily>(&family)) {
    ThetaBracket br = theta_bracket(*classical);
    auto objective = [&](double theta) {
      if (*classical == CopulaFamily::Frank && theta == 0.0) theta = 1e-8;
      return pillar_objective(target_cross, xz, yz, make_copula(*classical, theta), num);
    };
    double theta = brent_minimize(objective, br.lo, br.hi, 1e-8);
    result.hermite = false;
    result.family = *classical;
    result.theta = (*classical == CopulaFamily::Frank && theta == 0.0) ? 1e-8 : theta;
    result.objective = pillar_objective(target_cross, xz, yz,
                                        make_copula(*classical, result.theta), num,
                                        &result.residuals);
    result.converged = true;
    result.iterations = 0;
    return result;
  }

  const auto& hf = std::get<HermiteFamily>(family);
  int n_params = hf.n_max - 2;  // m_check_3 .. m_check_{n_max}

  // stage 1: Gauss sub-model (all m_check zero) by Brent over rho, priced
  // through the same corrected-Hermite machinery the full model uses
  std::vector<double> zeros(static_cast<std::size_t>(n_params), 0.0);
  auto sub_objective = [&](double rho) {
    return pillar_objective(target_cross, xz, yz, hermite_spec(rho, zeros, hf.n_max, num),
                            num);
  };
  double rho0 = brent_minimize(sub_objective, -0.95, 0.95, 1e-6);

  // stage 2: BFGS over (raw rho, m_check...) from the sub-model optimum
  auto objective = [&](const std::vector<double>& z) {
    double rho = rho_from_raw(z[0]);
    std::vector<double> mc(z.begin() + 1, z.end());
    return pillar_objective(target_cross, xz, yz, hermite_spec(rho, mc, hf.n_max, num),
                            num);
  };
  std::vector<double> z0(static_cast<std::size_t>(n_params) + 1, 0.0);
  z0[0] = raw_from_rho(rho0);
  QuasiNewtonResult qn = quasi_newton_minimize(objective, z0, 1e-10, 150, true);
  // a restart from the found point re-scales the curvature estimate and digs
  // further down ill-conditioned valleys; keep whichever point is better
  for (int round = 0; round < 2 && qn.value > 1e-10; ++round) {
    QuasiNewtonResult again = quasi_newton_minimize(objective, qn.x, 1e-10, 150, true);
    if (again.value >= qn.value - 1e-14) {
      qn.iterations += again.iterations;
      break;
    }
    again.iterations += qn.iterations;
    qn = std::move(again);
  }

  result.hermite = true;
  result.n_max = hf.n_max;
  result.rho = rho_from_raw(qn.x[0]);
  result.m_check.assign(qn.x.begin() + 1, qn.x.end());
  result.iterations = qn.iterations;
  result.converged = qn.converged || !qn.line_search_failed;
  result.objective = pillar_objective(
      target_cross, xz, yz, hermite_spec(result.rho, result.m_check, hf.n_max, num), num,
      &result.residuals);
  return result;
}

CalibrationResult recalibrate_rho_to_atm(const CalibrationResult& prev,
                                         const SmileCurve& xz, const SmileCurve& yz,
                                         double atm_target,
                                         const PricingNumerics& num) {
  auto atm_vol = [&](const CopulaModel& copula) {
    CrossSetup setup = make_cross_setup(xz, yz, copula);
    setup.classical_nodes = num.classical_nodes;
    CrossPricer pricer(setup);
    double f_cross = pricer.cross_forward();
    double tenor = xz.tenor();
    double sigma = pricer.implied_vol(f_cross);
    for (int iter = 0; iter < 20; ++iter) {
      double strike = f_cross * std::exp(0.5 * sigma * sigma * tenor);
      double next = pricer.implied_vol(strike);
      if (std::fabs(next - sigma) < 1e-10) return next;
      sigma = next;
    }
    return sigma;
  };

  CalibrationResult out = prev;
  if (prev.hermite) {
    auto err = [&](double rho) {
      return atm_vol(hermite_spec(rho, prev.m_check, prev.n_max, num)) - atm_target;
    };
    double lo = -kRhoBound, hi = kRhoBound;
    double e_lo = err(lo), e_hi = err(hi);
    if (e_lo == 0.0) {
      out.rho = lo;
    } else if (e_hi == 0.0) {
      out.rho = hi;
    } else if ((e_lo > 0.0) == (e_hi > 0.0)) {
      throw std::domain_error("recalibrate_rho_to_atm: target ATM outside attainable range");
    } else {
      out.rho = brent_root(err, lo, hi, 1e-10);
    }
  } else {
    ThetaBracket br = theta_bracket(prev.family);
    auto err = [&](double theta) {
      if (prev.family == CopulaFamily::Frank && theta == 0.0) theta = 1e-8;
      return atm_vol(make_copula(prev.family, theta)) - atm_target;
    };
    double e_lo = err(br.lo), e_hi = err(br.hi);
    if (e_lo == 0.0) {
      out.theta = br.lo;
    } else if (e_hi == 0.0) {
      out.theta = br.hi;
    } else if ((e_lo > 0.0) == (e_hi > 0.0)) {
      throw std::domain_error("recalibrate_rho_to_atm: target ATM outside attainable range");
    } else {
      out.theta = brent_root(err, br.lo, br.hi, 1e-10);
    }
  }
  out.converged = true;
  return out;
}

BacktestReport backtest(const BacktestDay& month_end, const std::vector<BacktestDay>& days,
                        BacktestSetting setting, const FamilyChoice& family,
                        const PricingNumerics& num) {
  if (!month_end.cross_smile.has_value()) {
    throw std::invalid_argument("backtest: month-end day must carry the full cross smile");
  }
  SmileCurve me_xz = build_curve(month_end.xz, num.curve_grid);
  SmileCurve me_yz = build_curve(month_end.yz, num.curve_grid);

  BacktestReport report;
  report.setting = setting;
  report.family = family_label(family);
  report.tenor = month_end.xz.tenor;
  report.month_end_fit =
      calibrate_smile(*month_end.cross_smile, me_xz, me_yz, family, num);

  report.days.resize(days.size());
  parallel_for(days.size(), [&](std::size_t d) {
    const BacktestDay& day = days[d];
    BacktestDayResult& out = report.days[d];
    out.date = day.date;
    try {
      if (!day.cross_smile.has_value()) {
        out.message = "missing cross smile";
        return;
      }
      SmileCurve xz = build_curve(day.xz, num.curve_grid);
      SmileCurve yz = build_curve(day.yz, num.curve_grid);

      CalibrationResult params = report.month_end_fit;
      if (setting == BacktestSetting::DailyAtmRecalibration) {
        params = recalibrate_rho_to_atm(params, xz, yz, day.cross_atm, num);
      }
      CrossSetup setup = make_cross_setup(xz, yz, copula_from_result(params, num));
      setup.classical_nodes = num.classical_nodes;
      SmilePillars model = cross_smile_pillars(setup);

      double acc = 0.0;
      for (int p = 0; p < 5; ++p) {
        double e = model.vol(p) - day.cross_smile->vol(p);
        out.errors[static_cast<std::size_t>(p)] = e;
        acc += e * e;
      }
      out.rmse = std::sqrt(acc / 5.0);
      out.ok = true;
    } catch (const std::exception& ex) {
      out.ok = false;
      out.message = ex.what();
    }
  });
  return report;
}

}  // namespace hermicop
