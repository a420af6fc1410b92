#include "hermicop/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hermicop/normal.hpp"
#include "hermicop/quadrature.hpp"

namespace hermicop {

namespace {

// Plackett collapses to independence inside this band around theta = 1.
constexpr double kPlackettIndepBand = 1e-6;

void check_theta(CopulaFamily family, double theta) {
  bool ok = true;
  switch (family) {
    case CopulaFamily::Clayton: ok = theta > 0.0; break;
    case CopulaFamily::Frank: ok = theta != 0.0; break;
    case CopulaFamily::Gumbel: ok = theta >= 1.0; break;
    case CopulaFamily::Plackett: ok = theta > 0.0; break;
    case CopulaFamily::Gauss: ok = theta > -1.0 && theta < 1.0; break;
  }
  if (!ok) {
    throw std::domain_error("copula parameter theta=" + std::to_string(theta) +
                            " outside the " + family_name(family) + " domain");
  }
}

}  // namespace

std::string family_name(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Clayton: return "clayton";
    case CopulaFamily::Frank: return "frank";
    case CopulaFamily::Gumbel: return "gumbel";
    case CopulaFamily::Plackett: return "plackett";
    case CopulaFamily::Gauss: return "gauss";
  }
  return "?";
}

CopulaFamily family_from_name(const std::string& name) {
  if (name == "clayton") return CopulaFamily::Clayton;
  if (name == "frank") return CopulaFamily::Frank;
  if (name == "gumbel") return CopulaFamily::Gumbel;
  if (name == "plackett") return CopulaFamily::Plackett;
  if (name == "gauss") return CopulaFamily::Gauss;
  throw std::invalid_argument("unknown copula family: " + name);
}

ClassicalCopula make_copula(CopulaFamily family, double theta) {
  check_theta(family, theta);
  return ClassicalCopula{family, theta};
}

double copula_cdf(const ClassicalCopula& c, double u1, double u2) {
  check_theta(c.family, c.theta);
  if (u1 < 0.0 || u1 > 1.0 || u2 < 0.0 || u2 > 1.0) {
    throw std::domain_error("copula_cdf: arguments must lie in [0, 1]");
  }
  if (u1 == 0.0 || u2 == 0.0) return 0.0;
  if (u1 == 1.0) return u2;
  if (u2 == 1.0) return u1;

  double th = c.theta;
  switch (c.family) {
    case CopulaFamily::Clayton: {
      double s = std::pow(u1, -th) + std::pow(u2, -th) - 1.0;
      return std::pow(std::max(s, 0.0), -1.0 / th);
    }
    case CopulaFamily::Frank: {
      double num = std::expm1(-th * u1) * std::expm1(-th * u2);
      return -std::log1p(num / std::expm1(-th)) / th;
    }
    case CopulaFamily::Gumbel: {
      double a = std::pow(-std::log(u1), th) + std::pow(-std::log(u2), th);
      return std::exp(-std::pow(a, 1.0 / th));
    }
    case CopulaFamily::Plackett: {
      if (std::fabs(th - 1.0) < kPlackettIndepBand) return u1 * u2;
      double t = 1.0 + (th - 1.0) * (u1 + u2);
      double disc = t * t - 4.0 * u1 * u2 * th * (th - 1.0);
      return (t - std::sqrt(disc)) / (2.0 * (th - 1.0));
    }
    case CopulaFamily::Gauss: {
      if (th == 0.0) return u1 * u2;
      return binorm_cdf(norm_quantile(u1), norm_quantile(u2), th);
    }
  }
  return 0.0;
}

double copula_density(const ClassicalCopula& c, double u1, double u2) {
  check_theta(c.family, c.theta);
  if (u1 <= 0.0 || u1 >= 1.0 || u2 <= 0.0 || u2 >= 1.0) {
    throw std::domain_error("copula_density: arguments must lie in (0, 1)");
  }

  double th = c.theta;
  switch (c.family) {
    case CopulaFamily::Clayton: {
      double s = std::pow(u1, -th) + std::pow(u2, -th) - 1.0;
      return (1.0 + th) * std::pow(u1 * u2, -th - 1.0) * std::pow(s, -1.0 / th - 2.0);
    }
    case CopulaFamily::Frank: {
      double e = -std::expm1(-th);  // 1 - exp(-theta)
      double eu = -std::expm1(-th * u1);
      double ev = -std::expm1(-th * u2);
      double den = e - eu * ev;
      return th * e * std::exp(-th * (u1 + u2)) / (den * den);
    }
    case CopulaFamily::Gumbel: {
      double l1 = -std::log(u1);
      double l2 = -std::log(u2);
      double a = std::pow(l1, th) + std::pow(l2, th);
      double a_r = std::pow(a, 1.0 / th);
      return std::exp(-a_r) / (u1 * u2) * std::pow(l1 * l2, th - 1.0) *
             std::pow(a, 2.0 / th - 2.0) * (1.0 + (th - 1.0) / a_r);
    }
    case CopulaFamily::Plackett: {
      if (std::fabs(th - 1.0) < kPlackettIndepBand) return 1.0;
      double t = 1.0 + (th - 1.0) * (u1 + u2);
      double disc = t * t - 4.0 * u1 * u2 * th * (th - 1.0);
      return th * (1.0 + (th - 1.0) * (u1 + u2 - 2.0 * u1 * u2)) /
             std::pow(disc, 1.5);
    }
    case CopulaFamily::Gauss: {
      if (th == 0.0) return 1.0;
      double x = norm_quantile(u1);
      double y = norm_quantile(u2);
      return binorm_pdf(x, y, th) / (norm_pdf(x) * norm_pdf(y));
    }
  }
  return 0.0;
}

double spearman_rho(const ClassicalCopula& c) {
  static const GaussLegendreRule rule = gauss_legendre_nodes(128, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      row += rule.weights[j] * copula_cdf(c, rule.nodes[i], rule.nodes[j]);
    }
    acc += rule.weights[i] * row;
  }
  return 12.0 * acc - 3.0;
}

double spearman_to_theta(CopulaFamily family, double rho_s) {
  double lo, hi;
  switch (family) {
    case CopulaFamily::Clayton: lo = 1e-4, hi = 30.0; break;
    case CopulaFamily::Frank: lo = -50.0, hi = 50.0; break;
    case CopulaFamily::Gumbel: lo = 1.0, hi = 30.0; break;
    case CopulaFamily::Plackett: lo = 1e-4, hi = 100.0; break;
    case CopulaFamily::Gauss: lo = -0.999, hi = 0.999; break;
    default: throw std::invalid_argument("spearman_to_theta: unknown family");
  }

  auto eval = [&](double theta) {
    if (family == CopulaFamily::Frank && theta == 0.0) return 0.0;
    if (family == CopulaFamily::Gauss && theta == 0.0) return 0.0;
    return spearman_rho(make_copula(family, theta));
  };

  double f_lo = eval(lo) - rho_s;
  double f_hi = eval(hi) - rho_s;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (f_lo * f_hi > 0.0) {
    throw std::domain_error("spearman_to_theta: rho_s=" + std::to_string(rho_s) +
                            " not attainable by " + family_name(family));
  }
  // Spearman's rho is monotone in theta for every implemented family.
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-8) return mid;
    double f_mid = eval(mid) - rho_s;
    if (f_mid == 0.0) return mid;
    if (f_lo * f_mid < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
  }
  throw std::runtime_error("spearman_to_theta: bracket failed to shrink");
}

double joint_density_normal_marginals(const ClassicalCopula& c, double x1, double x2) {
  double u1 = std::clamp(norm_cdf(x1), 1e-15, 1.0 - 1e-15);
  double u2 = std::clamp(norm_cdf(x2), 1e-15, 1.0 - 1e-15);
  return copula_density(c, u1, u2) * norm_pdf(x1) * norm_pdf(x2);
}

}  // namespace hermicop
