#pragma once

#include <string>

namespace hermicop {

enum class CopulaFamily { Clayton, Frank, Gumbel, Plackett, Gauss };

std::string family_name(CopulaFamily f);
CopulaFamily family_from_name(const std::string& name);

/// Classical two-dimensional copula with a single parameter theta.
/// Parameter domains: Clayton theta > 0, Frank theta != 0, Gumbel theta >= 1,
/// Plackett theta > 0 (theta == 1 treated as independence), Gauss |theta| < 1.
struct ClassicalCopula {
  CopulaFamily family;
  double theta;
};

/// Validating constructor; throws std::domain_error outside the family domain.
ClassicalCopula make_copula(CopulaFamily family, double theta);

/// C(u1, u2) with uniform-margin boundary behaviour C(u,0)=0, C(u,1)=u.
double copula_cdf(const ClassicalCopula& c, double u1, double u2);

/// Analytic copula density (mixed second partial of the CDF). Throws
/// std::domain_error at the exact corners u in {0,1}.
double copula_density(const ClassicalCopula& c, double u1, double u2);

/// Spearman's rank correlation 12 * integral of C over the unit square - 3,
/// by tensor Gauss-Legendre quadrature.
double spearman_rho(const ClassicalCopula& c);

/// Invert the Spearman map for theta by bracketing bisection to 1e-8.
/// Throws std::domain_error when rho_s is not attainable by the family.
double spearman_to_theta(CopulaFamily family, double rho_s);

/// Joint density with standard normal marginals:
/// copula_density(Phi(x1), Phi(x2)) * phi(x1) * phi(x2).
double joint_density_normal_marginals(const ClassicalCopula& c, double x1, double x2);

}  // namespace hermicop
