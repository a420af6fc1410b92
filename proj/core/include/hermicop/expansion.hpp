#pragma once

#include <string>
#include <vector>

#include "hermicop/polybasis.hpp"
#include "hermicop/quadrature.hpp"

namespace hermicop {

/// Truncated bivariate Hermite expansion under the correlated Gaussian weight:
///   phi(x) = 1 + sum_{n=1}^{n_max} sum_{i=0}^{n} m(n,i) e_{n,i}(Gamma^-1 x),
///   density(x) = phi(x) * binorm_pdf(x; rho).
/// Coefficients are stored dense by (n, i); the pricing configuration (only
/// m(n,0) free) is a view on the same storage, not a separate type.
struct ExpansionModel {
  int n_max = 2;
  double rho = 0.0;
  RotationFactors factors;
  std::vector<double> coefficients;  // (n,i), n = 1..n_max, i = 0..n

  static std::size_t index(int n, int i) {
    // offset of block n within the flattened triangle; block n has n+1 entries
    return static_cast<std::size_t>(n * (n + 1) / 2 - 1 + i);
  }

  double coeff(int n, int i) const;
  void set_coeff(int n, int i, double value);

  static ExpansionModel zeros(int n_max, double rho);
};

/// Scaled diagonal slice m_check_i = i! * m(i, 0), i = 3..n_max. These are
/// the free smile-shape parameters of the Hermite copula.
struct ScaledCoefficients {
  int n_max = 2;
  std::vector<double> values;  // index 0 -> m_check_3

  double m_check(int i) const { return values.at(static_cast<std::size_t>(i - 3)); }
};

/// Estimate coefficients of the expansion from a target joint density given
/// on a grid:  m(n,i) = sum_nodes w * e_{n,i}(Gamma^-1 x) * target(x).
///
/// The target must be standardized (mean 0, variance 1 per margin). Order 1
/// is always zeroed; order 2 is zeroed when rho matches the target's grid
/// correlation to 1e-3 (the expansion of the matched weight has none).
///
/// Throws std::invalid_argument for grids coarser than 50 sections per
/// dimension and std::domain_error when |rho| exceeds the guard band.
ExpansionModel estimate_coefficients(const GridDensity& target, double rho, int n_max);

/// Evaluate the truncated expansion on a grid. Returned GridDensity is in
/// ratio form (values = phi) with the correlated Gaussian weight attached;
/// negative values are possible and flagged, not an error.
GridDensity evaluate_expansion(const ExpansionModel& model, const CartesianGrid& grid);

/// True when any node value of the ratio form is negative.
bool has_negative_region(const GridDensity& gd);

ScaledCoefficients scale_coefficients(const ExpansionModel& model);

/// Rebuild a model with only the (i,0) diagonal populated from scaled
/// coefficients; exact inverse of scale_coefficients on that slice.
ExpansionModel unscale_coefficients(const ScaledCoefficients& scaled, int n_max, double rho);

/// JSON round-trip: {"n_max":..,"rho":..,"coefficients":[[n,i,value],...]}.
std::string expansion_to_json(const ExpansionModel& model);
ExpansionModel expansion_from_json(const std::string& text);

}  // namespace hermicop
