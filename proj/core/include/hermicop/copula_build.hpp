#pragma once

#include <array>
#include <functional>
#include <vector>

#include "hermicop/expansion.hpp"
#include "hermicop/quadrature.hpp"

namespace hermicop {

/// One-dimensional marginal extracted from a grid density: density at cell
/// midpoints, CDF at cell right edges (renormalized to end at 1).
struct DiscreteMarginal {
  double low = 0.0;
  double high = 0.0;
  double delta = 0.0;
  std::vector<double> coords;     ///< cell midpoints
  std::vector<double> density;    ///< >= 0
  std::vector<double> cdf_edges;  ///< CDF at right edges, last entry 1

  /// CDF, piecewise linear between cell edges.
  double cdf(double x) const;
  /// Monotone inverse of cdf; u must lie in (0, 1).
  double quantile(double u) const;
  /// Total mass before renormalization.
  double raw_mass = 0.0;
};

/// Marginal along `axis` by quadrature sums over the other axes.
/// Requires a non-negative input density normalized to 1e-3.
DiscreteMarginal marginal_from_density(const GridDensity& density, int axis);

/// All per-axis marginals.
std::vector<DiscreteMarginal> marginals_from_density(const GridDensity& density);

/// Free-function form of DiscreteMarginal::quantile.
double inverse_cdf(const DiscreteMarginal& m, double u);

/// Copula backed by a corrected grid density. Marginals are always the ones
/// recomputed from the corrected density, which is what makes the copula
/// valid after correction; the CDF surface is the cumulative cell-mass grid
/// interpolated bilinearly at quantile-mapped points.
class HermiteCopula {
 public:
  static HermiteCopula build(GridDensity corrected, ExpansionModel source);

  double cdf(double u1, double u2) const;
  double density(double u1, double u2) const;

  const DiscreteMarginal& marginal(int axis) const { return marginals_[static_cast<std::size_t>(axis)]; }
  const GridDensity& grid_density() const { return density_; }
  const ExpansionModel& source_model() const { return model_; }

  /// Expectation of payoff(y1, y2) under {this copula, external marginals
  /// given as quantile functions}, computed on the rotated
  /// independent-Gaussian grid (the discretization the projection used).
  double integrate(const std::function<double(double, double)>& payoff,
                   const std::function<double(double)>& quantile1,
                   const std::function<double(double)>& quantile2) const;

  /// True when a cdf/density query had to clamp a mapped point to the grid.
  bool clamped() const { return clamped_; }

 private:
  GridDensity density_;  // absolute form
  ExpansionModel model_;
  std::array<DiscreteMarginal, 2> marginals_;
  std::vector<double> cum_;  // (n1+1) x (n2+1) corner cumulative masses
  mutable bool clamped_ = false;

  double cum_at(double x1, double x2) const;
};

}  // namespace hermicop
