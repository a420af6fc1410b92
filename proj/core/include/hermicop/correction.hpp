#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hermicop/expansion.hpp"
#include "hermicop/quadrature.hpp"

namespace hermicop {

/// Convex constraint sets on the discrete Hilbert space of grid functions.
/// The projected element is always the ratio form phi = density / weight.

/// <phi, 1> = target (total probability).
struct Normalization {
  double target = 1.0;
};

/// phi >= 0 pointwise; projection is max(phi, 0).
struct NonNegativity {};

/// <phi, test> = target for a test function sampled on the grid.
struct MomentMatch {
  std::vector<double> test;
  double target = 0.0;
};

/// Marginal density along one axis prescribed per slice. Targets are density
/// values at slice midpoints; they must be non-negative and integrate to
/// 1 +- 1e-6 under the 1D midpoint rule.
struct MarginalMatch {
  int axis = 0;
  std::vector<double> target;
};

using ConvexConstraint = std::variant<Normalization, NonNegativity, MomentMatch, MarginalMatch>;

struct DykstraReport {
  int sweeps = 0;
  bool converged = false;
  double last_sweep_l2_change = 0.0;
  std::vector<double> final_violation;  // per constraint, sweep order
  bool infeasible_suspected = false;

  std::string to_json() const;
};

struct DykstraOptions {
  double tol = 1e-10;    // L2 change of a full sweep, grid norm
  int max_sweeps = 5000;
};

/// Projection onto an equality set {<phi, test> = target}. The result differs
/// from phi by a multiple of test. Throws std::domain_error when the test
/// function has (numerically) zero norm.
std::vector<double> project_equality(std::span<const double> phi,
                                     std::span<const double> test, double target,
                                     std::span<const double> weight,
                                     const CartesianGrid& grid);

/// Projection onto an inequality set {<phi, test> <= target}: subtracts only
/// the positive part of the multiplier.
std::vector<double> project_inequality(std::span<const double> phi,
                                       std::span<const double> test, double target,
                                       std::span<const double> weight,
                                       const CartesianGrid& grid);

/// Pointwise max(phi, 0).
std::vector<double> project_nonneg(std::span<const double> phi);

/// Projection onto the marginal-match set: disjoint per-slice equality
/// projections, computed in one pass. Throws std::domain_error for a slice
/// with zero weight mass.
std::vector<double> project_marginal(std::span<const double> phi, int axis,
                                     std::span<const double> target,
                                     std::span<const double> weight,
                                     const CartesianGrid& grid);

/// Dykstra's cyclic projection with correction terms
///   phi_n = Proj_{K_[n]}(phi_{n-1} + e_{n-k}),  e_n = phi_{n-1} + e_{n-k} - phi_n,
/// converging to the projection of phi0 onto the intersection.
///
/// The equality sets alone are affine, so plain cyclic projection would also
/// converge; the correction terms are required because NonNegativity is a
/// non-affine cone. Constraints are applied per sweep in canonical order:
/// Normalization, MomentMatch (caller order), MarginalMatch, NonNegativity
/// last, so every sweep ends cone-feasible.
///
/// Non-convergence within max_sweeps is reported (converged = false), not
/// thrown. Violations that plateau above 1e-6 for 500 sweeps mark the
/// constraint set as suspected infeasible.
std::pair<std::vector<double>, DykstraReport> dykstra(
    std::span<const double> phi0, const std::vector<ConvexConstraint>& constraints,
    std::span<const double> weight, const CartesianGrid& grid,
    const DykstraOptions& options = {});

/// Constraint catalog for preserving an expansion's coefficients under
/// correction: Normalization, then MomentMatch on every basis element
/// (n, i), n = 1..n_max ascending, then NonNegativity.
///
/// With in_rotated_coords the grid lives in the rotated independent
/// coordinates and basis elements are evaluated at v = x directly; otherwise
/// at v = Gamma^-1 x.
std::vector<ConvexConstraint> expansion_constraints(const ExpansionModel& model,
                                                    const CartesianGrid& grid,
                                                    bool in_rotated_coords = false);

/// Correct a truncated expansion in one call: evaluate, project under its own
/// weight with expansion_constraints, return the corrected absolute density.
GridDensity correct_expansion(const ExpansionModel& model, const CartesianGrid& grid,
                              const DykstraOptions& options, DykstraReport* report = nullptr);

struct Corrected1D {
  std::vector<double> phi;
  DykstraReport report;
};

/// One-dimensional product fast path: factor i is the univariate expansion
/// 1 + sum_j coeffs[i][j-1] He_j(v)/sqrt(j!) on its own grid, corrected
/// independently under {normalization, its own moment matches,
/// non-negativity}. Cost scales with the sum of the grid sizes, not the
/// product.
std::vector<Corrected1D> correct_1d_product(
    const std::vector<std::vector<double>>& factor_coeffs,
    const std::vector<CartesianGrid>& grids, const DykstraOptions& options = {});

}  // namespace hermicop
