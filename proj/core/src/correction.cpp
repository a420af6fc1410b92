#include "hermicop/correction.hpp"
#include <limits>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "hermicop/normal.hpp"
#include "hermicop/polybasis.hpp"

namespace hermicop {

namespace {

constexpr double kZeroNormTol = 1e-14;
constexpr double kPlateauViolation = 1e-6;
constexpr int kPlateauSweeps = 500;

void check_shapes(std::size_t n, std::span<const double> a, std::span<const double> b) {
  if (a.size() != n || b.size() != n) {
    throw std::invalid_argument("projection: array size does not match grid");
  }
}

// Slice bookkeeping for marginal constraints: maps flat node index -> slice
// index along `axis`, plus per-slice weight mass.
struct SliceIndex {
  std::vector<int> slice_of_node;
  int slices = 0;
};

SliceIndex build_slice_index(const CartesianGrid& grid, int axis) {
  if (axis < 0 || axis >= grid.dim()) {
    throw std::invalid_argument("marginal constraint: axis out of range");
  }
  SliceIndex s;
  s.slices = grid.sections[static_cast<std::size_t>(axis)];
  s.slice_of_node.resize(grid.node_count());
  std::vector<int> idx(static_cast<std::size_t>(grid.dim()));
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    grid.unflatten(f, idx);
    s.slice_of_node[f] = idx[static_cast<std::size_t>(axis)];
  }
  return s;
}

}  // namespace

std::vector<double> project_equality(std::span<const double> phi,
                                     std::span<const double> test, double target,
                                     std::span<const double> weight,
                                     const CartesianGrid& grid) {
  check_shapes(grid.node_count(), phi, test);
  check_shapes(grid.node_count(), weight, test);
  double norm2 = inner_product(test, test, weight, grid);
  if (norm2 <= kZeroNormTol) {
    throw std::domain_error("project_equality: test function has zero norm");
  }
  double lambda = (inner_product(phi, test, weight, grid) - target) / norm2;
  std::vector<double> out(phi.begin(), phi.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= lambda * test[k];
  return out;
}

std::vector<double> project_inequality(std::span<const double> phi,
                                       std::span<const double> test, double target,
                                       std::span<const double> weight,
                                       const CartesianGrid& grid) {
  check_shapes(grid.node_count(), phi, test);
  double norm2 = inner_product(test, test, weight, grid);
  if (norm2 <= kZeroNormTol) {
    throw std::domain_error("project_inequality: test function has zero norm");
  }
  double lambda = std::max(0.0, (inner_product(phi, test, weight, grid) - target)) / norm2;
  std::vector<double> out(phi.begin(), phi.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= lambda * test[k];
  return out;
}

std::vector<double> project_nonneg(std::span<const double> phi) {
  std::vector<double> out(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) out[k] = std::max(phi[k], 0.0);
  return out;
}

std::vector<double> project_marginal(std::span<const double> phi, int axis,
                                     std::span<const double> target,
                                     std::span<const double> weight,
                                     const CartesianGrid& grid) {
  std::size_t n = grid.node_count();
  check_shapes(n, phi, weight);
  SliceIndex si = build_slice_index(grid, axis);
  if (target.size() != static_cast<std::size_t>(si.slices)) {
    throw std::invalid_argument("project_marginal: target size != sections[axis]");
  }
  double delta = grid.delta[static_cast<std::size_t>(axis)];
  double w = grid.cell_weight;

  std::vector<double> mass(static_cast<std::size_t>(si.slices), 0.0);
  std::vector<double> val(static_cast<std::size_t>(si.slices), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    auto s = static_cast<std::size_t>(si.slice_of_node[k]);
    mass[s] += w * weight[k];
    val[s] += w * phi[k] * weight[k];
  }
  std::vector<double> lambda(static_cast<std::size_t>(si.slices));
  for (std::size_t s = 0; s < lambda.size(); ++s) {
    if (mass[s] <= kZeroNormTol) {
      throw std::domain_error("project_marginal: slice " + std::to_string(s) +
                              " has zero weight mass");
    }
    // constraint per slice: <phi, chi_s> = delta * g_s
    lambda[s] = (val[s] - delta * target[s]) / mass[s];
  }
  std::vector<double> out(phi.begin(), phi.end());
  for (std::size_t k = 0; k < n; ++k) {
    out[k] -= lambda[static_cast<std::size_t>(si.slice_of_node[k])];
  }
  return out;
}

namespace {

// Internal applier holding per-constraint precomputed data.
struct ConstraintKernel {
  enum class Kind { Equality, Cone, Marginal } kind;
  // Equality (normalization / moment match)
  std::vector<double> test;
  std::vector<double> test_weighted;  // test * weight, for fast inner products
  double target = 0.0;
  double norm2 = 0.0;
  // Marginal
  int axis = 0;
  std::vector<double> marginal_target;
  SliceIndex slices;
  std::vector<double> slice_mass;

  double violation(std::span<const double> phi, std::span<const double> weight,
                   const CartesianGrid& grid, std::vector<double>& scratch) const;
};

double weighted_dot(std::span<const double> phi, const std::vector<double>& tw,
                    double cell_weight, std::vector<double>& scratch) {
  scratch.resize(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) scratch[k] = phi[k] * tw[k];
  return cell_weight * pairwise_sum(scratch);
}

double ConstraintKernel::violation(std::span<const double> phi,
                                   std::span<const double> weight,
                                   const CartesianGrid& grid,
                                   std::vector<double>& scratch) const {
  switch (kind) {
    case Kind::Equality:
      return std::fabs(weighted_dot(phi, test_weighted, grid.cell_weight, scratch) - target);
    case Kind::Cone: {
      double worst = 0.0;
      for (double v : phi) worst = std::min(worst, v);
      return -worst;
    }
    case Kind::Marginal: {
      double delta = grid.delta[static_cast<std::size_t>(axis)];
      std::vector<double> val(static_cast<std::size_t>(slices.slices), 0.0);
      for (std::size_t k = 0; k < phi.size(); ++k) {
        val[static_cast<std::size_t>(slices.slice_of_node[k])] +=
            grid.cell_weight * phi[k] * weight[k];
      }
      double worst = 0.0;
      for (std::size_t s = 0; s < val.size(); ++s) {
        worst = std::max(worst, std::fabs(val[s] / delta - marginal_target[s]));
      }
      return worst;
    }
  }
  return 0.0;
}

ConstraintKernel make_kernel(const ConvexConstraint& c, std::span<const double> weight,
                             const CartesianGrid& grid) {
  ConstraintKernel k;
  std::size_t n = grid.node_count();
  if (const auto* norm = std::get_if<Normalization>(&c)) {
    k.kind = ConstraintKernel::Kind::Equality;
    k.test.assign(n, 1.0);
    k.target = norm->target;
  } else if (const auto* mm = std::get_if<MomentMatch>(&c)) {
    k.kind = ConstraintKernel::Kind::Equality;
    if (mm->test.size() != n) {
      throw std::invalid_argument("MomentMatch: test size does not match grid");
    }
    k.test = mm->test;
    k.target = mm->target;
  } else if (const auto* mg = std::get_if<MarginalMatch>(&c)) {
    k.kind = ConstraintKernel::Kind::Marginal;
    k.axis = mg->axis;
    k.marginal_target = mg->target;
    k.slices = build_slice_index(grid, mg->axis);
    if (mg->target.size() != static_cast<std::size_t>(k.slices.slices)) {
      throw std::invalid_argument("MarginalMatch: target size != sections[axis]");
    }
    double sum = 0.0;
    double delta = grid.delta[static_cast<std::size_t>(mg->axis)];
    for (double g : mg->target) {
      if (g < 0.0) throw std::invalid_argument("MarginalMatch: negative target density");
      sum += g * delta;
    }
    if (std::fabs(sum - 1.0) > 1e-6) {
      throw std::invalid_argument("MarginalMatch: target does not integrate to 1");
    }
    k.slice_mass.assign(static_cast<std::size_t>(k.slices.slices), 0.0);
    for (std::size_t f = 0; f < n; ++f) {
      k.slice_mass[static_cast<std::size_t>(k.slices.slice_of_node[f])] +=
          grid.cell_weight * weight[f];
    }
    for (double m : k.slice_mass) {
      if (m <= kZeroNormTol) {
        throw std::domain_error("MarginalMatch: slice with zero weight mass");
      }
    }
  } else {
    k.kind = ConstraintKernel::Kind::Cone;
  }
  if (k.kind == ConstraintKernel::Kind::Equality) {
    k.test_weighted.resize(n);
    for (std::size_t i = 0; i < n; ++i) k.test_weighted[i] = k.test[i] * weight[i];
    std::vector<double> scratch;
    k.norm2 = weighted_dot(k.test, k.test_weighted, grid.cell_weight, scratch);
    if (k.norm2 <= kZeroNormTol) {
      throw std::domain_error("dykstra: equality test function has zero norm");
    }
  }
  return k;
}

int kind_rank(const ConvexConstraint& c) {
  if (std::holds_alternative<Normalization>(c)) return 0;
  if (std::holds_alternative<MomentMatch>(c)) return 1;
  if (std::holds_alternative<MarginalMatch>(c)) return 2;
  return 3;  // NonNegativity closes each sweep
}

}  // namespace

std::pair<std::vector<double>, DykstraReport> dykstra(
    std::span<const double> phi0, const std::vector<ConvexConstraint>& constraints,
    std::span<const double> weight, const CartesianGrid& grid,
    const DykstraOptions& options) {
  std::size_t n = grid.node_count();
  if (phi0.size() != n || weight.size() != n) {
    throw std::invalid_argument("dykstra: array size does not match grid");
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("dykstra: tol must be > 0");

  // Canonical sweep order (stable within each category).
  std::vector<std::size_t> order(constraints.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kind_rank(constraints[a]) < kind_rank(constraints[b]);
  });

  std::vector<ConstraintKernel> kernels;
  kernels.reserve(constraints.size());
  for (std::size_t i : order) kernels.push_back(make_kernel(constraints[i], weight, grid));

  std::vector<double> phi(phi0.begin(), phi0.end());
  std::vector<std::vector<double>> corrections(kernels.size(),
                                               std::vector<double>(n, 0.0));
  std::vector<double> y(n), scratch(n), sweep_start(n), diff(n);

  DykstraReport report;
  int plateau_run = 0;
  double best_violation = std::numeric_limits<double>::infinity();

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    sweep_start = phi;
    for (std::size_t c = 0; c < kernels.size(); ++c) {
      ConstraintKernel& k = kernels[c];
      std::vector<double>& e = corrections[c];
      for (std::size_t i = 0; i < n; ++i) y[i] = phi[i] + e[i];
      switch (k.kind) {
        case ConstraintKernel::Kind::Equality: {
          double lambda =
              (weighted_dot(y, k.test_weighted, grid.cell_weight, scratch) - k.target) /
              k.norm2;
          for (std::size_t i = 0; i < n; ++i) {
            phi[i] = y[i] - lambda * k.test[i];
            e[i] = lambda * k.test[i];
          }
          break;
        }
        case ConstraintKernel::Kind::Cone: {
          for (std::size_t i = 0; i < n; ++i) {
            phi[i] = std::max(y[i], 0.0);
            e[i] = y[i] - phi[i];
          }
          break;
        }
        case ConstraintKernel::Kind::Marginal: {
          double delta = grid.delta[static_cast<std::size_t>(k.axis)];
          std::vector<double> val(static_cast<std::size_t>(k.slices.slices), 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            val[static_cast<std::size_t>(k.slices.slice_of_node[i])] +=
                grid.cell_weight * y[i] * weight[i];
          }
          std::vector<double> lambda(val.size());
          for (std::size_t s = 0; s < val.size(); ++s) {
            lambda[s] = (val[s] - delta * k.marginal_target[s]) / k.slice_mass[s];
          }
          for (std::size_t i = 0; i < n; ++i) {
            double l = lambda[static_cast<std::size_t>(k.slices.slice_of_node[i])];
            phi[i] = y[i] - l;
            e[i] = l;
          }
          break;
        }
      }
    }

    for (std::size_t i = 0; i < n; ++i) diff[i] = phi[i] - sweep_start[i];
    double change = grid_norm(diff, weight, grid);
    report.sweeps = sweep;
    report.last_sweep_l2_change = change;

    double worst = 0.0;
    for (const ConstraintKernel& k : kernels) {
      worst = std::max(worst, k.violation(phi, weight, grid, scratch));
    }
    // plateau: violations stuck above 1e-6 without improvement
    if (worst < best_violation * (1.0 - 1e-3)) {
      best_violation = worst;
      plateau_run = 0;
    } else if (worst > kPlateauViolation) {
      if (++plateau_run >= kPlateauSweeps) report.infeasible_suspected = true;
    }

    if (change < options.tol) {
      report.converged = true;
      // stationary but violated: the intersection is (numerically) empty
      if (worst > kPlateauViolation) {
        report.converged = false;
        report.infeasible_suspected = true;
      }
      break;
    }
  }

  report.final_violation.resize(kernels.size());
  double worst_final = 0.0;
  for (std::size_t c = 0; c < kernels.size(); ++c) {
    report.final_violation[c] = kernels[c].violation(phi, weight, grid, scratch);
    worst_final = std::max(worst_final, report.final_violation[c]);
  }
  // sweep cap reached with every constraint already met is still a success
  if (!report.converged && worst_final < 1e-8) report.converged = true;
  if (report.converged && worst_final > 1e-7) report.converged = false;
  return {std::move(phi), std::move(report)};
}

std::string DykstraReport::to_json() const {
  nlohmann::json j;
  j["sweeps"] = sweeps;
  j["converged"] = converged;
  j["last_sweep_l2_change"] = last_sweep_l2_change;
  j["final_violation"] = final_violation;
  j["infeasible_suspected"] = infeasible_suspected;
  return j.dump(2);
}

std::vector<ConvexConstraint> expansion_constraints(const ExpansionModel& model,
                                                    const CartesianGrid& grid,
                                                    bool in_rotated_coords) {
  if (grid.dim() != 2) {
    throw std::invalid_argument("expansion_constraints: 2D grids only");
  }
  std::vector<ConvexConstraint> out;
  out.emplace_back(Normalization{1.0});

  std::size_t n1 = static_cast<std::size_t>(grid.sections[0]);
  std::size_t n2 = static_cast<std::size_t>(grid.sections[1]);
  for (int deg = 1; deg <= model.n_max; ++deg) {
    for (int i = 0; i <= deg; ++i) {
      MomentMatch mm;
      mm.target = model.coeff(deg, i);
      mm.test.resize(n1 * n2);
      for (std::size_t a = 0; a < n1; ++a) {
        double x1 = grid.coord(0, static_cast<int>(a));
        for (std::size_t b = 0; b < n2; ++b) {
          double x2 = grid.coord(1, static_cast<int>(b));
          double v1 = x1, v2 = x2;
          if (!in_rotated_coords) model.factors.to_v(x1, x2, v1, v2);
          mm.test[a * n2 + b] = tensor_basis_2d(deg, i, v1, v2);
        }
      }
      out.emplace_back(std::move(mm));
    }
  }
  out.emplace_back(NonNegativity{});
  return out;
}

GridDensity correct_expansion(const ExpansionModel& model, const CartesianGrid& grid,
                              const DykstraOptions& options, DykstraReport* report) {
  GridDensity raw = evaluate_expansion(model, grid);
  auto constraints = expansion_constraints(model, grid, /*in_rotated_coords=*/false);
  auto [phi, rep] = dykstra(raw.values, constraints, raw.weight_density, grid, options);
  if (report) *report = rep;
  raw.values = std::move(phi);
  return raw;
}

std::vector<Corrected1D> correct_1d_product(
    const std::vector<std::vector<double>>& factor_coeffs,
    const std::vector<CartesianGrid>& grids, const DykstraOptions& options) {
  if (factor_coeffs.size() != grids.size()) {
    throw std::invalid_argument("correct_1d_product: factors/grids size mismatch");
  }
  std::vector<Corrected1D> out;
  out.reserve(grids.size());
  for (std::size_t f = 0; f < grids.size(); ++f) {
    const CartesianGrid& g = grids[f];
    if (g.dim() != 1) {
      throw std::invalid_argument("correct_1d_product: grids must be 1D");
    }
    std::size_t n = g.node_count();
    std::vector<double> weight(n);
    for (std::size_t k = 0; k < n; ++k) weight[k] = norm_pdf(g.coord(0, static_cast<int>(k)));

    const std::vector<double>& coeffs = factor_coeffs[f];
    std::vector<double> phi(n, 1.0);
    std::vector<ConvexConstraint> constraints;
    constraints.emplace_back(Normalization{1.0});
    for (std::size_t j = 1; j <= coeffs.size(); ++j) {
      MomentMatch mm;
      mm.target = coeffs[j - 1];
      mm.test.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        mm.test[k] = hermite_orthonormal(static_cast<int>(j), g.coord(0, static_cast<int>(k)));
      }
      for (std::size_t k = 0; k < n; ++k) phi[k] += mm.target * mm.test[k];
      constraints.emplace_back(std::move(mm));
    }
    constraints.emplace_back(NonNegativity{});

    auto [corrected, rep] = dykstra(phi, constraints, weight, g, options);
    out.push_back(Corrected1D{std::move(corrected), std::move(rep)});
  }
  return out;
}

}  // namespace hermicop
