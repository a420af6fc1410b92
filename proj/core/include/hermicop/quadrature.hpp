#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hermicop {

/// Equally spaced Cartesian midpoint grid. Nodes are cell midpoints and every
/// node carries the same quadrature weight w = prod(delta_d).
///
/// Flattening is row-major by dimension index: dimension 0 varies slowest,
/// the last dimension fastest. GridDensity files rely on this order.
struct CartesianGrid {
  std::vector<double> low;
  std::vector<double> high;
  std::vector<int> sections;
  std::vector<double> delta;
  double cell_weight = 0.0;

  int dim() const { return static_cast<int>(sections.size()); }

  std::size_t node_count() const {
    std::size_t n = 1;
    for (int s : sections) n *= static_cast<std::size_t>(s);
    return n;
  }

  double coord(int d, int idx) const {
    return low[static_cast<std::size_t>(d)] + (idx + 0.5) * delta[static_cast<std::size_t>(d)];
  }

  /// Cell edge; idx runs 0..sections[d].
  double edge(int d, int idx) const {
    return low[static_cast<std::size_t>(d)] + idx * delta[static_cast<std::size_t>(d)];
  }

  std::size_t flat_index(std::span<const int> idx) const;
  void unflatten(std::size_t flat, std::span<int> idx) const;

  bool same_shape(const CartesianGrid& other) const;
};

/// Midpoint grid from per-dimension [low, high] bounds and section counts.
/// Throws std::invalid_argument on degenerate bounds or sections < 2.
CartesianGrid build_grid(const std::vector<std::pair<double, double>>& bounds,
                         const std::vector<int>& sections);

/// How GridDensity::values are to be read.
enum class DensityKind {
  Ratio,     ///< values = density / weight_density (the projected element)
  Absolute,  ///< values = density itself
};

/// A function sampled on a Cartesian grid together with the weight density
/// of the ambient Hilbert space. The element projections act on.
struct GridDensity {
  CartesianGrid grid;
  std::vector<double> values;
  std::vector<double> weight_density;
  DensityKind kind = DensityKind::Ratio;
  double rho = 0.0;  ///< correlation of the Gaussian weight (metadata)

  /// values as ratio form, converting if needed.
  std::vector<double> ratio_values() const;
  /// values as absolute density, converting if needed.
  std::vector<double> absolute_values() const;
};

/// Midpoint-rule inner product <f, g>_mu = sum_i w f(x_i) g(x_i) p_mu(x_i).
/// Pairwise summation; deterministic regardless of threading above it.
/// Throws std::invalid_argument on shape mismatch.
double inner_product(std::span<const double> f, std::span<const double> g,
                     std::span<const double> weight_density,
                     const CartesianGrid& grid);

/// Norm induced by inner_product.
double grid_norm(std::span<const double> f, std::span<const double> weight_density,
                 const CartesianGrid& grid);

/// Deterministic pairwise sum of a plain array.
double pairwise_sum(std::span<const double> x);

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule in probabilists' normalization:
///   integral f(x) dPhi(x) ~= sum_i w_i f(x_i),  weights sum to 1.
/// Valid for 1 <= n <= 64.
GaussHermiteRule gauss_hermite_nodes(int n);

struct GaussLegendreRule {
  std::vector<double> nodes;    ///< on (-1, 1)
  std::vector<double> weights;  ///< sum to 2
};

/// Gauss-Legendre rule on (-1, 1) by Newton iteration on P_n.
GaussLegendreRule gauss_legendre_nodes(int n);

/// The same rule mapped to (a, b); weights sum to b - a.
GaussLegendreRule gauss_legendre_nodes(int n, double a, double b);

/// Bivariate standard normal density with correlation rho at every node of a
/// 2D grid, flattened in grid order.
std::vector<double> gaussian_weight_2d(const CartesianGrid& grid, double rho);

/// Product of independent standard normal densities at every node (any dim).
std::vector<double> gaussian_weight_independent(const CartesianGrid& grid);

/// CSV is `x1,x2,...,value` per node in flat order; the JSON sidecar records
/// bounds, sections, rho and the value kind so files round-trip exactly.
void write_grid_density(const GridDensity& gd, const std::string& csv_path,
                        const std::string& sidecar_path);
GridDensity read_grid_density(const std::string& csv_path,
                              const std::string& sidecar_path);

}  // namespace hermicop
