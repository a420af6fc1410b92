#include "hermicop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hermicop/normal.hpp"

#include <json.hpp>

namespace hermicop {

std::size_t CartesianGrid::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim(); ++d) {
    flat = flat * static_cast<std::size_t>(sections[static_cast<std::size_t>(d)]) +
           static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]);
  }
  return flat;
}

void CartesianGrid::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int d = dim() - 1; d >= 0; --d) {
    auto s = static_cast<std::size_t>(sections[static_cast<std::size_t>(d)]);
    idx[static_cast<std::size_t>(d)] = static_cast<int>(flat % s);
    flat /= s;
  }
}

bool CartesianGrid::same_shape(const CartesianGrid& other) const {
  return low == other.low && high == other.high && sections == other.sections;
}

CartesianGrid build_grid(const std::vector<std::pair<double, double>>& bounds,
                         const std::vector<int>& sections) {
  if (bounds.empty() || bounds.size() != sections.size()) {
    throw std::invalid_argument("build_grid: bounds/sections size mismatch");
  }
  CartesianGrid g;
  g.cell_weight = 1.0;
  for (std::size_t d = 0; d < bounds.size(); ++d) {
    auto [lo, hi] = bounds[d];
    if (!(lo < hi)) {
      throw std::invalid_argument("build_grid: degenerate bounds in dimension " +
                                  std::to_string(d));
    }
    if (sections[d] < 2) {
      throw std::invalid_argument("build_grid: need at least 2 sections per dimension");
    }
    g.low.push_back(lo);
    g.high.push_back(hi);
    g.sections.push_back(sections[d]);
    double delta = (hi - lo) / sections[d];
    g.delta.push_back(delta);
    g.cell_weight *= delta;
  }
  return g;
}

std::vector<double> GridDensity::ratio_values() const {
  if (kind == DensityKind::Ratio) return values;
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / weight_density[i];
  return out;
}

std::vector<double> GridDensity::absolute_values() const {
  if (kind == DensityKind::Absolute) return values;
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] * weight_density[i];
  return out;
}

namespace {

double pairwise_sum_impl(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum_impl(x, half) + pairwise_sum_impl(x + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
  return pairwise_sum_impl(x.data(), x.size());
}

double inner_product(std::span<const double> f, std::span<const double> g,
                     std::span<const double> weight_density,
                     const CartesianGrid& grid) {
  std::size_t n = grid.node_count();
  if (f.size() != n || g.size() != n || weight_density.size() != n) {
    throw std::invalid_argument("inner_product: array size does not match grid");
  }
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = f[i] * g[i] * weight_density[i];
  return grid.cell_weight * pairwise_sum(terms);
}

double grid_norm(std::span<const double> f, std::span<const double> weight_density,
                 const CartesianGrid& grid) {
  return std::sqrt(std::max(0.0, inner_product(f, f, weight_density, grid)));
}

namespace {

// Implicit-shift QL sweep for a symmetric tridiagonal matrix, accumulating
// only the first row of the eigenvector matrix (all Golub-Welsch needs).
void tridiag_eigen_first_row(std::vector<double>& diag, std::vector<double>& off,
                             std::vector<double>& first_row) {
  int n = static_cast<int>(diag.size());
  first_row.assign(static_cast<std::size_t>(n), 0.0);
  first_row[0] = 1.0;
  off.push_back(0.0);

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
        if (std::fabs(off[m]) <= 1e-300 + 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("tridiag eigen: too many iterations");
        double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        bool underflow = false;
        for (; i >= l; --i) {
          double f = s * off[i];
          double b = c * off[i];
          r = std::hypot(f, g);
          off[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            off[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          double fv = first_row[static_cast<std::size_t>(i) + 1];
          first_row[static_cast<std::size_t>(i) + 1] =
              s * first_row[static_cast<std::size_t>(i)] + c * fv;
          first_row[static_cast<std::size_t>(i)] =
              c * first_row[static_cast<std::size_t>(i)] - s * fv;
        }
        if (underflow && i >= l) continue;
        diag[l] -= p;
        off[l] = g;
        off[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

GaussHermiteRule gauss_hermite_nodes(int n) {
  if (n < 1 || n > 64) {
    throw std::out_of_range("gauss_hermite_nodes: n must lie in [1, 64]");
  }
  GaussHermiteRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  // Jacobi matrix of the probabilists' Hermite recurrence: zero diagonal,
  // off-diagonal sqrt(k).
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off(static_cast<std::size_t>(n) - 1);
  for (int k = 1; k < n; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(static_cast<double>(k));
  std::vector<double> first_row;
  tridiag_eigen_first_row(diag, off, first_row);

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });

  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) {
    rule.nodes[i] = diag[order[i]];
    rule.weights[i] = first_row[order[i]] * first_row[order[i]];
  }
  // Symmetrize: nodes come in +/- pairs, the middle node of odd rules is 0.
  for (std::size_t i = 0, j = order.size() - 1; i < j; ++i, --j) {
    double m = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    rule.nodes[i] = -m;
    rule.nodes[j] = m;
    double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n) / 2] = 0.0;
  return rule;
}

GaussLegendreRule gauss_legendre_nodes(int n) {
  if (n < 1) throw std::out_of_range("gauss_legendre_nodes: n must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n) / 2] = 0.0;
  return rule;
}

GaussLegendreRule gauss_legendre_nodes(int n, double a, double b) {
  GaussLegendreRule rule = gauss_legendre_nodes(n);
  double mid = 0.5 * (a + b);
  double s = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + s * rule.nodes[i];
    rule.weights[i] *= s;
  }
  return rule;
}

std::vector<double> gaussian_weight_2d(const CartesianGrid& grid, double rho) {
  if (grid.dim() != 2) {
    throw std::invalid_argument("gaussian_weight_2d: grid must be 2D");
  }
  if (!(std::fabs(rho) < 1.0)) {
    throw std::domain_error("gaussian_weight_2d: |rho| must be < 1");
  }
  std::size_t n1 = static_cast<std::size_t>(grid.sections[0]);
  std::size_t n2 = static_cast<std::size_t>(grid.sections[1]);
  std::vector<double> out(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    double x1 = grid.coord(0, static_cast<int>(i));
    for (std::size_t j = 0; j < n2; ++j) {
      double x2 = grid.coord(1, static_cast<int>(j));
      out[i * n2 + j] = binorm_pdf(x1, x2, rho);
    }
  }
  return out;
}

std::vector<double> gaussian_weight_independent(const CartesianGrid& grid) {
  std::size_t n = grid.node_count();
  std::vector<double> out(n, 1.0);
  std::vector<int> idx(static_cast<std::size_t>(grid.dim()));
  for (std::size_t f = 0; f < n; ++f) {
    grid.unflatten(f, idx);
    double p = 1.0;
    for (int d = 0; d < grid.dim(); ++d) p *= norm_pdf(grid.coord(d, idx[static_cast<std::size_t>(d)]));
    out[f] = p;
  }
  return out;
}

void write_grid_density(const GridDensity& gd, const std::string& csv_path,
                        const std::string& sidecar_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("write_grid_density: cannot open " + csv_path);
  csv.precision(17);
  for (int d = 0; d < gd.grid.dim(); ++d) csv << "x" << (d + 1) << ",";
  csv << "value\n";
  std::vector<int> idx(static_cast<std::size_t>(gd.grid.dim()));
  for (std::size_t f = 0; f < gd.grid.node_count(); ++f) {
    gd.grid.unflatten(f, idx);
    for (int d = 0; d < gd.grid.dim(); ++d) {
      csv << gd.grid.coord(d, idx[static_cast<std::size_t>(d)]) << ",";
    }
    csv << gd.values[f] << "\n";
  }

  nlohmann::json meta;
  for (int d = 0; d < gd.grid.dim(); ++d) {
    meta["bounds"].push_back({gd.grid.low[static_cast<std::size_t>(d)],
                              gd.grid.high[static_cast<std::size_t>(d)]});
  }
  meta["sections"] = gd.grid.sections;
  meta["rho"] = gd.rho;
  meta["kind"] = gd.kind == DensityKind::Ratio ? "ratio" : "absolute";
  std::ofstream side(sidecar_path);
  if (!side) throw std::runtime_error("write_grid_density: cannot open " + sidecar_path);
  side << meta.dump(2) << "\n";
}

GridDensity read_grid_density(const std::string& csv_path,
                              const std::string& sidecar_path) {
  std::ifstream side(sidecar_path);
  if (!side) throw std::runtime_error("read_grid_density: cannot open " + sidecar_path);
  nlohmann::json meta = nlohmann::json::parse(side);

  std::vector<std::pair<double, double>> bounds;
  for (const auto& b : meta.at("bounds")) {
    bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  }
  std::vector<int> sections = meta.at("sections").get<std::vector<int>>();

  GridDensity gd;
  gd.grid = build_grid(bounds, sections);
  gd.rho = meta.at("rho").get<double>();
  gd.kind = meta.at("kind").get<std::string>() == "ratio" ? DensityKind::Ratio
                                                          : DensityKind::Absolute;
  if (gd.grid.dim() == 2 && gd.rho != 0.0) {
    gd.weight_density = gaussian_weight_2d(gd.grid, gd.rho);
  } else {
    gd.weight_density = gaussian_weight_independent(gd.grid);
  }

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("read_grid_density: cannot open " + csv_path);
  std::string line;
  if (!std::getline(csv, line)) throw std::runtime_error("read_grid_density: empty file");
  gd.values.reserve(gd.grid.node_count());
  std::size_t row = 1;
  while (std::getline(csv, line)) {
    ++row;
    if (line.empty()) continue;
    std::size_t pos = line.rfind(',');
    if (pos == std::string::npos) {
      throw std::runtime_error("read_grid_density: malformed row " + std::to_string(row));
    }
    try {
      gd.values.push_back(std::stod(line.substr(pos + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error("read_grid_density: bad value at row " + std::to_string(row));
    }
  }
  if (gd.values.size() != gd.grid.node_count()) {
    throw std::runtime_error("read_grid_density: node count mismatch, expected " +
                             std::to_string(gd.grid.node_count()) + " got " +
                             std::to_string(gd.values.size()));
  }
  return gd;
}

}  // namespace hermicop
