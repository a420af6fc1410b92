#include "hermicop/expansion.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace hermicop {

namespace {

void check_model_shape(int n_max, double /*rho*/) {
  if (n_max < 2) throw std::invalid_argument("ExpansionModel: n_max must be >= 2");
  if (n_max > kMaxHermiteDegree) {
    throw std::invalid_argument("ExpansionModel: n_max exceeds max Hermite degree");
  }
}

std::size_t coeff_count(int n_max) {
  return static_cast<std::size_t>(n_max * (n_max + 1) / 2 + n_max - 1 + 1);
}

}  // namespace

double ExpansionModel::coeff(int n, int i) const {
  if (n < 1 || n > n_max || i < 0 || i > n) {
    throw std::out_of_range("ExpansionModel::coeff: bad (n, i)");
  }
  return coefficients[index(n, i)];
}

void ExpansionModel::set_coeff(int n, int i, double value) {
  if (n < 1 || n > n_max || i < 0 || i > n) {
    throw std::out_of_range("ExpansionModel::set_coeff: bad (n, i)");
  }
  coefficients[index(n, i)] = value;
}

ExpansionModel ExpansionModel::zeros(int n_max, double rho) {
  check_model_shape(n_max, rho);
  ExpansionModel m;
  m.n_max = n_max;
  m.rho = rho;
  m.factors = rotation_factors(rho);
  m.coefficients.assign(coeff_count(n_max), 0.0);
  return m;
}

ExpansionModel estimate_coefficients(const GridDensity& target, double rho, int n_max) {
  if (n_max < 3) throw std::invalid_argument("estimate_coefficients: n_max must be >= 3");
  const CartesianGrid& grid = target.grid;
  if (grid.dim() != 2) throw std::invalid_argument("estimate_coefficients: 2D targets only");
  for (int s : grid.sections) {
    if (s < 50) {
      throw std::invalid_argument("estimate_coefficients: grid too coarse (< 50 sections)");
    }
  }

  ExpansionModel model = ExpansionModel::zeros(n_max, rho);

  std::vector<double> density = target.absolute_values();
  std::size_t n1 = static_cast<std::size_t>(grid.sections[0]);
  std::size_t n2 = static_cast<std::size_t>(grid.sections[1]);
  double w = grid.cell_weight;

  // Per-node rotated coordinates and 1D orthonormal polynomial tables.
  std::vector<double> he1(n1 * n2 * static_cast<std::size_t>(n_max + 1));
  std::vector<double> he2(n1 * n2 * static_cast<std::size_t>(n_max + 1));
  for (std::size_t a = 0; a < n1; ++a) {
    double x1 = grid.coord(0, static_cast<int>(a));
    for (std::size_t b = 0; b < n2; ++b) {
      double x2 = grid.coord(1, static_cast<int>(b));
      double v1, v2;
      model.factors.to_v(x1, x2, v1, v2);
      std::size_t base = (a * n2 + b) * static_cast<std::size_t>(n_max + 1);
      for (int k = 0; k <= n_max; ++k) {
        he1[base + static_cast<std::size_t>(k)] = hermite_orthonormal(k, v1);
        he2[base + static_cast<std::size_t>(k)] = hermite_orthonormal(k, v2);
      }
    }
  }

  double grid_corr = 0.0;
  {
    std::vector<double> terms(n1 * n2);
    for (std::size_t a = 0; a < n1; ++a) {
      double x1 = grid.coord(0, static_cast<int>(a));
      for (std::size_t b = 0; b < n2; ++b) {
        double x2 = grid.coord(1, static_cast<int>(b));
        terms[a * n2 + b] = x1 * x2 * density[a * n2 + b];
      }
    }
    grid_corr = w * pairwise_sum(terms);
  }

  std::vector<double> terms(n1 * n2);
  for (int n = 1; n <= n_max; ++n) {
    for (int i = 0; i <= n; ++i) {
      for (std::size_t f = 0; f < n1 * n2; ++f) {
        std::size_t base = f * static_cast<std::size_t>(n_max + 1);
        terms[f] = he1[base + static_cast<std::size_t>(i)] *
                   he2[base + static_cast<std::size_t>(n - i)] * density[f];
      }
      model.set_coeff(n, i, w * pairwise_sum(terms));
    }
  }

  // Standardized targets carry no degree-1 content; degree 2 vanishes when
  // the weight already carries the target's correlation.
  for (int i = 0; i <= 1; ++i) model.set_coeff(1, i, 0.0);
  if (std::fabs(grid_corr - rho) <= 1e-3) {
    for (int i = 0; i <= 2; ++i) model.set_coeff(2, i, 0.0);
  }
  return model;
}

GridDensity evaluate_expansion(const ExpansionModel& model, const CartesianGrid& grid) {
  if (grid.dim() != 2) throw std::invalid_argument("evaluate_expansion: 2D grids only");
  GridDensity out;
  out.grid = grid;
  out.kind = DensityKind::Ratio;
  out.rho = model.rho;
  out.weight_density = gaussian_weight_2d(grid, model.rho);
  out.values.assign(grid.node_count(), 1.0);

  std::size_t n1 = static_cast<std::size_t>(grid.sections[0]);
  std::size_t n2 = static_cast<std::size_t>(grid.sections[1]);
  int n_max = model.n_max;
  std::vector<double> e1(static_cast<std::size_t>(n_max) + 1);
  std::vector<double> e2(static_cast<std::size_t>(n_max) + 1);
  for (std::size_t a = 0; a < n1; ++a) {
    double x1 = grid.coord(0, static_cast<int>(a));
    for (std::size_t b = 0; b < n2; ++b) {
      double x2 = grid.coord(1, static_cast<int>(b));
      double v1, v2;
      model.factors.to_v(x1, x2, v1, v2);
      for (int k = 0; k <= n_max; ++k) {
        e1[static_cast<std::size_t>(k)] = hermite_orthonormal(k, v1);
        e2[static_cast<std::size_t>(k)] = hermite_orthonormal(k, v2);
      }
      double acc = 1.0;
      for (int n = 1; n <= n_max; ++n) {
        for (int i = 0; i <= n; ++i) {
          double m = model.coefficients[ExpansionModel::index(n, i)];
          if (m != 0.0) acc += m * e1[static_cast<std::size_t>(i)] * e2[static_cast<std::size_t>(n - i)];
        }
      }
      out.values[a * n2 + b] = acc;
    }
  }
  return out;
}

bool has_negative_region(const GridDensity& gd) {
  for (double v : gd.values) {
    if (v < 0.0) return true;
  }
  return false;
}

ScaledCoefficients scale_coefficients(const ExpansionModel& model) {
  ScaledCoefficients s;
  s.n_max = model.n_max;
  double fact = 2.0;  // 2! entering the loop at i = 3
  for (int i = 3; i <= model.n_max; ++i) {
    fact *= i;
    s.values.push_back(fact * model.coeff(i, 0));
  }
  return s;
}

ExpansionModel unscale_coefficients(const ScaledCoefficients& scaled, int n_max, double rho) {
  if (n_max < 3 || static_cast<int>(scaled.values.size()) != n_max - 2) {
    throw std::invalid_argument("unscale_coefficients: size mismatch with n_max");
  }
  ExpansionModel m = ExpansionModel::zeros(n_max, rho);
  double fact = 2.0;
  for (int i = 3; i <= n_max; ++i) {
    fact *= i;
    m.set_coeff(i, 0, scaled.values[static_cast<std::size_t>(i - 3)] / fact);
  }
  return m;
}

std::string expansion_to_json(const ExpansionModel& model) {
  nlohmann::json j;
  j["n_max"] = model.n_max;
  j["rho"] = model.rho;
  auto& coeffs = j["coefficients"] = nlohmann::json::array();
  for (int n = 1; n <= model.n_max; ++n) {
    for (int i = 0; i <= n; ++i) {
      coeffs.push_back({n, i, model.coeff(n, i)});
    }
  }
  return j.dump(2);
}

ExpansionModel expansion_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExpansionModel m = ExpansionModel::zeros(j.at("n_max").get<int>(), j.at("rho").get<double>());
  for (const auto& row : j.at("coefficients")) {
    m.set_coeff(row.at(0).get<int>(), row.at(1).get<int>(), row.at(2).get<double>());
  }
  return m;
}

}  // namespace hermicop
