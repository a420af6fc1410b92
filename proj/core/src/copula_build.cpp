#include "hermicop/copula_build.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hermicop/normal.hpp"

namespace hermicop {

double DiscreteMarginal::cdf(double x) const {
  if (x <= low) return 0.0;
  if (x >= high) return 1.0;
  auto cell = static_cast<std::size_t>((x - low) / delta);
  cell = std::min(cell, cdf_edges.size() - 1);
  double left = cell == 0 ? 0.0 : cdf_edges[cell - 1];
  double right = cdf_edges[cell];
  double t = (x - (low + static_cast<double>(cell) * delta)) / delta;
  return left + t * (right - left);
}

double DiscreteMarginal::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("DiscreteMarginal::quantile: u must lie in (0, 1)");
  }
  auto it = std::lower_bound(cdf_edges.begin(), cdf_edges.end(), u);
  if (it == cdf_edges.end()) return high;
  auto cell = static_cast<std::size_t>(it - cdf_edges.begin());
  double left = cell == 0 ? 0.0 : cdf_edges[cell - 1];
  double right = cdf_edges[cell];
  double x_left = low + static_cast<double>(cell) * delta;
  if (right - left <= 0.0) return x_left;
  return x_left + delta * (u - left) / (right - left);
}

double inverse_cdf(const DiscreteMarginal& m, double u) { return m.quantile(u); }

DiscreteMarginal marginal_from_density(const GridDensity& density, int axis) {
  const CartesianGrid& grid = density.grid;
  if (axis < 0 || axis >= grid.dim()) {
    throw std::invalid_argument("marginal_from_density: axis out of range");
  }
  std::vector<double> abs = density.absolute_values();
  double mass = grid.cell_weight * pairwise_sum(abs);
  if (std::fabs(mass - 1.0) > 1e-3) {
    throw std::invalid_argument("marginal_from_density: density mass " +
                                std::to_string(mass) + " deviates from 1 beyond 1e-3");
  }
  for (double v : abs) {
    if (v < -1e-9) {
      throw std::invalid_argument("marginal_from_density: density has negative values");
    }
  }

  DiscreteMarginal m;
  m.low = grid.low[static_cast<std::size_t>(axis)];
  m.high = grid.high[static_cast<std::size_t>(axis)];
  m.delta = grid.delta[static_cast<std::size_t>(axis)];
  auto slices = static_cast<std::size_t>(grid.sections[static_cast<std::size_t>(axis)]);
  m.coords.resize(slices);
  for (std::size_t j = 0; j < slices; ++j) m.coords[j] = grid.coord(axis, static_cast<int>(j));

  // density per slice: sum of cell masses over the other axes, divided by
  // the slice width.
  double other_weight = grid.cell_weight / m.delta;
  m.density.assign(slices, 0.0);
  std::vector<int> idx(static_cast<std::size_t>(grid.dim()));
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    grid.unflatten(f, idx);
    m.density[static_cast<std::size_t>(idx[static_cast<std::size_t>(axis)])] +=
        other_weight * std::max(abs[f], 0.0);
  }

  m.cdf_edges.resize(slices);
  double acc = 0.0;
  for (std::size_t j = 0; j < slices; ++j) {
    acc += m.density[j] * m.delta;
    m.cdf_edges[j] = acc;
  }
  m.raw_mass = acc;
  if (acc <= 0.0) {
    throw std::invalid_argument("marginal_from_density: zero total mass");
  }
  for (std::size_t j = 0; j < slices; ++j) {
    m.cdf_edges[j] /= acc;
    m.density[j] /= acc;
  }
  m.cdf_edges.back() = 1.0;
  return m;
}

std::vector<DiscreteMarginal> marginals_from_density(const GridDensity& density) {
  std::vector<DiscreteMarginal> out;
  for (int d = 0; d < density.grid.dim(); ++d) out.push_back(marginal_from_density(density, d));
  return out;
}

HermiteCopula HermiteCopula::build(GridDensity corrected, ExpansionModel source) {
  if (corrected.grid.dim() != 2) {
    throw std::invalid_argument("HermiteCopula::build: 2D densities only");
  }
  HermiteCopula c;
  c.density_ = std::move(corrected);
  c.density_.values = c.density_.absolute_values();
  c.density_.kind = DensityKind::Absolute;
  c.model_ = std::move(source);

  auto marginals = marginals_from_density(c.density_);
  c.marginals_[0] = std::move(marginals[0]);
  c.marginals_[1] = std::move(marginals[1]);

  const CartesianGrid& g = c.density_.grid;
  auto n1 = static_cast<std::size_t>(g.sections[0]);
  auto n2 = static_cast<std::size_t>(g.sections[1]);
  c.cum_.assign((n1 + 1) * (n2 + 1), 0.0);
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = 0; b < n2; ++b) {
      double mass = g.cell_weight * std::max(c.density_.values[a * n2 + b], 0.0);
      c.cum_[(a + 1) * (n2 + 1) + (b + 1)] = c.cum_[a * (n2 + 1) + (b + 1)] +
                                             c.cum_[(a + 1) * (n2 + 1) + b] -
                                             c.cum_[a * (n2 + 1) + b] + mass;
    }
  }
  double total = c.cum_.back();
  if (total <= 0.0) throw std::invalid_argument("HermiteCopula::build: zero total mass");
  for (double& v : c.cum_) v /= total;
  return c;
}

double HermiteCopula::cum_at(double x1, double x2) const {
  const CartesianGrid& g = density_.grid;
  auto n1 = static_cast<std::size_t>(g.sections[0]);
  auto n2 = static_cast<std::size_t>(g.sections[1]);

  auto locate = [&](int d, double x, std::size_t n) {
    double t = (x - g.low[static_cast<std::size_t>(d)]) / g.delta[static_cast<std::size_t>(d)];
    if (t < 0.0) {
      clamped_ = true;
      t = 0.0;
    }
    if (t > static_cast<double>(n)) {
      clamped_ = true;
      t = static_cast<double>(n);
    }
    auto cell = std::min(static_cast<std::size_t>(t), n - 1);
    return std::pair<std::size_t, double>(cell, t - static_cast<double>(cell));
  };

  auto [a, ta] = locate(0, x1, n1);
  auto [b, tb] = locate(1, x2, n2);
  double c00 = cum_[a * (n2 + 1) + b];
  double c01 = cum_[a * (n2 + 1) + b + 1];
  double c10 = cum_[(a + 1) * (n2 + 1) + b];
  double c11 = cum_[(a + 1) * (n2 + 1) + b + 1];
  return (1.0 - ta) * ((1.0 - tb) * c00 + tb * c01) + ta * ((1.0 - tb) * c10 + tb * c11);
}

double HermiteCopula::cdf(double u1, double u2) const {
  if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0)) {
    throw std::domain_error("HermiteCopula::cdf: arguments must lie in (0, 1)");
  }
  return cum_at(marginals_[0].quantile(u1), marginals_[1].quantile(u2));
}

double HermiteCopula::density(double u1, double u2) const {
  if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0)) {
    throw std::domain_error("HermiteCopula::density: arguments must lie in (0, 1)");
  }
  double x1 = marginals_[0].quantile(u1);
  double x2 = marginals_[1].quantile(u2);

  const CartesianGrid& g = density_.grid;
  auto n1 = static_cast<std::size_t>(g.sections[0]);
  auto n2 = static_cast<std::size_t>(g.sections[1]);
  // bilinear between midpoints, clamped at the border cells
  auto locate = [&](int d, double x, std::size_t n) {
    double t = (x - g.coord(d, 0)) / g.delta[static_cast<std::size_t>(d)];
    t = std::clamp(t, 0.0, static_cast<double>(n - 1));
    auto cell = std::min(static_cast<std::size_t>(t), n - 2);
    return std::pair<std::size_t, double>(cell, t - static_cast<double>(cell));
  };
  auto [a, ta] = locate(0, x1, n1);
  auto [b, tb] = locate(1, x2, n2);
  auto at = [&](std::size_t i, std::size_t j) { return density_.values[i * n2 + j]; };
  double p = (1.0 - ta) * ((1.0 - tb) * at(a, b) + tb * at(a, b + 1)) +
             ta * ((1.0 - tb) * at(a + 1, b) + tb * at(a + 1, b + 1));

  auto marginal_at = [&](const DiscreteMarginal& m, double x) {
    double t = (x - m.coords.front()) / m.delta;
    t = std::clamp(t, 0.0, static_cast<double>(m.coords.size() - 1));
    auto cell = std::min(static_cast<std::size_t>(t), m.coords.size() - 2);
    double frac = t - static_cast<double>(cell);
    return (1.0 - frac) * m.density[cell] + frac * m.density[cell + 1];
  };
  double g1 = marginal_at(marginals_[0], x1);
  double g2 = marginal_at(marginals_[1], x2);
  if (g1 <= 0.0 || g2 <= 0.0) return 0.0;
  return std::max(p, 0.0) / (g1 * g2);
}

double HermiteCopula::integrate(const std::function<double(double, double)>& payoff,
                                const std::function<double(double)>& quantile1,
                                const std::function<double(double)>& quantile2) const {
  const CartesianGrid& g = density_.grid;
  auto n1 = static_cast<std::size_t>(g.sections[0]);
  auto n2 = static_cast<std::size_t>(g.sections[1]);
  const RotationFactors& rot = model_.factors;

  // ratio form of the corrected density, interpolated at x = Gamma v
  std::vector<double> ratio(density_.values.size());
  for (std::size_t f = 0; f < ratio.size(); ++f) {
    ratio[f] = density_.values[f] / density_.weight_density[f];
  }
  auto ratio_at = [&](double x1, double x2) {
    double t1 = (x1 - g.coord(0, 0)) / g.delta[0];
    double t2 = (x2 - g.coord(1, 0)) / g.delta[1];
    t1 = std::clamp(t1, 0.0, static_cast<double>(n1 - 1));
    t2 = std::clamp(t2, 0.0, static_cast<double>(n2 - 1));
    auto a = std::min(static_cast<std::size_t>(t1), n1 - 2);
    auto b = std::min(static_cast<std::size_t>(t2), n2 - 2);
    double ta = t1 - static_cast<double>(a);
    double tb = t2 - static_cast<double>(b);
    auto at = [&](std::size_t i, std::size_t j) { return ratio[i * n2 + j]; };
    return (1.0 - ta) * ((1.0 - tb) * at(a, b) + tb * at(a, b + 1)) +
           ta * ((1.0 - tb) * at(a + 1, b) + tb * at(a + 1, b + 1));
  };

  std::vector<double> terms(n1 * n2);
  for (std::size_t a = 0; a < n1; ++a) {
    double v1 = g.coord(0, static_cast<int>(a));
    double pdf1 = norm_pdf(v1);
    for (std::size_t b = 0; b < n2; ++b) {
      double v2 = g.coord(1, static_cast<int>(b));
      double x1, x2;
      rot.to_x(v1, v2, x1, x2);
      double u1 = std::clamp(marginals_[0].cdf(x1), 1e-12, 1.0 - 1e-12);
      double u2 = std::clamp(marginals_[1].cdf(x2), 1e-12, 1.0 - 1e-12);
      double value = payoff(quantile1(u1), quantile2(u2));
      if (!std::isfinite(value)) {
        throw std::domain_error("HermiteCopula::integrate: payoff not finite at node");
      }
      terms[a * n2 + b] = value * ratio_at(x1, x2) * pdf1 * norm_pdf(v2);
    }
  }
  return g.cell_weight * pairwise_sum(terms);
}

}  // namespace hermicop
