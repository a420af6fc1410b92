#include "hermicop/polybasis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hermicop {

namespace {

void check_degree(int n, const char* what) {
  if (n < 0 || n > kMaxHermiteDegree) {
    throw std::out_of_range(std::string(what) + ": degree " + std::to_string(n) +
                            " outside [0, " + std::to_string(kMaxHermiteDegree) + "]");
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double hermite(int n, double x) {
  check_degree(n, "hermite");
  if (n == 0) return 1.0;
  double prev = 1.0;   // He_0
  double cur = x;      // He_1
  for (int k = 1; k < n; ++k) {
    double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_orthonormal(int n, double x) {
  check_degree(n, "hermite_orthonormal");
  return hermite(n, x) / std::sqrt(factorial(n));
}

double tensor_basis_2d(int n, int i, double v1, double v2) {
  if (n < 0 || i < 0 || i > n) {
    throw std::out_of_range("tensor_basis_2d: need 0 <= i <= n, got n=" +
                            std::to_string(n) + " i=" + std::to_string(i));
  }
  return hermite_orthonormal(i, v1) * hermite_orthonormal(n - i, v2);
}

std::vector<double> hermite_shift_expand(int i, double shift) {
  check_degree(i, "hermite_shift_expand");
  std::vector<double> c(static_cast<std::size_t>(i) + 1);
  for (int k = 0; k <= i; ++k) {
    c[static_cast<std::size_t>(k)] = std::sqrt(factorial(i) / factorial(k)) *
                                     std::pow(shift, i - k) / factorial(i - k);
  }
  // pow(0,0) = 1 keeps the zero-shift case the identity.
  return c;
}

double shifted_gaussian_moment(int i, double c) {
  check_degree(i, "shifted_gaussian_moment");
  if (i == 0) return 1.0;
  return std::pow(c, i) / std::sqrt(factorial(i));
}

HermiteTable HermiteTable::build(int max_degree) {
  check_degree(max_degree, "HermiteTable::build");
  HermiteTable t;
  t.max_degree = max_degree;
  t.rows.resize(static_cast<std::size_t>(max_degree) + 1);
  t.rows[0] = {1};
  if (max_degree >= 1) t.rows[1] = {0, 1};
  for (int n = 1; n < max_degree; ++n) {
    const auto& cur = t.rows[static_cast<std::size_t>(n)];
    const auto& prev = t.rows[static_cast<std::size_t>(n - 1)];
    std::vector<std::int64_t> next(static_cast<std::size_t>(n) + 2, 0);
    for (int j = 0; j <= n; ++j) next[static_cast<std::size_t>(j) + 1] += cur[static_cast<std::size_t>(j)];
    for (int j = 0; j <= n - 1; ++j) next[static_cast<std::size_t>(j)] -= static_cast<std::int64_t>(n) * prev[static_cast<std::size_t>(j)];
    t.rows[static_cast<std::size_t>(n) + 1] = std::move(next);
  }
  return t;
}

double HermiteTable::evaluate(int n, double x) const {
  if (n < 0 || n > max_degree) {
    throw std::out_of_range("HermiteTable::evaluate: degree out of table");
  }
  const auto& row = rows[static_cast<std::size_t>(n)];
  double acc = 0.0;
  for (auto it = row.rbegin(); it != row.rend(); ++it) {
    acc = acc * x + static_cast<double>(*it);
  }
  return acc;
}

RotationFactors rotation_factors(double rho) {
  if (!(std::fabs(rho) <= 1.0 - 1e-6)) {
    throw std::domain_error("rotation_factors: |rho| must be <= 1 - 1e-6, got " +
                            std::to_string(rho));
  }
  RotationFactors f;
  f.rho = rho;
  f.alpha1 = std::sqrt(0.5 * (1.0 + rho));
  f.alpha2 = std::sqrt(0.5 * (1.0 - rho));
  f.beta1 = 1.0 / (2.0 * f.alpha1);
  f.beta2 = 1.0 / (2.0 * f.alpha2);
  return f;
}

}  // namespace hermicop
