#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hermicop/copulas.hpp"
#include "hermicop/normal.hpp"
#include "hermicop/quadrature.hpp"
#include "test_support.hpp"

using namespace hermicop;
using testsupport::rng;

namespace {

const CopulaFamily kFamilies[5] = {CopulaFamily::Clayton, CopulaFamily::Frank,
                                   CopulaFamily::Gumbel, CopulaFamily::Plackett,
                                   CopulaFamily::Gauss};

ClassicalCopula spearman06(CopulaFamily f) {
  return make_copula(f, spearman_to_theta(f, 0.6));
}

}  // namespace

TEST_CASE("parameter domains are enforced") {
  CHECK_THROWS_AS(make_copula(CopulaFamily::Clayton, -0.5), std::domain_error);
  CHECK_THROWS_AS(make_copula(CopulaFamily::Frank, 0.0), std::domain_error);
  CHECK_THROWS_AS(make_copula(CopulaFamily::Gumbel, 0.9), std::domain_error);
  CHECK_THROWS_AS(make_copula(CopulaFamily::Plackett, -1.0), std::domain_error);
  CHECK_THROWS_AS(make_copula(CopulaFamily::Gauss, 1.0), std::domain_error);
}

TEST_CASE("cdf boundary behaviour") {
  ClassicalCopula clayton = make_copula(CopulaFamily::Clayton, 2.0);
  CHECK(copula_cdf(clayton, 0.5, 1.0) == 0.5);
  CHECK(copula_cdf(clayton, 0.5, 0.0) == 0.0);
  CHECK(copula_cdf(clayton, 0.0, 0.3) == 0.0);
  CHECK(copula_cdf(clayton, 1.0, 0.3) == 0.3);

  ClassicalCopula indep = make_copula(CopulaFamily::Gauss, 0.0);
  for (double u : {0.1, 0.4, 0.9}) {
    for (double v : {0.2, 0.7}) {
      CHECK(copula_cdf(indep, u, v) == doctest::Approx(u * v).epsilon(1e-14));
    }
  }

  // Frank value from the table-fitted 3M parameter, against the raw formula
  double theta = 3.0926;
  ClassicalCopula frank = make_copula(CopulaFamily::Frank, theta);
  double direct = -std::log(1.0 + std::pow(std::exp(-theta / 2.0) - 1.0, 2) /
                                      (std::exp(-theta) - 1.0)) /
                  theta;
  CHECK(copula_cdf(frank, 0.5, 0.5) == doctest::Approx(direct).epsilon(1e-13));

  CHECK_THROWS_AS(copula_cdf(clayton, -0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(copula_cdf(clayton, 0.5, 1.1), std::domain_error);
}

TEST_CASE("density against finite differences of the cdf") {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (CopulaFamily f : kFamilies) {
    ClassicalCopula c = spearman06(f);
    for (int trial = 0; trial < 50; ++trial) {
      double u1 = u(rng()), u2 = u(rng());
      double h = 1e-4;
      double fd = (copula_cdf(c, u1 + h, u2 + h) - copula_cdf(c, u1 + h, u2 - h) -
                   copula_cdf(c, u1 - h, u2 + h) + copula_cdf(c, u1 - h, u2 - h)) /
                  (4.0 * h * h);
      CHECK(copula_density(c, u1, u2) == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("density integrates to one") {
  for (CopulaFamily f : kFamilies) {
    ClassicalCopula c = spearman06(f);
    double mass = testsupport::unit_square_integral(
        [&](double u1, double u2) { return copula_density(c, u1, u2); });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  }
  ClassicalCopula indep = make_copula(CopulaFamily::Gauss, 0.0);
  CHECK(copula_density(indep, 0.3, 0.8) == 1.0);
  CHECK_THROWS_AS(copula_density(indep, 0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(copula_density(indep, 0.5, 1.0), std::domain_error);
}

TEST_CASE("spearman inversion") {
  CHECK(std::fabs(spearman_to_theta(CopulaFamily::Gauss, 0.0)) < 1e-6);

  // Gauss closed form: theta = 2 sin(pi * rho_s / 6)
  double theta = spearman_to_theta(CopulaFamily::Gauss, 0.6);
  CHECK(theta == doctest::Approx(2.0 * std::sin(std::numbers::pi * 0.1)).epsilon(1e-5));

  for (CopulaFamily f : kFamilies) {
    double t = spearman_to_theta(f, 0.6);
    CHECK(spearman_rho(make_copula(f, t)) == doctest::Approx(0.6).epsilon(1e-4));
  }

  CHECK_THROWS_AS(spearman_to_theta(CopulaFamily::Clayton, -0.4), std::domain_error);
  CHECK_THROWS_AS(spearman_to_theta(CopulaFamily::Gumbel, -0.2), std::domain_error);
}

TEST_CASE("clayton spearman 0.6 reproduces the product moment 0.611") {
  ClassicalCopula clayton = spearman06(CopulaFamily::Clayton);
  CartesianGrid grid = build_grid({{-6.0, 6.0}, {-6.0, 6.0}}, {200, 200});
  auto n2 = static_cast<std::size_t>(grid.sections[1]);
  std::vector<double> terms(grid.node_count());
  for (std::size_t a = 0; a < static_cast<std::size_t>(grid.sections[0]); ++a) {
    double x1 = grid.coord(0, static_cast<int>(a));
    for (std::size_t b = 0; b < n2; ++b) {
      double x2 = grid.coord(1, static_cast<int>(b));
      terms[a * n2 + b] = x1 * x2 * joint_density_normal_marginals(clayton, x1, x2);
    }
  }
  double moment = grid.cell_weight * pairwise_sum(terms);
  CHECK(moment == doctest::Approx(0.611).epsilon(5e-3 / 0.611));
}

TEST_CASE("joint density with normal marginals") {
  ClassicalCopula indep = make_copula(CopulaFamily::Gauss, 0.0);
  for (double x1 : {-1.0, 0.3}) {
    for (double x2 : {0.0, 2.0}) {
      CHECK(joint_density_normal_marginals(indep, x1, x2) ==
            doctest::Approx(norm_pdf(x1) * norm_pdf(x2)).epsilon(1e-12));
    }
  }

  CartesianGrid grid = build_grid({{-6.0, 6.0}, {-6.0, 6.0}}, {200, 200});
  auto n2 = static_cast<std::size_t>(grid.sections[1]);
  ClassicalCopula clayton = spearman06(CopulaFamily::Clayton);
  std::vector<double> density(grid.node_count());
  std::vector<double> terms(grid.node_count());
  for (std::size_t a = 0; a < static_cast<std::size_t>(grid.sections[0]); ++a) {
    double x1 = grid.coord(0, static_cast<int>(a));
    for (std::size_t b = 0; b < n2; ++b) {
      density[a * n2 + b] =
          joint_density_normal_marginals(clayton, x1, grid.coord(1, static_cast<int>(b)));
    }
  }
  double mass = grid.cell_weight * pairwise_sum(density);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));

  // E[X1^3 X2] = 1.818 for the Clayton fit
  for (std::size_t a = 0; a < static_cast<std::size_t>(grid.sections[0]); ++a) {
    double x1 = grid.coord(0, static_cast<int>(a));
    for (std::size_t b = 0; b < n2; ++b) {
      double x2 = grid.coord(1, static_cast<int>(b));
      terms[a * n2 + b] = x1 * x1 * x1 * x2 * density[a * n2 + b];
    }
  }
  double m31 = grid.cell_weight * pairwise_sum(terms);
  CHECK(m31 == doctest::Approx(1.818).epsilon(1e-2 / 1.818));
}

TEST_CASE("two-increasing, Frechet bounds and exchange symmetry") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (CopulaFamily f : kFamilies) {
    ClassicalCopula c = spearman06(f);
    for (int trial = 0; trial < 200; ++trial) {
      double a1 = u(rng()), b1 = u(rng()), a2 = u(rng()), b2 = u(rng());
      if (a1 > b1) std::swap(a1, b1);
      if (a2 > b2) std::swap(a2, b2);
      double rect = copula_cdf(c, b1, b2) - copula_cdf(c, a1, b2) -
                    copula_cdf(c, b1, a2) + copula_cdf(c, a1, a2);
      CHECK(rect >= -1e-12);
    }
    for (int trial = 0; trial < 1000; ++trial) {
      double u1 = u(rng()), u2 = u(rng());
      double v = copula_cdf(c, u1, u2);
      CHECK(v >= std::max(u1 + u2 - 1.0, 0.0) - 1e-12);
      CHECK(v <= std::min(u1, u2) + 1e-12);
      CHECK(v == doctest::Approx(copula_cdf(c, u2, u1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("plackett theta near one degrades to independence") {
  ClassicalCopula c = make_copula(CopulaFamily::Plackett, 1.0 + 1e-8);
  CHECK(copula_cdf(c, 0.3, 0.7) == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(copula_density(c, 0.3, 0.7) == doctest::Approx(1.0).epsilon(1e-12));
}
