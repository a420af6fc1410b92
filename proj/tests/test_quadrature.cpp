#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "hermicop/normal.hpp"
#include "hermicop/quadrature.hpp"
#include "test_support.hpp"

using namespace hermicop;
using testsupport::rng;

TEST_CASE("build_grid basics") {
  CartesianGrid g1 = build_grid({{-6.0, 6.0}}, {200});
  CHECK(g1.delta[0] == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(g1.coord(0, 0) == doctest::Approx(-5.97).epsilon(1e-13));
  CHECK(g1.node_count() == 200);

  CartesianGrid g2 = build_grid({{-6.0, 6.0}, {-6.0, 6.0}}, {200, 200});
  CHECK(g2.node_count() == 40000);
  CHECK(g2.cell_weight == doctest::Approx(0.0036).epsilon(1e-14));

  CartesianGrid g3 = build_grid({{0.0, 1.0}}, {2});
  CHECK(g3.coord(0, 0) == doctest::Approx(0.25));
  CHECK(g3.coord(0, 1) == doctest::Approx(0.75));
  CHECK(g3.cell_weight == doctest::Approx(0.5));

  CHECK_THROWS_AS(build_grid({{1.0, 1.0}}, {10}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid({{2.0, 1.0}}, {10}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid({{0.0, 1.0}}, {1}), std::invalid_argument);
}

TEST_CASE("grid flattening order is row-major, last dimension fastest") {
  CartesianGrid g = build_grid({{0.0, 1.0}, {0.0, 1.0}}, {3, 4});
  int idx[2] = {1, 2};
  CHECK(g.flat_index(std::span<const int>(idx, 2)) == 6);
  int back[2];
  g.unflatten(6, std::span<int>(back, 2));
  CHECK(back[0] == 1);
  CHECK(back[1] == 2);
}

TEST_CASE("midpoint inner products against analytic Gaussian values") {
  CartesianGrid g = build_grid({{-6.0, 6.0}}, {200});
  std::vector<double> weight(g.node_count()), one(g.node_count(), 1.0), x(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    x[i] = g.coord(0, static_cast<int>(i));
    weight[i] = norm_pdf(x[i]);
  }
  CHECK(hermicop::inner_product(one, one, weight, g) == doctest::Approx(1.0).epsilon(5e-4));
  CHECK(hermicop::inner_product(x, x, weight, g) == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(std::fabs(hermicop::inner_product(x, one, weight, g)) < 1e-12);

  std::vector<double> bad(g.node_count() - 1, 0.0);
  CHECK_THROWS_AS(hermicop::inner_product(bad, one, weight, g), std::invalid_argument);
}

TEST_CASE("inner_product is symmetric and bilinear") {
  CartesianGrid g = build_grid({{-2.0, 2.0}}, {64});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(g.node_count()), h(g.node_count()), w(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    f[i] = u(rng());
    h[i] = u(rng());
    w[i] = 0.5 + 0.5 * std::fabs(u(rng()));
  }
  CHECK(hermicop::inner_product(f, h, w, g) == hermicop::inner_product(h, f, w, g));

  double a = 1.7, b = -0.3;
  std::vector<double> combo(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) combo[i] = a * f[i] + b * h[i];
  double lhs = hermicop::inner_product(combo, h, w, g);
  double rhs = a * hermicop::inner_product(f, h, w, g) + b * hermicop::inner_product(h, h, w, g);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("doubling sections halves the midpoint error or better") {
  // quartic moment against the exact Gaussian value 3
  auto moment4 = [](int sections) {
    CartesianGrid g = build_grid({{-6.0, 6.0}}, {sections});
    std::vector<double> w(g.node_count()), f(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      double x = g.coord(0, static_cast<int>(i));
      w[i] = norm_pdf(x);
      f[i] = x * x;
    }
    return hermicop::inner_product(f, f, w, g);
  };
  double e4 = std::fabs(moment4(4) - 3.0);
  double e8 = std::fabs(moment4(8) - 3.0);
  double e16 = std::fabs(moment4(16) - 3.0);
  CHECK(e8 <= 0.5 * e4 + 1e-12);
  CHECK(e16 <= 0.5 * e8 + 1e-12);
}

TEST_CASE("gauss-hermite rules") {
  GaussHermiteRule r1 = gauss_hermite_nodes(1);
  CHECK(r1.nodes == std::vector<double>{0.0});
  CHECK(r1.weights == std::vector<double>{1.0});

  GaussHermiteRule r2 = gauss_hermite_nodes(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(r2.nodes[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r2.weights[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(r2.weights[1] == doctest::Approx(0.5).epsilon(1e-13));

  // degree <= 8 moments with 20 nodes: 1, 0, 1, 0, 3, 0, 15, 0, 105
  GaussHermiteRule r20 = gauss_hermite_nodes(20);
  const double moments[9] = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0};
  for (int k = 0; k <= 8; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r20.nodes.size(); ++i) {
      acc += r20.weights[i] * std::pow(r20.nodes[i], k);
    }
    CHECK(std::fabs(acc - moments[k]) < 1e-9);
  }

  CHECK_THROWS_AS(gauss_hermite_nodes(0), std::out_of_range);
  CHECK_THROWS_AS(gauss_hermite_nodes(65), std::out_of_range);

  // n = 64 still integrates low moments exactly
  GaussHermiteRule r64 = gauss_hermite_nodes(64);
  double m2 = 0.0;
  for (std::size_t i = 0; i < r64.nodes.size(); ++i) {
    m2 += r64.weights[i] * r64.nodes[i] * r64.nodes[i];
  }
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("gauss-legendre rules") {
  GaussLegendreRule r = gauss_legendre_nodes(16, 0.0, 1.0);
  double sum_w = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    sum_w += r.weights[i];
    m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
  }
  CHECK(sum_w == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("bivariate gaussian weight") {
  // odd sections place a node exactly at the origin
  CartesianGrid g3 = build_grid({{-6.0, 6.0}, {-6.0, 6.0}}, {3, 3});
  std::vector<double> w0 = gaussian_weight_2d(g3, 0.0);
  CHECK(w0[4] == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
  std::vector<double> w5 = gaussian_weight_2d(g3, 0.5);
  CHECK(w5[4] ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi * std::sqrt(0.75))).epsilon(1e-14));

  CartesianGrid g = build_grid({{-6.0, 6.0}, {-6.0, 6.0}}, {200, 200});
  for (double rho : {0.0, 0.5, -0.8}) {
    std::vector<double> w = gaussian_weight_2d(g, rho);
    double mass = g.cell_weight * pairwise_sum(w);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  }
  CHECK_THROWS_AS(gaussian_weight_2d(g, 1.0), std::domain_error);
}

TEST_CASE("grid density round-trips through CSV plus sidecar") {
  CartesianGrid g = build_grid({{-1.5, 2.0}, {0.0, 1.0}}, {6, 5});
  GridDensity gd;
  gd.grid = g;
  gd.kind = DensityKind::Absolute;
  gd.rho = 0.3;
  gd.weight_density = gaussian_weight_2d(g, 0.3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  gd.values.resize(g.node_count());
  for (double& v : gd.values) v = u(rng());

  auto dir = std::filesystem::temp_directory_path() / "hermicop_test_io";
  std::filesystem::create_directories(dir);
  std::string csv = (dir / "d.csv").string();
  std::string meta = (dir / "d.json").string();
  write_grid_density(gd, csv, meta);
  GridDensity back = read_grid_density(csv, meta);

  CHECK(back.grid.same_shape(gd.grid));
  CHECK(back.rho == gd.rho);
  CHECK(back.kind == gd.kind);
  REQUIRE(back.values.size() == gd.values.size());
  for (std::size_t i = 0; i < gd.values.size(); ++i) CHECK(back.values[i] == gd.values[i]);
}

TEST_CASE("normal distribution support functions") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(6.0) + norm_cdf(-6.0) == doctest::Approx(1.0).epsilon(1e-15));
  std::uniform_real_distribution<double> u(1e-9, 1.0 - 1e-9);
  for (int trial = 0; trial < 200; ++trial) {
    double p = u(rng());
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }

  // bivariate CDF against known identities
  CHECK(binorm_cdf(0.0, 0.0, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(binorm_cdf(0.0, 0.0, 0.5) ==
        doctest::Approx(0.25 + std::asin(0.5) / (2.0 * std::numbers::pi)).epsilon(1e-13));
  // P(X<=x, Y<=inf) = Phi(x)
  CHECK(binorm_cdf(0.7, 8.0, 0.3) == doctest::Approx(norm_cdf(0.7)).epsilon(1e-12));
  // symmetric tail identity at high correlation
  CHECK(binorm_cdf(1.2, 1.2, 0.95) <= norm_cdf(1.2));
  CHECK(binorm_cdf(1.2, 1.2, 0.95) >= 2.0 * norm_cdf(1.2) - 1.0 - 1e-12);
}
