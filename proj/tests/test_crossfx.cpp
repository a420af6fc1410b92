#include <doctest.h>

#include <cmath>
#include <random>

#include "hermicop/crossfx.hpp"
#include "hermicop/normal.hpp"
#include "test_support.hpp"

using namespace hermicop;
using testsupport::rng;

namespace {

SmilePillars flat_pillars(double sigma, double forward, double tenor, double df_dom,
                          double df_for) {
  SmilePillars p;
  p.tenor = tenor;
  p.forward = forward;
  p.df_dom = df_dom;
  p.df_for = df_for;
  p.atm = p.c25 = p.p25 = p.c10 = p.p10 = sigma;
  return p;
}

// flat world: X-Z at 10%, Y-Z at 12%, T = 1
CrossSetup flat_setup(CopulaModel copula) {
  SmileCurve xz = build_curve(flat_pillars(0.10, 1.10, 1.0, 0.98, 0.96));
  SmileCurve yz = build_curve(flat_pillars(0.12, 0.0091, 1.0, 0.98, 0.97));
  CrossSetup s = make_cross_setup(std::move(xz), std::move(yz), std::move(copula));
  return s;
}

HermitePricingSpec zero_hermite(double rho, int n_max = 6) {
  HermitePricingSpec spec;
  spec.model = ExpansionModel::zeros(n_max, rho);
  return spec;
}

double triangular_vol(double s1, double s2, double rho) {
  return std::sqrt(s1 * s1 + s2 * s2 - 2.0 * rho * s1 * s2);
}

}  // namespace

TEST_CASE("flat lognormal world matches the triangular closed form") {
  double expected = triangular_vol(0.10, 0.12, 0.4);

  SUBCASE("classical Gauss path") {
    CrossSetup s = flat_setup(make_copula(CopulaFamily::Gauss, 0.4));
    SmilePillars pillars = cross_smile_pillars(s);
    for (int p = 0; p < 5; ++p) {
      CHECK(std::fabs(pillars.vol(p) - expected) < 1e-3);
    }
    CHECK(pillars.forward == doctest::Approx(1.10 / 0.0091).epsilon(2e-3));
  }

  SUBCASE("zero-coefficient Hermite path") {
    CrossSetup s = flat_setup(zero_hermite(0.4));
    SmilePillars pillars = cross_smile_pillars(s);
    for (int p = 0; p < 5; ++p) {
      CHECK(std::fabs(pillars.vol(p) - expected) < 1e-3);
    }
  }
}

TEST_CASE("both pricing paths agree pillar by pillar") {
  CrossSetup gauss = flat_setup(make_copula(CopulaFamily::Gauss, 0.4));
  CrossSetup hermite = flat_setup(zero_hermite(0.4));
  SmilePillars a = cross_smile_pillars(gauss);
  SmilePillars b = cross_smile_pillars(hermite);
  for (int p = 0; p < 5; ++p) {
    CHECK(std::fabs(a.vol(p) - b.vol(p)) < 1e-3);
  }
}

TEST_CASE("tiny strike degenerates to the X-leg forward") {
  CrossSetup s = flat_setup(make_copula(CopulaFamily::Gauss, 0.4));
  CrossPricer pricer(s);
  double k = 1e-4 * pricer.cross_forward();
  double price = pricer.call(k);
  double expected = s.df_z * pricer.forward_xz() - k * s.df_z * pricer.forward_yz();
  CHECK(price == doctest::Approx(expected).epsilon(1e-3));

  CrossSetup h = flat_setup(zero_hermite(0.4));
  CrossPricer hp(h);
  double hk = 1e-4 * hp.cross_forward();
  CHECK(hp.call(hk) ==
        doctest::Approx(h.df_z * (hp.forward_xz() - hk * hp.forward_yz())).epsilon(1e-3));
}

TEST_CASE("put-call parity under both quadratures") {
  for (bool hermite : {false, true}) {
    CrossSetup s = hermite ? flat_setup(zero_hermite(0.25))
                           : flat_setup(make_copula(CopulaFamily::Gauss, 0.25));
    CrossPricer pricer(s);
    double f = pricer.cross_forward();
    for (double k : {0.85 * f, f, 1.2 * f}) {
      double lhs = pricer.call(k) - pricer.put(k);
      double rhs = s.df_z * (pricer.forward_xz() - k * pricer.forward_yz());
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-3));
    }
  }
}

TEST_CASE("call prices are decreasing and convex in strike") {
  CrossSetup s = flat_setup(make_copula(CopulaFamily::Clayton, 1.2));
  CrossPricer pricer(s);
  double f = pricer.cross_forward();
  std::vector<double> ks, ps;
  for (int i = 0; i <= 8; ++i) {
    ks.push_back(f * (0.8 + 0.05 * i));
    ps.push_back(pricer.call(ks.back()));
  }
  for (std::size_t i = 1; i < ps.size(); ++i) CHECK(ps[i] < ps[i - 1] + 1e-12);
  for (std::size_t i = 1; i + 1 < ps.size(); ++i) {
    CHECK(ps[i + 1] - 2.0 * ps[i] + ps[i - 1] >= -1e-10);
  }
}

TEST_CASE("forward consistency is a marginal identity") {
  CrossSetup a = flat_setup(make_copula(CopulaFamily::Gauss, 0.1));
  CrossSetup b = flat_setup(make_copula(CopulaFamily::Gauss, 0.7));
  CrossSetup c = flat_setup(make_copula(CopulaFamily::Frank, 4.0));
  double ea = forward_consistency(a);
  double eb = forward_consistency(b);
  double ec = forward_consistency(c);
  CHECK(ea < 1e-3);
  // the integral depends on the x2 marginal only
  CHECK(std::fabs(ea - eb) < 1e-10);
  CHECK(std::fabs(ea - ec) < 1e-10);

  // corrected Hermite setup
  HermitePricingSpec spec = zero_hermite(0.3661);
  ScaledCoefficients sc;
  sc.n_max = 6;
  sc.values = {-0.3535, 0.9641, 0.0827, -2.0537};
  spec.model = unscale_coefficients(sc, 6, 0.3661);
  CrossSetup h = flat_setup(spec);
  CHECK(forward_consistency(h) < 2e-3);
}

TEST_CASE("hermite smile responds to the scaled coefficients") {
  // Table-5-like parameter point: the model must produce a skewed smile
  ScaledCoefficients sc;
  sc.n_max = 6;
  sc.values = {-0.3535, 0.9641, 0.0827, -2.0537};
  HermitePricingSpec spec;
  spec.model = unscale_coefficients(sc, 6, 0.3661);
  CrossSetup s = flat_setup(spec);
  CrossPricer pricer(s);
  const DykstraReport* rep = pricer.correction_report();
  REQUIRE(rep != nullptr);
  CHECK(rep->converged);

  SmilePillars pillars = cross_smile_pillars(s);
  double base = triangular_vol(0.10, 0.12, 0.3661);
  // ATM lands near the triangular level, wings deviate visibly
  CHECK(std::fabs(pillars.atm - base) < 0.02);
  double skew = pillars.p10 - pillars.c10;
  CHECK(std::fabs(skew) > 5e-4);
}

TEST_CASE("lambda diagnostic") {
  SUBCASE("all coefficients zero give a shifted normal") {
    ExpansionModel zero = ExpansionModel::zeros(6, 0.5);
    LambdaDiagnostic d = lambda_diagnostic(zero, 0.1, 0.0, -0.05);
    REQUIRE(d.basis_coefficients.size() == 7);
    CHECK(d.basis_coefficients[0] == 1.0);
    for (std::size_t k = 1; k < d.basis_coefficients.size(); ++k) {
      CHECK(d.basis_coefficients[k] == 0.0);
    }
    for (double v : {-1.0, 0.0, 0.7, 2.2}) {
      CHECK(d.density(v) ==
            doctest::Approx(norm_pdf(v - 0.1 * d.alpha2)).epsilon(1e-12));
    }
  }

  SUBCASE("summation-order oracle") {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (double rho : {-0.999998, 0.0, 0.5}) {
      ExpansionModel m = ExpansionModel::zeros(6, rho);
      for (int n = 3; n <= 6; ++n) {
        for (int i = 0; i <= n; ++i) m.set_coeff(n, i, u(rng()));
      }
      double sigma = 0.13;
      LambdaDiagnostic d = lambda_diagnostic(m, sigma, 0.01, -0.02);

      // independent route: accumulate the triple sum in (n, i, k) order
      std::vector<double> oracle(7, 0.0);
      auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
      };
      for (int n = 3; n <= 6; ++n) {
        for (int i = 0; i <= n; ++i) {
          for (int k = 0; k <= n - i; ++k) {
            oracle[static_cast<std::size_t>(k)] +=
                m.coeff(n, i) * std::sqrt(fact(n - i) / (fact(i) * fact(k))) *
                std::pow(sigma, n - k) * std::pow(d.alpha1, i) *
                std::pow(d.alpha2, n - i - k) / fact(n - i - k);
          }
        }
      }
      oracle[0] += 1.0;
      for (std::size_t k = 0; k < oracle.size(); ++k) {
        CHECK(d.basis_coefficients[k] ==
              doctest::Approx(oracle[k]).epsilon(1e-12));
      }

      // at alpha1 -> 0 only the i = 0 column survives
      if (rho < -0.99) {
        std::vector<double> diag(7, 0.0);
        for (int k = 0; k <= 6; ++k) {
          for (int n = std::max(3, k); n <= 6; ++n) {
            diag[static_cast<std::size_t>(k)] += m.coeff(n, 0) *
                                                 std::sqrt(fact(n) / fact(k)) *
                                                 std::pow(sigma, n - k) *
                                                 std::pow(d.alpha2, n - k) / fact(n - k);
          }
        }
        diag[0] += 1.0;
        for (std::size_t k = 0; k < diag.size(); ++k) {
          CHECK(std::fabs(d.basis_coefficients[k] - diag[k]) < 1e-2);
        }
      }
    }
  }

  SUBCASE("positive He3 weight skews the cross rate to the left") {
    ExpansionModel m = ExpansionModel::zeros(6, 0.5);
    m.set_coeff(3, 0, 1.0 / std::sqrt(6.0));  // unit He3 weight
    double sigma = 0.1;
    LambdaDiagnostic d = lambda_diagnostic(m, sigma, 0.0, 0.0);

    // moments of the cross log-rate s = -2 sigma alpha2 v2 + const under the
    // diagnostic density, by fine-grid quadrature
    double h = 16.0 / 20000.0;
    double m0 = 0.0, m1 = 0.0;
    for (int i = 0; i < 20000; ++i) {
      double v2 = -8.0 + (i + 0.5) * h;
      double w = d.density(v2) * h;
      m0 += w;
      m1 += w * (-2.0 * sigma * d.alpha2 * v2);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-6));
    double mu = m1 / m0;
    double m3 = 0.0, m2 = 0.0;
    for (int i = 0; i < 20000; ++i) {
      double v2 = -8.0 + (i + 0.5) * h;
      double s = -2.0 * sigma * d.alpha2 * v2 - mu;
      double w = d.density(v2) * h;
      m2 += w * s * s;
      m3 += w * s * s * s;
    }
    double skew = m3 / std::pow(m2, 1.5);
    CHECK(skew < -0.05);
  }
}

TEST_CASE("cross density shape is driven by the diagonal coefficients") {
  // unit shifts of m(3,1)/m(4,1) move the diagnostic cross density far less
  // than unit shifts of m(3,0)/m(4,0): their channels carry sigma * alpha1
  double sigma = 0.1;

  auto density_distance = [&](int n, int i) {
    ExpansionModel m = ExpansionModel::zeros(6, 0.5);
    m.set_coeff(n, i, 1.0);
    LambdaDiagnostic shifted = lambda_diagnostic(m, sigma, 0.0, 0.0);
    LambdaDiagnostic gauss =
        lambda_diagnostic(ExpansionModel::zeros(6, 0.5), sigma, 0.0, 0.0);
    double acc = 0.0;
    double h = 16.0 / 4000.0;
    for (int j = 0; j < 4000; ++j) {
      double v = -8.0 + (j + 0.5) * h;
      acc += std::fabs(shifted.density(v) - gauss.density(v)) * h;
    }
    return acc;
  };

  double d30 = density_distance(3, 0), d31 = density_distance(3, 1);
  double d40 = density_distance(4, 0), d41 = density_distance(4, 1);
  CHECK(d31 < 0.25 * d30);
  CHECK(d41 < 0.25 * d40);
  // the remaining off-diagonal parameters sit even closer to the Gauss line
  CHECK(density_distance(3, 2) < 0.25 * d30);
  CHECK(density_distance(4, 3) < 0.25 * d40);
}
