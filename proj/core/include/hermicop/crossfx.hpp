#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "hermicop/copulas.hpp"
#include "hermicop/correction.hpp"
#include "hermicop/expansion.hpp"
#include "hermicop/smile.hpp"

namespace hermicop {

/// Corrected-Hermite copula choice for pricing: the expansion model plus the
/// discretization the projection and the pricing integral share.
struct HermitePricingSpec {
  ExpansionModel model;
  int sections = 200;
  double halfwidth = 6.0;
  DykstraOptions dykstra{};
};

/// Copula driving the joint law of the two straight-pair log rates.
using CopulaModel = std::variant<ClassicalCopula, HermitePricingSpec>;

/// Everything needed to price cross-pair options: the straight-pair marginal
/// curves X-Z and Y-Z (same tenor), the copula, and the Z-discount /
/// Y-discount / Y-Z spot used for forward checks.
struct CrossSetup {
  SmileCurve xz;
  SmileCurve yz;
  CopulaModel copula;
  double df_z = 1.0;
  double df_y = 1.0;
  double spot_yz = 1.0;
  int classical_nodes = 400;  ///< Gauss-Legendre budget per axis
};

/// Fills discounts and spot from the Y-Z curve's own quote conventions.
CrossSetup make_cross_setup(SmileCurve xz, SmileCurve yz, CopulaModel copula);

/// Pricing engine with the per-parameter setup work (correction, marginal
/// rebuild, quantile maps) done once. Holds references to the setup: the
/// setup must outlive the pricer.
class CrossPricer {
 public:
  explicit CrossPricer(const CrossSetup& setup);
  ~CrossPricer();
  CrossPricer(CrossPricer&&) noexcept;
  CrossPricer& operator=(CrossPricer&&) noexcept;

  /// Z-denominated price of the cross call {e^{x1} - K e^{x2}}_+.
  double call(double strike) const;
  double put(double strike) const;

  /// Black inversion of call(strike) against the quadrature-consistent cross
  /// forward and discount.
  double implied_vol(double strike) const;

  double forward_xz() const;  ///< quadrature E[e^{x1}]
  double forward_yz() const;  ///< quadrature E[e^{x2}]
  double cross_forward() const { return forward_xz() / forward_yz(); }

  const DykstraReport* correction_report() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double price_cross_call(const CrossSetup& setup, double strike);
double price_cross_put(const CrossSetup& setup, double strike);
double cross_implied_vol(const CrossSetup& setup, double strike);

/// Five cross pillars with strikes solved by fixed point against the cross
/// smile itself (<= 20 iterations). Discount fields are filled from the
/// setup's curves. Throws std::runtime_error on a non-convergent fixed point.
SmilePillars cross_smile_pillars(const CrossSetup& setup);

/// Relative error of the Y-leg forward identity: the integral depends on the
/// x2 marginal only, so the result is independent of the copula.
double forward_consistency(const CrossSetup& setup);

/// One-dimensional approximate density of the cross rate driven by the
/// expansion parameters: Lambda(v) = prefactor * sum_k c_k He_k(v)/sqrt(k!),
/// with the normalized density evaluated at the shifted argument.
struct LambdaDiagnostic {
  double sigma = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double nu_xz = 0.0;
  double nu_yz = 0.0;
  double prefactor = 1.0;
  std::vector<double> basis_coefficients;  ///< c_k, k = 0..n_max (c_0 includes the 1)

  double lambda(double v) const;
  /// Normalized density of v2 (bar-Lambda).
  double density(double v2) const;
};

LambdaDiagnostic lambda_diagnostic(const ExpansionModel& model, double sigma,
                                   double nu_xz, double nu_yz);

}  // namespace hermicop
