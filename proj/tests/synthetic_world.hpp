#pragma once

#include "hermicop/calibration.hpp"

namespace testsupport {

inline hermicop::SmilePillars make_flat_pillars(double sigma, double forward,
                                                double tenor, double df_dom,
                                                double df_for) {
  hermicop::SmilePillars p;
  p.tenor = tenor;
  p.forward = forward;
  p.df_dom = df_dom;
  p.df_for = df_for;
  p.atm = p.c25 = p.p25 = p.c10 = p.p10 = sigma;
  return p;
}

/// ATM plus risk-reversal / butterfly quotes, the market's smile parameters.
inline hermicop::SmilePillars make_smile_pillars(double atm, double rr25, double bf25,
                                                 double rr10, double bf10,
                                                 double forward, double tenor,
                                                 double df_dom, double df_for) {
  hermicop::SmilePillars p;
  p.tenor = tenor;
  p.forward = forward;
  p.df_dom = df_dom;
  p.df_for = df_for;
  p.atm = atm;
  p.c25 = atm + bf25 + 0.5 * rr25;
  p.p25 = atm + bf25 - 0.5 * rr25;
  p.c10 = atm + bf10 + 0.5 * rr10;
  p.p10 = atm + bf10 - 0.5 * rr10;
  return p;
}

/// EURUSD-like X-Z pillars.
inline hermicop::SmilePillars world_xz(double atm = 0.095) {
  return make_smile_pillars(atm, -0.010, 0.0025, -0.018, 0.008, 1.08, 1.0, 0.98, 0.96);
}

/// JPYUSD-like Y-Z pillars (already inverted to Y-Z quoting).
inline hermicop::SmilePillars world_yz(double atm = 0.115) {
  return make_smile_pillars(atm, 0.012, 0.003, 0.022, 0.009, 0.0091, 1.0, 0.98, 0.97);
}

/// Cross pillars generated by a known copula over the given straight curves.
inline hermicop::SmilePillars true_cross_smile(const hermicop::SmileCurve& xz,
                                               const hermicop::SmileCurve& yz,
                                               const hermicop::CopulaModel& copula,
                                               int classical_nodes = 200) {
  hermicop::CrossSetup setup = hermicop::make_cross_setup(xz, yz, copula);
  setup.classical_nodes = classical_nodes;
  return hermicop::cross_smile_pillars(setup);
}

/// Hermite pricing model from scaled coefficients.
inline hermicop::HermitePricingSpec hermite_model(double rho,
                                                  std::vector<double> m_check) {
  hermicop::ScaledCoefficients sc;
  sc.n_max = static_cast<int>(m_check.size()) + 2;
  sc.values = std::move(m_check);
  hermicop::HermitePricingSpec spec;
  spec.model = hermicop::unscale_coefficients(sc, sc.n_max, rho);
  return spec;
}

}  // namespace testsupport
