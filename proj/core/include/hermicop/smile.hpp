#pragma once

#include <string>
#include <vector>

#include "hermicop/copula_build.hpp"

namespace hermicop {

/// FX pillar quotes for one pair and tenor. Vols are annualized decimals
/// (0.10 = 10%); discount factors are for the quote (dom) and base (for)
/// currencies.
struct SmilePillars {
  double tenor = 0.0;    ///< years
  double forward = 0.0;  ///< outright forward
  double df_dom = 1.0;
  double df_for = 1.0;
  double atm = 0.0;
  double c25 = 0.0;
  double p25 = 0.0;
  double c10 = 0.0;
  double p10 = 0.0;

  double vol(int pillar_index) const;  // order: p10, p25, atm, c25, c10
};

enum class Pillar { Put10, Put25, Atm, Call25, Call10 };

/// Strike for a forward-delta quote without premium adjustment; ATM is the
/// delta-neutral straddle K = F exp(sigma^2 T / 2).
double delta_to_strike(const SmilePillars& p, Pillar pillar);

/// Strike solving forward delta = delta at the given vol.
double strike_for_delta(double forward, double sigma, double tenor, double delta,
                        bool is_call);

double black_call(double strike, double forward, double sigma, double tenor, double df);
double black_put(double strike, double forward, double sigma, double tenor, double df);

/// Safeguarded Newton inversion of the Black formula to 1e-12. Throws
/// std::domain_error for prices outside the no-arbitrage bounds.
double implied_vol(double price, double strike, double forward, double tenor,
                   double df, bool is_put);

/// Risk-neutral smile curve: a C1 piecewise-cubic implied-vol function of
/// log-moneyness with flat wings beyond the 10-delta strikes, plus the
/// log-rate density/CDF extracted from it. Immutable once built.
class SmileCurve {
 public:
  double tenor() const { return tenor_; }
  double forward() const { return forward_; }
  double df_dom() const { return df_dom_; }
  double df_for() const { return df_for_; }
  double x_lo() const { return marginal_.low; }
  double x_hi() const { return marginal_.high; }

  double vol_at_strike(double strike) const;
  double call_price(double strike) const;  // discounted, off the vol curve
  double put_price(double strike) const;

  /// CDF of the log-rate at maturity under the quote-currency measure,
  /// piecewise linear between grid cell edges.
  double rn_cdf(double x) const;
  /// Monotone inverse of rn_cdf.
  double rn_quantile(double u) const;
  /// Cell-average density of the log-rate.
  double density(double x) const;

  const DiscreteMarginal& marginal() const { return marginal_; }
  const SmilePillars& pillars() const { return pillars_; }
  bool density_was_clipped() const { return density_clipped_; }

  /// Mean and standard deviation of the log-rate by grid quadrature.
  double log_mean() const;
  double log_sd() const;

  friend SmileCurve build_curve(const SmilePillars& p, int grid_size);

 private:
  double tenor_ = 0.0, forward_ = 0.0, df_dom_ = 1.0, df_for_ = 1.0;
  SmilePillars pillars_;
  DiscreteMarginal marginal_;  // in x = log-rate
  bool density_clipped_ = false;
  // clamped cubic vol spline in y = log(K/F)
  std::vector<double> knot_y_, knot_vol_, knot_m_;
  double vol_at_y(double y) const;
  double dvol_dy(double y) const;
};

/// Build the curve through the five pillar points. Checks that the pillar
/// call prices are strictly convex and decreasing in strike before
/// interpolating; violations are reported naming the offending pair.
/// The density grid has grid_size cells over the 1e-6 wing quantile range.
SmileCurve build_curve(const SmilePillars& p, int grid_size = 4000);

/// Pillars of the inverse currency pair: forward inverted, calls and puts
/// swapped at reciprocal strikes, discount factors exchanged.
SmilePillars invert_pair(const SmilePillars& p);

}  // namespace hermicop
