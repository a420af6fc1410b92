#pragma once

namespace hermicop {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF, accurate to full double precision via erfc.
double norm_cdf(double x);

/// Inverse standard normal CDF. Input is clamped to [1e-15, 1 - 1e-15];
/// absolute error below 1e-13 on the clamped range.
double norm_quantile(double u);

/// Bivariate standard normal density with correlation rho.
double binorm_pdf(double x, double y, double rho);

/// Bivariate standard normal CDF P(X <= x, Y <= y) with correlation rho.
/// Genz's rearrangement of the Drezner-Wesolowsky integral; |error| < 5e-16.
double binorm_cdf(double x, double y, double rho);

}  // namespace hermicop
