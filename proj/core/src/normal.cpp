#include "hermicop/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hermicop {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_quantile(double u) {
  u = std::clamp(u, 1e-15, 1.0 - 1e-15);

  // Acklam's rational approximation, then one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double u_low = 0.02425;

  double x;
  if (u < u_low) {
    double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - u_low) {
    double q = u - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  double e = norm_cdf(x) - u;
  double p = norm_pdf(x);
  x -= e / (p + 0.5 * x * e);  // Halley refinement
  return x;
}

double binorm_pdf(double x, double y, double rho) {
  double s = 1.0 - rho * rho;
  double q = (x * x - 2.0 * rho * x * y + y * y) / s;
  return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(s));
}

namespace {

// Genz's bvnu: P(X > h, Y > k) for standard bivariate normal, correlation r.
double bvnu(double h, double k, double r) {
  // Gauss-Legendre abscissae/weights on (0,1), 6/12/20 points.
  static constexpr double xl6[] = {0.9324695142031521, 0.6612093864662645,
                                   0.2386191860831969};
  static constexpr double wl6[] = {0.1713244923791704, 0.3607615730481386,
                                   0.4679139345726910};
  static constexpr double xl12[] = {0.9815606342467192, 0.9041172563704749,
                                    0.7699026741943047, 0.5873179542866175,
                                    0.3678314989981802, 0.1252334085114689};
  static constexpr double wl12[] = {0.04717533638651183, 0.1069393259953184,
                                    0.1600783285433462,  0.2031674267230659,
                                    0.2334925365383548,  0.2491470458134028};
  static constexpr double xl20[] = {0.9931285991850949, 0.9639719272779138,
                                    0.9122344282513259, 0.8391169718222188,
                                    0.7463319064601508, 0.6360536807265150,
                                    0.5108670019508271, 0.3737060887154195,
                                    0.2277858511416451, 0.07652652113349734};
  static constexpr double wl20[] = {0.01761400713915212, 0.04060142980038694,
                                    0.06267204833410907, 0.08327674157670475,
                                    0.1019301198172404,  0.1181945319615184,
                                    0.1316886384491766,  0.1420961093183820,
                                    0.1491729864726037,  0.1527533871307258};

  const double* xg;
  const double* wg;
  int ng;
  double ar = std::fabs(r);
  if (ar < 0.3) {
    xg = xl6, wg = wl6, ng = 3;
  } else if (ar < 0.75) {
    xg = xl12, wg = wl12, ng = 6;
  } else {
    xg = xl20, wg = wl20, ng = 10;
  }

  double bvn = 0.0;
  double hk = h * k;
  if (ar < 0.925) {
    double hs = 0.5 * (h * h + k * k);
    double asr = std::asin(r);
    for (int i = 0; i < ng; ++i) {
      for (int sign = -1; sign <= 1; sign += 2) {
        double sn = std::sin(asr * (1.0 + sign * xg[i]) * 0.5);
        bvn += wg[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * kTwoPi) + norm_cdf(-h) * norm_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (ar < 1.0) {
      double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      double bs = (h - k) * (h - k);
      double cc = (4.0 - hk) / 8.0;
      double dd = (12.0 - hk) / 16.0;
      double asr = -0.5 * (bs / as + hk);
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - cc * (bs - as) * (1.0 - dd * bs / 5.0) / 3.0 +
               cc * dd * as * as / 5.0);
      }
      if (-hk < 100.0) {
        double b = std::sqrt(bs);
        bvn -= std::exp(-0.5 * hk) * std::sqrt(kTwoPi) * norm_cdf(-b / a) * b *
               (1.0 - cc * bs * (1.0 - dd * bs / 5.0) / 3.0);
      }
      a *= 0.5;
      for (int i = 0; i < ng; ++i) {
        for (int sign = -1; sign <= 1; sign += 2) {
          double xs = a * (1.0 + sign * xg[i]);
          xs = xs * xs;
          double rs = std::sqrt(1.0 - xs);
          double asr2 = -0.5 * (bs / xs + hk);
          if (asr2 > -100.0) {
            bvn += a * wg[i] * std::exp(asr2) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                    (1.0 + cc * xs * (1.0 + dd * xs)));
          }
        }
      }
      bvn = -bvn / kTwoPi;
    }
    if (r > 0.0) {
      bvn += norm_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
    }
  }
  return std::max(0.0, std::min(1.0, bvn));
}

}  // namespace

double binorm_cdf(double x, double y, double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw std::domain_error("binorm_cdf: rho must lie in (-1, 1)");
  }
  return bvnu(-x, -y, rho);
}

}  // namespace hermicop
