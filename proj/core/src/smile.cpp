#include "hermicop/smile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hermicop/correction.hpp"
#include "hermicop/normal.hpp"

namespace hermicop {

double SmilePillars::vol(int pillar_index) const {
  switch (pillar_index) {
    case 0: return p10;
    case 1: return p25;
    case 2: return atm;
    case 3: return c25;
    case 4: return c10;
    default: throw std::out_of_range("SmilePillars::vol: index 0..4");
  }
}

double strike_for_delta(double forward, double sigma, double tenor, double delta,
                        bool is_call) {
  double sq = sigma * std::sqrt(tenor);
  double z = norm_quantile(delta);
  double sign = is_call ? -1.0 : 1.0;
  return forward * std::exp(sign * sq * z + 0.5 * sigma * sigma * tenor);
}

double delta_to_strike(const SmilePillars& p, Pillar pillar) {
  switch (pillar) {
    case Pillar::Atm:
      return p.forward * std::exp(0.5 * p.atm * p.atm * p.tenor);
    case Pillar::Call25: return strike_for_delta(p.forward, p.c25, p.tenor, 0.25, true);
    case Pillar::Put25: return strike_for_delta(p.forward, p.p25, p.tenor, 0.25, false);
    case Pillar::Call10: return strike_for_delta(p.forward, p.c10, p.tenor, 0.10, true);
    case Pillar::Put10: return strike_for_delta(p.forward, p.p10, p.tenor, 0.10, false);
  }
  throw std::invalid_argument("delta_to_strike: bad pillar");
}

double black_call(double strike, double forward, double sigma, double tenor, double df) {
  double sq = sigma * std::sqrt(tenor);
  if (sq < 1e-12) return df * std::max(forward - strike, 0.0);
  double d1 = (std::log(forward / strike) + 0.5 * sq * sq) / sq;
  double d2 = d1 - sq;
  return df * (forward * norm_cdf(d1) - strike * norm_cdf(d2));
}

double black_put(double strike, double forward, double sigma, double tenor, double df) {
  double sq = sigma * std::sqrt(tenor);
  if (sq < 1e-12) return df * std::max(strike - forward, 0.0);
  double d1 = (std::log(forward / strike) + 0.5 * sq * sq) / sq;
  double d2 = d1 - sq;
  return df * (strike * norm_cdf(-d2) - forward * norm_cdf(-d1));
}

double implied_vol(double price, double strike, double forward, double tenor,
                   double df, bool is_put) {
  double intrinsic = is_put ? df * std::max(strike - forward, 0.0)
                            : df * std::max(forward - strike, 0.0);
  double cap = is_put ? df * strike : df * forward;
  if (!(price > intrinsic - 1e-14 && price < cap)) {
    throw std::domain_error("implied_vol: price outside no-arbitrage bounds");
  }
  price = std::max(price, intrinsic + 1e-300);

  auto value = [&](double sigma) {
    return is_put ? black_put(strike, forward, sigma, tenor, df)
                  : black_call(strike, forward, sigma, tenor, df);
  };

  double lo = 1e-10, hi = 10.0;
  while (value(hi) < price && hi < 1e4) hi *= 2.0;
  double sigma = 0.2;
  for (int iter = 0; iter < 200; ++iter) {
    double v = value(sigma);
    double err = v - price;
    if (std::fabs(err) < 1e-14 * std::max(1.0, price) || hi - lo < 1e-14) break;
    if (err > 0.0) {
      hi = sigma;
    } else {
      lo = sigma;
    }
    double sq = sigma * std::sqrt(tenor);
    double d1 = (std::log(forward / strike) + 0.5 * sq * sq) / sq;
    double vega = df * forward * norm_pdf(d1) * std::sqrt(tenor);
    double next = sigma - err / vega;
    sigma = (vega > 1e-300 && next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return sigma;
}

// ---------------------------------------------------------------------------
// clamped cubic spline (zero end slopes), Thomas solve for M = s''

namespace {

std::vector<double> clamped_spline_m(const std::vector<double>& y,
                                     const std::vector<double>& v) {
  std::size_t n = y.size();
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = y[i + 1] - y[i];

  std::vector<double> a(n), b(n), c(n), d(n);
  b[0] = h[0] / 3.0;
  c[0] = h[0] / 6.0;
  d[0] = (v[1] - v[0]) / h[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    a[i] = h[i - 1] / 6.0;
    b[i] = (h[i - 1] + h[i]) / 3.0;
    c[i] = h[i] / 6.0;
    d[i] = (v[i + 1] - v[i]) / h[i] - (v[i] - v[i - 1]) / h[i - 1];
  }
  a[n - 1] = h[n - 2] / 6.0;
  b[n - 1] = h[n - 2] / 3.0;
  d[n - 1] = -(v[n - 1] - v[n - 2]) / h[n - 2];

  for (std::size_t i = 1; i < n; ++i) {
    double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  std::vector<double> M(n);
  M[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) M[i] = (d[i] - c[i] * M[i + 1]) / b[i];
  return M;
}

}  // namespace

double SmileCurve::vol_at_y(double y) const {
  const auto& ys = knot_y_;
  if (y <= ys.front()) return knot_vol_.front();
  if (y >= ys.back()) return knot_vol_.back();
  auto it = std::upper_bound(ys.begin(), ys.end(), y);
  std::size_t i = static_cast<std::size_t>(it - ys.begin()) - 1;
  double h = ys[i + 1] - ys[i];
  double t0 = ys[i + 1] - y, t1 = y - ys[i];
  return knot_m_[i] * t0 * t0 * t0 / (6.0 * h) + knot_m_[i + 1] * t1 * t1 * t1 / (6.0 * h) +
         (knot_vol_[i] / h - knot_m_[i] * h / 6.0) * t0 +
         (knot_vol_[i + 1] / h - knot_m_[i + 1] * h / 6.0) * t1;
}

double SmileCurve::dvol_dy(double y) const {
  const auto& ys = knot_y_;
  if (y <= ys.front() || y >= ys.back()) return 0.0;
  auto it = std::upper_bound(ys.begin(), ys.end(), y);
  std::size_t i = static_cast<std::size_t>(it - ys.begin()) - 1;
  double h = ys[i + 1] - ys[i];
  double t0 = ys[i + 1] - y, t1 = y - ys[i];
  return -knot_m_[i] * t0 * t0 / (2.0 * h) + knot_m_[i + 1] * t1 * t1 / (2.0 * h) +
         (knot_vol_[i + 1] - knot_vol_[i]) / h - (knot_m_[i + 1] - knot_m_[i]) * h / 6.0;
}

double SmileCurve::vol_at_strike(double strike) const {
  return vol_at_y(std::log(strike / forward_));
}

double SmileCurve::call_price(double strike) const {
  return black_call(strike, forward_, vol_at_strike(strike), tenor_, df_dom_);
}

double SmileCurve::put_price(double strike) const {
  return black_put(strike, forward_, vol_at_strike(strike), tenor_, df_dom_);
}

double SmileCurve::rn_cdf(double x) const { return marginal_.cdf(x); }

double SmileCurve::rn_quantile(double u) const { return marginal_.quantile(u); }

double SmileCurve::density(double x) const {
  if (x < marginal_.low || x > marginal_.high) return 0.0;
  auto cell = std::min(static_cast<std::size_t>((x - marginal_.low) / marginal_.delta),
                       marginal_.density.size() - 1);
  return marginal_.density[cell];
}

double SmileCurve::log_mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < marginal_.coords.size(); ++i) {
    acc += marginal_.coords[i] * marginal_.density[i] * marginal_.delta;
  }
  return acc;
}

double SmileCurve::log_sd() const {
  double mu = log_mean();
  double acc = 0.0;
  for (std::size_t i = 0; i < marginal_.coords.size(); ++i) {
    double d = marginal_.coords[i] - mu;
    acc += d * d * marginal_.density[i] * marginal_.delta;
  }
  return std::sqrt(std::max(acc, 0.0));
}

SmileCurve build_curve(const SmilePillars& p, int grid_size) {
  if (!(p.tenor > 0.0) || !(p.forward > 0.0)) {
    throw std::invalid_argument("build_curve: tenor and forward must be positive");
  }
  for (int i = 0; i < 5; ++i) {
    if (!(p.vol(i) > 0.0)) throw std::invalid_argument("build_curve: vols must be positive");
  }
  if (grid_size < 100) throw std::invalid_argument("build_curve: grid_size too small");

  static const Pillar kOrder[5] = {Pillar::Put10, Pillar::Put25, Pillar::Atm,
                                   Pillar::Call25, Pillar::Call10};
  static const char* kNames[5] = {"10dp", "25dp", "atm", "25dc", "10dc"};

  double strikes[5], vols[5];
  for (int i = 0; i < 5; ++i) {
    strikes[i] = delta_to_strike(p, kOrder[i]);
    vols[i] = p.vol(i);
  }
  for (int i = 0; i + 1 < 5; ++i) {
    if (!(strikes[i] < strikes[i + 1])) {
      throw std::invalid_argument(std::string("build_curve: pillar strikes not ") +
                                  "increasing between " + kNames[i] + " and " + kNames[i + 1]);
    }
  }

  // undiscounted pillar call prices must be decreasing and strictly convex
  double prices[5];
  for (int i = 0; i < 5; ++i) prices[i] = black_call(strikes[i], p.forward, vols[i], p.tenor, 1.0);
  double prev_slope = -1.0;
  for (int i = 0; i + 1 < 5; ++i) {
    double slope = (prices[i + 1] - prices[i]) / (strikes[i + 1] - strikes[i]);
    if (!(slope > prev_slope) || !(slope < 0.0)) {
      throw std::invalid_argument(std::string("build_curve: call prices violate ") +
                                  "convexity between " + kNames[i] + " and " + kNames[i + 1]);
    }
    prev_slope = slope;
  }

  SmileCurve curve;
  curve.tenor_ = p.tenor;
  curve.forward_ = p.forward;
  curve.df_dom_ = p.df_dom;
  curve.df_for_ = p.df_for;
  curve.pillars_ = p;
  curve.knot_y_.assign(5, 0.0);
  curve.knot_vol_.assign(vols, vols + 5);
  for (int i = 0; i < 5; ++i) curve.knot_y_[static_cast<std::size_t>(i)] = std::log(strikes[i] / p.forward);
  curve.knot_m_ = clamped_spline_m(curve.knot_y_, curve.knot_vol_);

  // density domain: 1e-7 quantiles of the flat-wing lognormals; the omitted
  // tail mass must stay well under the 1e-6 density accuracy the curve targets
  double sqT = std::sqrt(p.tenor);
  double q = norm_quantile(1e-7);  // negative
  double y_lo = -0.5 * p.p10 * p.p10 * p.tenor + p.p10 * sqT * q;
  double y_hi = -0.5 * p.c10 * p.c10 * p.tenor - p.c10 * sqT * q;
  double log_f = std::log(p.forward);

  DiscreteMarginal& m = curve.marginal_;
  m.low = log_f + y_lo;
  m.high = log_f + y_hi;
  auto cells = static_cast<std::size_t>(grid_size);
  m.delta = (m.high - m.low) / static_cast<double>(cells);

  // CDF of the log-rate from the vol curve:
  //   G(x) = 1 - Phi(d2) + e^{-y} phi(d1) sqrt(T) s'(y),  y = x - log F
  auto cdf_analytic = [&](double x) {
    double y = x - log_f;
    double sigma = curve.vol_at_y(y);
    double sq = sigma * sqT;
    double d1 = (-y + 0.5 * sq * sq) / sq;
    double d2 = d1 - sq;
    return 1.0 - norm_cdf(d2) + std::exp(-y) * norm_pdf(d1) * sqT * curve.dvol_dy(y);
  };

  m.coords.resize(cells);
  m.density.resize(cells);
  double g_left = cdf_analytic(m.low);
  double neg_mass = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    m.coords[i] = m.low + (static_cast<double>(i) + 0.5) * m.delta;
    double g_right = cdf_analytic(m.low + static_cast<double>(i + 1) * m.delta);
    m.density[i] = (g_right - g_left) / m.delta;
    if (m.density[i] < 0.0) neg_mass -= m.density[i] * m.delta;
    g_left = g_right;
  }

  if (neg_mass > 0.0) {
    if (neg_mass > 1e-3) {
      throw std::invalid_argument("build_curve: interpolated density has negative mass " +
                                  std::to_string(neg_mass) + "; quotes carry butterfly arbitrage");
    }
    // Project onto {mass preserved, forward preserved, non-negative} in the
    // plain (unit-weight) discrete L2 space.
    CartesianGrid g1 = build_grid({{m.low, m.high}}, {static_cast<int>(cells)});
    std::vector<double> ones(cells, 1.0);
    double mass0 = m.delta * pairwise_sum(m.density);
    MomentMatch fwd;
    fwd.test.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) fwd.test[i] = std::exp(m.coords[i]);
    {
      std::vector<double> t(cells);
      for (std::size_t i = 0; i < cells; ++i) t[i] = fwd.test[i] * m.density[i];
      fwd.target = m.delta * pairwise_sum(t);
    }
    std::vector<ConvexConstraint> cons;
    cons.emplace_back(Normalization{mass0});
    cons.emplace_back(std::move(fwd));
    cons.emplace_back(NonNegativity{});
    auto [fixed, rep] = dykstra(m.density, cons, ones, g1, DykstraOptions{1e-12, 2000});
    m.density = std::move(fixed);
    curve.density_clipped_ = true;
  }

  m.cdf_edges.resize(cells);
  double acc = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    acc += std::max(m.density[i], 0.0) * m.delta;
    m.cdf_edges[i] = acc;
  }
  m.raw_mass = acc;
  for (std::size_t i = 0; i < cells; ++i) {
    m.cdf_edges[i] /= acc;
    m.density[i] = std::max(m.density[i], 0.0) / acc;
  }
  m.cdf_edges.back() = 1.0;
  return curve;
}

SmilePillars invert_pair(const SmilePillars& p) {
  SmilePillars q = p;
  q.forward = 1.0 / p.forward;
  q.df_dom = p.df_for;
  q.df_for = p.df_dom;
  q.c25 = p.p25;
  q.p25 = p.c25;
  q.c10 = p.p10;
  q.p10 = p.c10;
  return q;
}

}  // namespace hermicop
