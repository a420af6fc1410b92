#include "hermicop/crossfx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hermicop/normal.hpp"
#include "hermicop/quadrature.hpp"

namespace hermicop {

namespace {

constexpr double kUClamp = 1e-12;

double factorial_d(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Piecewise-linear interpolation between midpoints of a 1D grid, clamped.
double interp_midpoints_1d(const std::vector<double>& values, const CartesianGrid& g,
                           double v) {
  std::size_t n = values.size();
  double t = (v - g.coord(0, 0)) / g.delta[0];
  t = std::clamp(t, 0.0, static_cast<double>(n - 1));
  auto cell = std::min(static_cast<std::size_t>(t), n - 2);
  double frac = t - static_cast<double>(cell);
  return (1.0 - frac) * values[cell] + frac * values[cell + 1];
}

// Composite Gauss-Legendre rule on (a, b) with panels graded toward the ends
// (copula densities can be corner-singular). Node budget ~ total.
struct PanelRule {
  std::vector<double> nodes, weights;
};

PanelRule graded_panels(double a, double b, int total, bool grade_low, bool grade_high) {
  PanelRule out;
  if (!(b > a)) return out;
  std::vector<double> rel;
  if (grade_low && grade_high) {
    rel = {0.0, 0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999, 1.0};
  } else if (grade_high) {
    rel = {0.0, 0.5, 0.9, 0.99, 0.999, 1.0};
  } else if (grade_low) {
    rel = {0.0, 0.001, 0.01, 0.1, 0.5, 1.0};
  } else {
    rel = {0.0, 0.5, 1.0};
  }
  std::size_t panels = rel.size() - 1;
  int per = std::max(4, total / static_cast<int>(panels));
  for (std::size_t p = 0; p < panels; ++p) {
    double lo = a + (b - a) * rel[p];
    double hi = a + (b - a) * rel[p + 1];
    GaussLegendreRule r = gauss_legendre_nodes(per, lo, hi);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

}  // namespace

CrossSetup make_cross_setup(SmileCurve xz, SmileCurve yz, CopulaModel copula) {
  if (std::fabs(xz.tenor() - yz.tenor()) > 1e-12) {
    throw std::invalid_argument("make_cross_setup: curves must share the tenor");
  }
  CrossSetup s;
  s.df_z = yz.df_dom();
  s.df_y = yz.df_for();
  s.spot_yz = yz.forward() * yz.df_dom() / yz.df_for();
  s.xz = std::move(xz);
  s.yz = std::move(yz);
  s.copula = std::move(copula);
  return s;
}

struct CrossPricer::Impl {
  const CrossSetup* setup = nullptr;
  bool hermite = false;

  // Hermite path state
  RotationFactors rot;
  CartesianGrid vgrid;            // 2D grid shared by projection and pricing
  bool product_form = false;
  CartesianGrid vgrid1;           // 1D grid of the product fast path
  std::vector<double> phi2;       // corrected factor over v2
  std::vector<double> phi_star;   // corrected ratio on the 2D grid (general)
  DykstraReport report;
  bool has_report = false;
  DiscreteMarginal gx1, gx2;      // marginals of the corrected density in x
  std::vector<double> ey1, ey2;   // e^{y_i} at v nodes
  std::vector<double> rweight;    // phi* * pdf(v1) * pdf(v2) at v nodes

  // classical path state
  ClassicalCopula classical{CopulaFamily::Gauss, 0.0};
  PanelRule outer;
  std::vector<double> y2_outer;

  double fx = 0.0, fy = 0.0;

  // continuous evaluators (Hermite path)
  double phi_at(double v1, double v2) const {
    if (product_form) return interp_midpoints_1d(phi2, vgrid1, v2);
    auto n2 = static_cast<std::size_t>(vgrid.sections[1]);
    auto n1 = static_cast<std::size_t>(vgrid.sections[0]);
    double t1 = (v1 - vgrid.coord(0, 0)) / vgrid.delta[0];
    double t2 = (v2 - vgrid.coord(1, 0)) / vgrid.delta[1];
    t1 = std::clamp(t1, 0.0, static_cast<double>(n1 - 1));
    t2 = std::clamp(t2, 0.0, static_cast<double>(n2 - 1));
    auto a = std::min(static_cast<std::size_t>(t1), n1 - 2);
    auto b = std::min(static_cast<std::size_t>(t2), n2 - 2);
    double ta = t1 - static_cast<double>(a), tb = t2 - static_cast<double>(b);
    auto at = [&](std::size_t i, std::size_t j) { return phi_star[i * n2 + j]; };
    return (1.0 - ta) * ((1.0 - tb) * at(a, b) + tb * at(a, b + 1)) +
           ta * ((1.0 - tb) * at(a + 1, b) + tb * at(a + 1, b + 1));
  }

  double y1_at(double v1, double v2) const {
    double x1 = rot.alpha1 * v1 - rot.alpha2 * v2;
    double u = std::clamp(gx1.cdf(x1), kUClamp, 1.0 - kUClamp);
    return setup->xz.rn_quantile(u);
  }
  double y2_at(double v1, double v2) const {
    double x2 = rot.alpha1 * v1 + rot.alpha2 * v2;
    double u = std::clamp(gx2.cdf(x2), kUClamp, 1.0 - kUClamp);
    return setup->yz.rn_quantile(u);
  }

  void build_hermite(const HermitePricingSpec& spec);
  void build_classical(const ClassicalCopula& c);

  double price_hermite(double strike, bool is_put) const;
  double price_classical(double strike, bool is_put) const;
};

void CrossPricer::Impl::build_hermite(const HermitePricingSpec& spec) {
  const ExpansionModel& model = spec.model;
  rot = model.factors;
  double hw = spec.halfwidth;
  vgrid = build_grid({{-hw, hw}, {-hw, hw}}, {spec.sections, spec.sections});

  product_form = true;
  for (int n = 1; n <= model.n_max && product_form; ++n) {
    for (int i = 1; i <= n; ++i) {
      if (model.coeff(n, i) != 0.0) {
        product_form = false;
        break;
      }
    }
  }

  if (product_form) {
    vgrid1 = build_grid({{-hw, hw}}, {spec.sections});
    std::vector<double> coeffs(static_cast<std::size_t>(model.n_max));
    for (int j = 1; j <= model.n_max; ++j) {
      coeffs[static_cast<std::size_t>(j - 1)] = model.coeff(j, 0);
    }
    auto corrected = correct_1d_product({coeffs}, {vgrid1}, spec.dykstra);
    phi2 = std::move(corrected[0].phi);
    report = std::move(corrected[0].report);
    has_report = true;
    // a projection stopped mid-cycle (infeasible coefficients) is not mass-1;
    // renormalize so pricing stays scale-consistent. No-op once converged.
    std::vector<double> w1(phi2.size());
    for (std::size_t k = 0; k < w1.size(); ++k) {
      w1[k] = norm_pdf(vgrid1.coord(0, static_cast<int>(k)));
    }
    for (double& v : phi2) v = std::max(v, 0.0);
    double mass = hermicop::inner_product(phi2, std::vector<double>(phi2.size(), 1.0), w1, vgrid1);
    if (mass > 0.0) {
      for (double& v : phi2) v /= mass;
    }
  } else {
    std::size_t s = static_cast<std::size_t>(spec.sections);
    std::vector<double> raw(s * s, 1.0);
    for (std::size_t a = 0; a < s; ++a) {
      double v1 = vgrid.coord(0, static_cast<int>(a));
      for (std::size_t b = 0; b < s; ++b) {
        double v2 = vgrid.coord(1, static_cast<int>(b));
        double acc = 1.0;
        for (int n = 1; n <= model.n_max; ++n) {
          for (int i = 0; i <= n; ++i) {
            double m = model.coeff(n, i);
            if (m != 0.0) acc += m * tensor_basis_2d(n, i, v1, v2);
          }
        }
        raw[a * s + b] = acc;
      }
    }
    auto constraints = expansion_constraints(model, vgrid, /*in_rotated_coords=*/true);
    std::vector<double> weight = gaussian_weight_independent(vgrid);
    auto [projected, rep] = dykstra(raw, constraints, weight, vgrid, spec.dykstra);
    phi_star = std::move(projected);
    report = std::move(rep);
    has_report = true;
    for (double& v : phi_star) v = std::max(v, 0.0);
    double mass = hermicop::inner_product(
        phi_star, std::vector<double>(phi_star.size(), 1.0), weight, vgrid);
    if (mass > 0.0) {
      for (double& v : phi_star) v /= mass;
    }
  }

  // corrected joint density in x coordinates, for the marginal rebuild
  GridDensity xdens;
  xdens.grid = vgrid;
  xdens.kind = DensityKind::Absolute;
  xdens.rho = model.rho;
  xdens.weight_density = gaussian_weight_2d(vgrid, model.rho);
  xdens.values.resize(vgrid.node_count());
  {
    std::size_t s = static_cast<std::size_t>(vgrid.sections[0]);
    for (std::size_t a = 0; a < s; ++a) {
      double x1 = vgrid.coord(0, static_cast<int>(a));
      for (std::size_t b = 0; b < s; ++b) {
        double x2 = vgrid.coord(1, static_cast<int>(b));
        double v1, v2;
        rot.to_v(x1, x2, v1, v2);
        xdens.values[a * s + b] =
            std::max(phi_at(v1, v2), 0.0) * xdens.weight_density[a * s + b];
      }
    }
  }
  // the corrected density's own grid mass is the normalizer; off by a few
  // 1e-3 only when the coefficients were infeasible and the projection
  // stopped mid-cycle
  double xmass = vgrid.cell_weight * pairwise_sum(xdens.values);
  if (xmass > 0.0) {
    for (double& v : xdens.values) v /= xmass;
  }
  gx1 = marginal_from_density(xdens, 0);
  gx2 = marginal_from_density(xdens, 1);

  // per-node maps on the pricing grid
  std::size_t s = static_cast<std::size_t>(vgrid.sections[0]);
  ey1.resize(s * s);
  ey2.resize(s * s);
  rweight.resize(s * s);
  for (std::size_t a = 0; a < s; ++a) {
    double v1 = vgrid.coord(0, static_cast<int>(a));
    double pdf1 = norm_pdf(v1);
    for (std::size_t b = 0; b < s; ++b) {
      double v2 = vgrid.coord(1, static_cast<int>(b));
      std::size_t f = a * s + b;
      ey1[f] = std::exp(y1_at(v1, v2));
      ey2[f] = std::exp(y2_at(v1, v2));
      rweight[f] = std::max(phi_at(v1, v2), 0.0) * pdf1 * norm_pdf(v2);
    }
  }
  double w = vgrid.cell_weight;
  std::vector<double> t1(s * s), t2(s * s);
  for (std::size_t f = 0; f < s * s; ++f) {
    t1[f] = rweight[f] * ey1[f];
    t2[f] = rweight[f] * ey2[f];
  }
  fx = w * pairwise_sum(t1);
  fy = w * pairwise_sum(t2);
}

void CrossPricer::Impl::build_classical(const ClassicalCopula& c) {
  classical = make_copula(c.family, c.theta);
  outer = graded_panels(0.0, 1.0, setup->classical_nodes, true, true);
  y2_outer.resize(outer.nodes.size());
  for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
    y2_outer[i] = setup->yz.rn_quantile(outer.nodes[i]);
  }
  // forwards from the marginal grids; the copula integrates out exactly
  auto grid_forward = [](const SmileCurve& curve) {
    const DiscreteMarginal& m = curve.marginal();
    double acc = 0.0;
    for (std::size_t i = 0; i < m.coords.size(); ++i) {
      acc += std::exp(m.coords[i]) * m.density[i] * m.delta;
    }
    return acc;
  };
  fx = grid_forward(setup->xz);
  fy = grid_forward(setup->yz);
}

double CrossPricer::Impl::price_hermite(double strike, bool is_put) const {
  std::size_t s = static_cast<std::size_t>(vgrid.sections[0]);
  double d2 = vgrid.delta[1];
  double lo_edge = vgrid.low[1];
  std::vector<double> terms;
  terms.reserve(s * s + 2 * s);

  for (std::size_t a = 0; a < s; ++a) {
    double v1 = vgrid.coord(0, static_cast<int>(a));
    double pdf1 = norm_pdf(v1);

    auto payoff_cont = [&](double v2) {
      double p = std::exp(y1_at(v1, v2)) - strike * std::exp(y2_at(v1, v2));
      return is_put ? -p : p;
    };
    auto rw_cont = [&](double v2) {
      return std::max(phi_at(v1, v2), 0.0) * pdf1 * norm_pdf(v2);
    };

    // cached payoff at midpoints; positive side is contiguous because the
    // payoff argument is monotone in v2
    std::ptrdiff_t flip = -1;  // first midpoint where sign differs from previous
    double prev = 0.0;
    for (std::size_t b = 0; b < s; ++b) {
      std::size_t f = a * s + b;
      double p = ey1[f] - strike * ey2[f];
      if (is_put) p = -p;
      if (b > 0 && flip < 0 && ((prev > 0.0) != (p > 0.0))) {
        flip = static_cast<std::ptrdiff_t>(b);
      }
      if (p > 0.0) terms.push_back(d2 * rweight[f] * p);
      prev = p;
    }

    // locate the kink and replace the crossing cell's midpoint contribution
    // with two half-cell evaluations
    double root = 0.0;
    bool have_root = false;
    auto bisect = [&](double lo, double hi) {
      double flo = payoff_cont(lo);
      double fhi = payoff_cont(hi);
      if (flo == 0.0) return lo;
      if (fhi == 0.0) return hi;
      if ((flo > 0.0) == (fhi > 0.0)) return (lo + hi) * 0.5;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = payoff_cont(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-12 * d2) break;
      }
      return 0.5 * (lo + hi);
    };

    double p_first = ey1[a * s] - strike * ey2[a * s];
    if (is_put) p_first = -p_first;
    double hi_edge = lo_edge + static_cast<double>(s) * d2;
    double mid_first = vgrid.coord(1, 0);
    double mid_last = vgrid.coord(1, static_cast<int>(s) - 1);
    // the payoff rises with v2 for puts and falls for calls
    double rise_edge = is_put ? hi_edge : lo_edge;
    double rise_mid = is_put ? mid_last : mid_first;
    double fall_edge = is_put ? lo_edge : hi_edge;
    double fall_mid = is_put ? mid_first : mid_last;
    if (flip >= 0) {
      double mid_prev = vgrid.coord(1, static_cast<int>(flip) - 1);
      double mid_cur = vgrid.coord(1, static_cast<int>(flip));
      root = bisect(mid_prev, mid_cur);
      have_root = true;
    } else if (p_first > 0.0) {
      // all midpoints positive; the sign may still turn past the falling end
      if (payoff_cont(fall_edge) < 0.0) {
        root = bisect(std::min(fall_mid, fall_edge), std::max(fall_mid, fall_edge));
        have_root = true;
      }
    } else {
      // all midpoints non-positive; a positive sliver may sit at the rising end
      if (payoff_cont(rise_edge) > 0.0) {
        root = bisect(std::min(rise_mid, rise_edge), std::max(rise_mid, rise_edge));
        have_root = true;
      }
    }

    if (have_root) {
      auto cell = std::min(static_cast<std::size_t>((root - lo_edge) / d2), s - 1);
      double cell_lo = lo_edge + static_cast<double>(cell) * d2;
      double cell_hi = cell_lo + d2;
      std::size_t f = a * s + cell;
      double p_mid = ey1[f] - strike * ey2[f];
      if (is_put) p_mid = -p_mid;
      if (p_mid > 0.0) {
        terms.push_back(-d2 * rweight[f] * p_mid);  // remove the full-cell term
      }
      // positive side of the crossing cell
      double pos_lo, pos_hi;
      double probe = payoff_cont(0.5 * (cell_lo + root));
      if (probe > 0.0) {
        pos_lo = cell_lo;
        pos_hi = root;
      } else {
        pos_lo = root;
        pos_hi = cell_hi;
      }
      double mid = 0.5 * (pos_lo + pos_hi);
      double pv = payoff_cont(mid);
      if (pv > 0.0 && pos_hi > pos_lo) {
        terms.push_back((pos_hi - pos_lo) * rw_cont(mid) * pv);
      }
    }
  }
  return setup->df_z * vgrid.delta[0] * pairwise_sum(terms);
}

double CrossPricer::Impl::price_classical(double strike, bool is_put) const {
  const SmileCurve& xz = setup->xz;
  double log_k = std::log(strike);
  int inner_nodes = setup->classical_nodes;

  std::vector<double> col(outer.nodes.size());
  for (std::size_t o = 0; o < outer.nodes.size(); ++o) {
    double u2 = outer.nodes[o];
    double y2 = y2_outer[o];
    double ky2 = strike * std::exp(y2);
    // u1 where the payoff changes sign
    double ustar = xz.rn_cdf(log_k + y2);
    ustar = std::clamp(ustar, kUClamp, 1.0 - kUClamp);

    double a = is_put ? kUClamp : ustar;
    double b = is_put ? ustar : 1.0 - kUClamp;
    if (!(b > a)) {
      col[o] = 0.0;
      continue;
    }
    PanelRule inner = graded_panels(a, b, inner_nodes, is_put, !is_put);
    double acc = 0.0;
    for (std::size_t i = 0; i < inner.nodes.size(); ++i) {
      double u1 = inner.nodes[i];
      double payoff = std::exp(xz.rn_quantile(u1)) - ky2;
      if (is_put) payoff = -payoff;
      if (payoff <= 0.0) continue;
      acc += inner.weights[i] * payoff * copula_density(classical, u1, u2);
    }
    col[o] = acc;
  }
  std::vector<double> terms(col.size());
  for (std::size_t o = 0; o < col.size(); ++o) terms[o] = outer.weights[o] * col[o];
  return setup->df_z * pairwise_sum(terms);
}

CrossPricer::CrossPricer(const CrossSetup& setup) : impl_(std::make_unique<Impl>()) {
  if (std::fabs(setup.xz.tenor() - setup.yz.tenor()) > 1e-12) {
    throw std::invalid_argument("CrossPricer: curves must share the tenor");
  }
  impl_->setup = &setup;
  if (const auto* spec = std::get_if<HermitePricingSpec>(&setup.copula)) {
    impl_->hermite = true;
    impl_->build_hermite(*spec);
  } else {
    impl_->build_classical(std::get<ClassicalCopula>(setup.copula));
  }
}

CrossPricer::~CrossPricer() = default;
CrossPricer::CrossPricer(CrossPricer&&) noexcept = default;
CrossPricer& CrossPricer::operator=(CrossPricer&&) noexcept = default;

double CrossPricer::call(double strike) const {
  if (!(strike > 0.0)) throw std::invalid_argument("CrossPricer::call: strike must be > 0");
  return impl_->hermite ? impl_->price_hermite(strike, false)
                        : impl_->price_classical(strike, false);
}

double CrossPricer::put(double strike) const {
  if (!(strike > 0.0)) throw std::invalid_argument("CrossPricer::put: strike must be > 0");
  return impl_->hermite ? impl_->price_hermite(strike, true)
                        : impl_->price_classical(strike, true);
}

double CrossPricer::forward_xz() const { return impl_->fx; }
double CrossPricer::forward_yz() const { return impl_->fy; }

double CrossPricer::implied_vol(double strike) const {
  double f_cross = cross_forward();
  double df = impl_->setup->df_z * impl_->fy;
  return hermicop::implied_vol(call(strike), strike, f_cross, impl_->setup->xz.tenor(), df,
                               /*is_put=*/false);
}

const DykstraReport* CrossPricer::correction_report() const {
  return impl_->has_report ? &impl_->report : nullptr;
}

double price_cross_call(const CrossSetup& setup, double strike) {
  return CrossPricer(setup).call(strike);
}

double price_cross_put(const CrossSetup& setup, double strike) {
  return CrossPricer(setup).put(strike);
}

double cross_implied_vol(const CrossSetup& setup, double strike) {
  return CrossPricer(setup).implied_vol(strike);
}

SmilePillars cross_smile_pillars(const CrossSetup& setup) {
  CrossPricer pricer(setup);
  double tenor = setup.xz.tenor();
  double f_cross = pricer.cross_forward();

  SmilePillars out;
  out.tenor = tenor;
  out.forward = f_cross;
  out.df_dom = setup.df_y;
  out.df_for = setup.xz.df_for();

  struct Leg {
    Pillar pillar;
    double delta;
    bool is_call;
  };
  static const Leg legs[5] = {{Pillar::Put10, 0.10, false},
                              {Pillar::Put25, 0.25, false},
                              {Pillar::Atm, 0.0, false},
                              {Pillar::Call25, 0.25, true},
                              {Pillar::Call10, 0.10, true}};

  double vols[5];
  for (int p = 0; p < 5; ++p) {
    double sigma = pricer.implied_vol(f_cross);  // start from the forward strike
    bool done = false;
    for (int iter = 0; iter < 20; ++iter) {
      double strike = legs[p].delta == 0.0
                          ? f_cross * std::exp(0.5 * sigma * sigma * tenor)
                          : strike_for_delta(f_cross, sigma, tenor, legs[p].delta,
                                             legs[p].is_call);
      double next = pricer.implied_vol(strike);
      if (std::fabs(next - sigma) < 1e-10) {
        sigma = next;
        done = true;
        break;
      }
      sigma = next;
    }
    if (!done) {
      throw std::runtime_error("cross_smile_pillars: pillar fixed point did not converge");
    }
    vols[p] = sigma;
  }
  out.p10 = vols[0];
  out.p25 = vols[1];
  out.atm = vols[2];
  out.c25 = vols[3];
  out.c10 = vols[4];
  return out;
}

double forward_consistency(const CrossSetup& setup) {
  // The Y-leg forward depends on the x2 marginal only; every copula shares it.
  const DiscreteMarginal& m = setup.yz.marginal();
  double acc = 0.0;
  for (std::size_t i = 0; i < m.coords.size(); ++i) {
    acc += std::exp(m.coords[i]) * m.density[i] * m.delta;
  }
  double lhs = setup.df_z * acc;
  double rhs = setup.spot_yz * setup.df_y;
  return std::fabs(lhs - rhs) / rhs;
}

double LambdaDiagnostic::lambda(double v) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < basis_coefficients.size(); ++k) {
    acc += basis_coefficients[k] * hermite_orthonormal(static_cast<int>(k), v);
  }
  return prefactor * acc;
}

double LambdaDiagnostic::density(double v2) const {
  double t = v2 - sigma * alpha2;
  // orthonormality leaves only the constant term in the normalizer
  double norm = prefactor * basis_coefficients[0];
  return lambda(t) * norm_pdf(t) / norm;
}

LambdaDiagnostic lambda_diagnostic(const ExpansionModel& model, double sigma,
                                   double nu_xz, double nu_yz) {
  if (!(sigma > 0.0)) throw std::domain_error("lambda_diagnostic: sigma must be > 0");
  LambdaDiagnostic d;
  d.sigma = sigma;
  d.alpha1 = model.factors.alpha1;
  d.alpha2 = model.factors.alpha2;
  d.nu_xz = nu_xz;
  d.nu_yz = nu_yz;
  d.prefactor =
      std::exp(nu_yz + 0.5 * sigma * sigma * (d.alpha1 * d.alpha1 + d.alpha2 * d.alpha2));

  int n_max = model.n_max;
  d.basis_coefficients.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int k = 0; k <= n_max; ++k) {
    double acc = 0.0;
    for (int n = std::max(3, k); n <= n_max; ++n) {
      for (int i = 0; i <= n - k; ++i) {
        double m = model.coeff(n, i);
        if (m == 0.0) continue;
        acc += m *
               std::sqrt(factorial_d(n - i) / (factorial_d(i) * factorial_d(k))) *
               std::pow(sigma, n - k) * std::pow(d.alpha1, i) *
               std::pow(d.alpha2, n - i - k) / factorial_d(n - i - k);
      }
    }
    d.basis_coefficients[static_cast<std::size_t>(k)] = acc;
  }
  d.basis_coefficients[0] += 1.0;
  return d;
}

}  // namespace hermicop
