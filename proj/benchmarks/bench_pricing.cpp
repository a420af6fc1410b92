#include <benchmark/benchmark.h>

#include "hermicop/crossfx.hpp"

using namespace hermicop;

namespace {

SmilePillars flat(double sigma, double forward) {
  SmilePillars p;
  p.tenor = 1.0;
  p.forward = forward;
  p.df_dom = 0.98;
  p.df_for = 0.96;
  p.atm = p.c25 = p.p25 = p.c10 = p.p10 = sigma;
  return p;
}

CrossSetup hermite_setup(int sections) {
  HermitePricingSpec spec;
  ScaledCoefficients sc;
  sc.n_max = 6;
  sc.values = {-0.3535, 0.9641, 0.0827, -2.0537};
  spec.model = unscale_coefficients(sc, 6, 0.3661);
  spec.sections = sections;
  CrossSetup s = make_cross_setup(build_curve(flat(0.10, 1.10)),
                                  build_curve(flat(0.12, 0.0091)), spec);
  return s;
}

void bm_hermite_pricer_build(benchmark::State& state) {
  CrossSetup s = hermite_setup(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CrossPricer pricer(s);
    benchmark::DoNotOptimize(pricer.forward_xz());
  }
}
BENCHMARK(bm_hermite_pricer_build)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_hermite_price_strike(benchmark::State& state) {
  CrossSetup s = hermite_setup(200);
  CrossPricer pricer(s);
  double f = pricer.cross_forward();
  for (auto _ : state) {
    benchmark::DoNotOptimize(pricer.call(f));
  }
}
BENCHMARK(bm_hermite_price_strike)->Unit(benchmark::kMillisecond);

void bm_classical_price_strike(benchmark::State& state) {
  CrossSetup s = make_cross_setup(build_curve(flat(0.10, 1.10)),
                                  build_curve(flat(0.12, 0.0091)),
                                  make_copula(CopulaFamily::Gauss, 0.4));
  s.classical_nodes = static_cast<int>(state.range(0));
  CrossPricer pricer(s);
  double f = pricer.cross_forward();
  for (auto _ : state) {
    benchmark::DoNotOptimize(pricer.call(f));
  }
}
BENCHMARK(bm_classical_price_strike)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void bm_cross_pillars(benchmark::State& state) {
  CrossSetup s = hermite_setup(200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cross_smile_pillars(s));
  }
}
BENCHMARK(bm_cross_pillars)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
