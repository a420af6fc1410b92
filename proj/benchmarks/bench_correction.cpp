#include <benchmark/benchmark.h>

#include "hermicop/correction.hpp"
#include "hermicop/normal.hpp"

using namespace hermicop;

namespace {

std::vector<double> fitted_scale_coeffs() {
  return {0.0, 0.0, -0.3535 / 6.0, 0.9641 / 24.0, 0.0827 / 120.0, -2.0537 / 720.0};
}

void bm_inner_product(benchmark::State& state) {
  auto n = static_cast<int>(state.range(0));
  CartesianGrid g = build_grid({{-6.0, 6.0}}, {n});
  std::vector<double> f(g.node_count()), w(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    f[i] = g.coord(0, static_cast<int>(i));
    w[i] = norm_pdf(f[i]);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(inner_product(f, f, w, g));
  }
}
BENCHMARK(bm_inner_product)->Arg(200)->Arg(2000)->Arg(40000);

// the product fast path scales with the sum of the per-axis grid sizes
void bm_correct_1d_product(benchmark::State& state) {
  auto n = static_cast<int>(state.range(0));
  CartesianGrid g = build_grid({{-6.0, 6.0}}, {n});
  auto coeffs = fitted_scale_coeffs();
  for (auto _ : state) {
    auto out = correct_1d_product({coeffs, coeffs}, {g, g});
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(bm_correct_1d_product)->Arg(100)->Arg(200)->Arg(400);

// the full 2D projection scales with the product
void bm_dykstra_2d(benchmark::State& state) {
  auto n = static_cast<int>(state.range(0));
  ExpansionModel model = ExpansionModel::zeros(6, 0.0);
  auto coeffs = fitted_scale_coeffs();
  for (int j = 1; j <= 6; ++j) model.set_coeff(j, 0, coeffs[static_cast<std::size_t>(j - 1)]);
  CartesianGrid g = build_grid({{-6.0, 6.0}, {-6.0, 6.0}}, {n, n});
  GridDensity raw = evaluate_expansion(model, g);
  auto constraints = expansion_constraints(model, g, false);
  for (auto _ : state) {
    auto out = dykstra(raw.values, constraints, raw.weight_density, g);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(bm_dykstra_2d)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
