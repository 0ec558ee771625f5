// Microbenchmarks for the per-step hot paths.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "swlw/coupling.hpp"
#include "swlw/dirac_solver.hpp"
#include "swlw/grid.hpp"
#include "swlw/initial_conditions.hpp"
#include "swlw/lagrangian.hpp"
#include "swlw/rel_euler.hpp"
#include "swlw/wave_solver.hpp"

namespace {

using namespace swlw;

Grid3 cube(int n) { return Grid3::torus({n, n, n}, {1.0, 1.0, 1.0}); }

RunConfig base_config(int n) {
  RunConfig cfg;
  cfg.n1 = cfg.n2 = cfg.n3 = n;
  return cfg;
}

void bm_dirac_rhs(benchmark::State& state) {
  const int n = int(state.range(0));
  const Grid3 g = cube(n);
  RunConfig cfg = base_config(n);
  const SpinorField u = make_spinor_ic(cfg, g);
  const AlphaSet alpha = build_alpha_set();
  for (auto _ : state) {
    SpinorField r = dirac_rhs(u, nullptr, alpha);
    benchmark::DoNotOptimize(r.data.data());
  }
  state.SetItemsProcessed(state.iterations() * g.ncells());
}
BENCHMARK(bm_dirac_rhs)->Arg(16)->Arg(32);

void bm_fv_step(benchmark::State& state) {
  const int n = int(state.range(0));
  const Grid3 g = cube(n);
  RunConfig cfg = base_config(n);
  cfg.fluid_ic = FluidIc::density_sine;
  const FluidField f = make_fluid_ic(cfg, g);
  const double dt = fluid_cfl_dt(f);
  for (auto _ : state) {
    FluidField r = fv_step(f, nullptr, dt);
    benchmark::DoNotOptimize(r.D.data());
  }
  state.SetItemsProcessed(state.iterations() * g.ncells());
}
BENCHMARK(bm_fv_step)->Arg(16)->Arg(32);

void bm_wave_value(benchmark::State& state) {
  const int n = int(state.range(0));
  const Grid3 g = cube(n);
  ScalarField u0(g), ut0(g);
  for (i64 i = 0; i < g.ncells(); ++i)
    u0[i] = std::sin(2 * M_PI * double(i) / double(g.ncells()));
  const WaveEvolver wave(u0, ut0);
  double t = 0;
  for (auto _ : state) {
    t += 0.01;
    ScalarField v = wave.value(t);
    benchmark::DoNotOptimize(v.v.data());
  }
}
BENCHMARK(bm_wave_value)->Arg(32);

void bm_mollifier_convolve(benchmark::State& state) {
  const int n = int(state.range(0));
  const Grid3 g = cube(n);
  const MollifierKernel k = build_mollifier(4.0 * g.max_active_h(), g);
  ScalarField f(g);
  for (i64 i = 0; i < g.ncells(); ++i) f[i] = double(i % 17);
  for (auto _ : state) {
    ScalarField r = k.convolve(f);
    benchmark::DoNotOptimize(r.v.data());
  }
  state.SetItemsProcessed(state.iterations() * g.ncells());
}
BENCHMARK(bm_mollifier_convolve)->Arg(32);

void bm_advance_label(benchmark::State& state) {
  const int n = int(state.range(0));
  const Grid3 g = cube(n);
  RunConfig cfg = base_config(n);
  cfg.fluid_ic = FluidIc::density_sine;
  cfg.u0 = {0.1, 0.0, 0.2};
  const FluidField f = make_fluid_ic(cfg, g);
  const VelocityField vel = make_velocity_field(f);
  const double dt = 0.5 * g.min_active_h() / std::max(1e-12, max_velocity(vel));
  LabelField lf = initial_label(density_field(f));
  for (auto _ : state) {
    advance_label(lf, vel, dt);
    benchmark::DoNotOptimize(lf.yper[0].v.data());
  }
  state.SetItemsProcessed(state.iterations() * g.ncells());
}
BENCHMARK(bm_advance_label)->Arg(32);

void bm_cons_to_prim(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rho_d(0.3, 3.0);
  std::uniform_real_distribution<double> u_d(-0.9, 0.9);
  const Eos eos;
  std::vector<Cons> cs;
  for (int i = 0; i < 1024; ++i) {
    Prim w;
    w.rho = rho_d(rng);
    w.u = {u_d(rng) / 2, u_d(rng) / 2, u_d(rng) / 2};
    cs.push_back(prim_to_cons(w, 1.0, eos));
  }
  for (auto _ : state) {
    for (const Cons& c : cs) {
      Prim w = cons_to_prim(c, 1.0, eos);
      benchmark::DoNotOptimize(w.rho);
    }
  }
  state.SetItemsProcessed(state.iterations() * i64(cs.size()));
}
BENCHMARK(bm_cons_to_prim);

void bm_inverse_map_query(benchmark::State& state) {
  const int n = 32;
  const Grid3 g = Grid3::torus({1, 1, n}, {1, 1, 1});
  RunConfig cfg;
  cfg.n1 = cfg.n2 = 1;
  cfg.n3 = n;
  cfg.fluid_ic = FluidIc::density_sine;
  cfg.fluid_amp = 0.3;
  const FluidField f = make_fluid_ic(cfg, g);
  const LabelField lf = initial_label(density_field(f));
  const InverseMap inv(lf);
  const auto lens = lf.label_lengths();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> y_d(0.0, lens[2]);
  for (auto _ : state) {
    Vec3 x = inv.query({0.0, 0.0, y_d(rng)});
    benchmark::DoNotOptimize(x.z);
  }
}
BENCHMARK(bm_inverse_map_query);

}  // namespace

BENCHMARK_MAIN();
