#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "swlw/config.hpp"
#include "swlw/dirac_solver.hpp"
#include "swlw/errors.hpp"
#include "swlw/initial_conditions.hpp"

using namespace swlw;

namespace {

Grid3 slab(int n) { return Grid3::torus({1, 1, n}, {1.0, 1.0, 1.0}); }

SpinorField plane_wave_e1(const Grid3& g, int mode, double amp) {
  SpinorField u(g);
  const double k = 2.0 * M_PI * mode / g.length(2);
  for (i64 idx = 0; idx < g.ncells(); ++idx) {
    int i, j, kk;
    g.coords(idx, i, j, kk);
    Spinor s;
    s.c[0] = std::polar(amp, k * g.node(i, j, kk).z);
    u.set(idx, s);
  }
  return u;
}

// Wavenumber the fourth-order stencil assigns to mode k: the symbol of
// (8(f+1 - f-1) - (f+2 - f-2)) / 12h on exp(ikx).
double stencil_wavenumber(double k, double h) {
  return (8.0 * std::sin(k * h) - std::sin(2.0 * k * h)) / (6.0 * h);
}

}  // namespace

TEST_SUITE("dirac_solver") {

TEST_CASE("plane waves are eigenfunctions of the free right-hand side") {
  const Grid3 g = slab(64);
  const AlphaSet alpha = build_alpha_set();
  const int mode = 3;
  const SpinorField u = plane_wave_e1(g, mode, 0.7);
  const SpinorField r = dirac_rhs(u, nullptr, alpha);

  const double kt = stencil_wavenumber(2.0 * M_PI * mode, g.h[2]);
  // rhs = i kt (a3 u); a3 maps e1 to e3 in this representation.
  double worst = 0;
  for (i64 idx = 0; idx < g.ncells(); ++idx) {
    const Spinor in = u.get(idx);
    const Spinor out = r.get(idx);
    const cplx want = cplx(0.0, kt) * in.c[0];
    worst = std::max(worst, std::abs(out.c[2] - want));
    worst = std::max(worst, std::abs(out.c[0]));
    worst = std::max(worst, std::abs(out.c[1]));
    worst = std::max(worst, std::abs(out.c[3]));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("step rejects unstable time steps and safety factors") {
  const Grid3 g = slab(32);
  const SpinorField u = plane_wave_e1(g, 1, 1.0);
  const double dt_ok = dirac_cfl_dt(g, 0.4);
  CHECK_THROWS_AS(step_dirac(u, nullptr, 0.0, 2.0 * dt_ok, 0.4), cfl_error);
  CHECK_THROWS_AS(step_dirac(u, nullptr, 0.0, dt_ok, 0.7), cfl_error);
  CHECK_THROWS_AS(step_dirac(u, nullptr, 0.0, dt_ok, 0.0), cfl_error);
  CHECK_NOTHROW(step_dirac(u, nullptr, 0.0, dt_ok, 0.4));
}

TEST_CASE("free plane-wave charge is conserved far below the drift budget") {
  const Grid3 g = slab(64);
  SpinorField u = plane_wave_e1(g, 1, 1.0);
  const double q0 = total_charge(u);
  const double dt = dirac_cfl_dt(g, 0.1);
  const int nsteps = int(std::round(0.1 / dt));
  for (int s = 0; s < nsteps; ++s) u = step_dirac(u, nullptr, s * dt, dt, 0.1);
  CHECK(std::abs(total_charge(u) - q0) / q0 <= 1e-11);
}

TEST_CASE("charge observable is the pointwise norm density") {
  const AlphaSet alpha = build_alpha_set();
  RunConfig cfg;
  cfg.n3 = 32;
  const Grid3 g = slab(32);
  const SpinorField u = make_spinor_ic(cfg, g);
  const ScalarField w = observable_field(u, Observable::charge, alpha);
  for (i64 idx = 0; idx < g.ncells(); ++idx)
    CHECK(w[idx] == doctest::Approx(u.get(idx).norm2()).epsilon(1e-14));
}

TEST_CASE("initial observable rate matches the measured time derivative") {
  const AlphaSet alpha = build_alpha_set();
  RunConfig cfg;
  cfg.n3 = 64;
  cfg.spinor_mode = 2;
  const Grid3 g = slab(64);
  const SpinorField u0 = make_spinor_ic(cfg, g);

  for (Observable which : {Observable::charge, Observable::pseudo}) {
    const ObservablePair p = initial_observable(u0, which, alpha);
    const double dt = 1e-4;
    const ScalarField w1 =
        observable_field(step_dirac(u0, nullptr, 0.0, dt), which, alpha);
    const ScalarField w2 = observable_field(
        step_dirac(step_dirac(u0, nullptr, 0.0, dt), nullptr, dt, dt), which, alpha);

    // Richardson-extrapolated one-sided rate: 2 (w1-w0)/dt - (w2-w0)/(2 dt).
    double num = 0, den = 0;
    for (i64 i = 0; i < g.ncells(); ++i) {
      const double r1 = (w1[i] - p.w[i]) / dt;
      const double r2 = (w2[i] - p.w[i]) / (2.0 * dt);
      const double rate = 2.0 * r1 - r2;
      num += (rate - p.wt[i]) * (rate - p.wt[i]);
      den += p.wt[i] * p.wt[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-3);
  }
}

TEST_CASE("hypothesis check accepts assembled interactions, flags broken ones") {
  const AlphaSet alpha = build_alpha_set();
  RunConfig cfg;
  cfg.n3 = 32;
  const Grid3 g = slab(32);
  const SpinorField u = make_spinor_ic(cfg, g);

  PotentialField B(g);
  for (i64 i = 0; i < g.ncells(); ++i)
    B.b[size_t(i)] = interaction_matrix(u.get(i), 1.0, 0.3, alpha);
  CHECK(potential_hypotheses_residual(B, alpha, 200, 42) <= 1e-13);

  PotentialField broken = B;
  for (i64 i = 0; i < g.ncells(); ++i)
    broken.b[size_t(i)] = broken.b[size_t(i)] + alpha.a[0] * cplx(0.1, 0.0);
  CHECK(potential_hypotheses_residual(broken, alpha, 200, 42) > 0.01);
}

TEST_CASE("charge accumulation is deterministic") {
  RunConfig cfg;
  cfg.n3 = 48;
  const Grid3 g = slab(48);
  const SpinorField u = make_spinor_ic(cfg, g);
  const double a = total_charge(u);
  const double b = total_charge(u);
  CHECK(a == b);
}

TEST_CASE("interaction term enters with the advertised sign") {
  // For a spatially constant spinor the derivative terms vanish and
  // d_t u = -i B u exactly; one tiny RK4 step must match the phase rotation
  // exp(-i B dt) u to fourth order.
  const Grid3 g = slab(4);
  const AlphaSet alpha = build_alpha_set();
  SpinorField u(g);
  Spinor s;
  s.c[0] = 1.0;
  for (i64 i = 0; i < g.ncells(); ++i) u.set(i, s);

  const double V = 0.8;
  PotentialField B(g);
  for (i64 i = 0; i < g.ncells(); ++i)
    B.b[size_t(i)] = Mat4c::identity() * cplx(V, 0.0);
  const PotentialProvider provider = [&](double, const SpinorField&,
                                         PotentialField& out) { out = B; };

  const double dt = 1e-3;
  const SpinorField u1 = step_dirac(u, provider, 0.0, dt, 0.4);
  const cplx want = std::polar(1.0, -V * dt);
  double worst = 0;
  for (i64 i = 0; i < g.ncells(); ++i)
    worst = std::max(worst, std::abs(u1.get(i).c[0] - want));
  CHECK(worst <= 1e-14);
}

}  // TEST_SUITE
