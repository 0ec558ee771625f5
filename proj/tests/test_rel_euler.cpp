#include <doctest.h>

#include <cmath>
#include <random>

#include "swlw/config.hpp"
#include "swlw/errors.hpp"
#include "swlw/initial_conditions.hpp"
#include "swlw/rel_euler.hpp"

using namespace swlw;

namespace {

Prim random_state(std::mt19937_64& rng, double max_speed) {
  std::uniform_real_distribution<double> rho_d(0.3, 3.0);
  std::uniform_real_distribution<double> mag_d(0.0, max_speed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Prim w;
  w.rho = rho_d(rng);
  Vec3 dir{nd(rng), nd(rng), nd(rng)};
  const double n = dir.norm();
  if (n > 0) dir = dir * (1.0 / n);
  w.u = dir * mag_d(rng);
  return w;
}

}  // namespace

TEST_SUITE("rel_euler") {

// Frozen point oracle: rho = 1, u = (1/2, 0, 0), p = rho/4, eps = 1.
// All values are exact rationals worked out from the definitions.
TEST_CASE("reference state maps to the frozen rationals") {
  const Eos eos;  // sigma2 = 1/4
  const double eps = 1.0;
  Prim w;
  w.rho = 1.0;
  w.u = {0.5, 0.0, 0.0};

  const Cons c = prim_to_cons(w, eps, eos);
  CHECK(c.D == doctest::Approx(17.0 / 12.0).epsilon(1e-15));
  CHECK(c.S.x == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(c.S.y == 0.0);
  CHECK(c.S.z == 0.0);

  const RelVars rv = rel_variables(w, eps, eos);
  CHECK(rv.rho_re == doctest::Approx(17.0 / 12.0).epsilon(1e-15));
  CHECK(rv.u_re.x == doctest::Approx(10.0 / 17.0).epsilon(1e-15));
  CHECK(rv.ptilde.at(0, 0) == doctest::Approx(-5.0 / 68.0).epsilon(1e-14));

  const RelVars rt = rel_variables(w, eps, eos, PtildeForm::transcribed);
  CHECK(rt.ptilde.at(0, 0) == doctest::Approx(-5.0 / 17.0).epsilon(1e-14));

  const Cons f = flux(w, eps, eos, 0);
  CHECK(f.S.x == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(f.D == doctest::Approx(5.0 / 6.0).epsilon(1e-15));

  // Closure: flux assembled from the effective variables, corrected tensor.
  const double p = eos.pressure(w.rho);
  const double eff = rv.rho_re * rv.u_re.x * rv.u_re.x + rv.ptilde.at(0, 0) + p;
  CHECK(eff == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // The transcribed tensor misses it by 2/3 - 91/204 = 15/68.
  const double bad = rv.rho_re * rv.u_re.x * rv.u_re.x + rt.ptilde.at(0, 0) + p;
  CHECK(std::abs(bad - 2.0 / 3.0) == doctest::Approx(15.0 / 68.0).epsilon(1e-12));
}

TEST_CASE("conserved state equals the effective density and momentum") {
  const Eos eos;
  std::mt19937_64 rng(314);
  for (double eps : {1.0, 0.1}) {
    for (int trial = 0; trial < 500; ++trial) {
      const Prim w = random_state(rng, 0.95 / eps);
      const Cons c = prim_to_cons(w, eps, eos);
      const RelVars rv = rel_variables(w, eps, eos);
      const double scale = std::max(1.0, std::abs(c.D));
      CHECK(std::abs(c.D - rv.rho_re) / scale <= 1e-14);
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(c.S[j] - rv.rho_re * rv.u_re[j]) /
                  std::max(1.0, std::abs(c.S[j])) <=
              1e-14);
    }
  }
}

TEST_CASE("momentum flux closes in the effective variables") {
  const Eos eos;
  std::mt19937_64 rng(218);
  for (double eps : {1.0, 0.1}) {
    double worst = 0, worst_bad = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const Prim w = random_state(rng, 0.95 / eps);
      const RelVars rv = rel_variables(w, eps, eos);
      const RelVars rt = rel_variables(w, eps, eos, PtildeForm::transcribed);
      const double p = eos.pressure(w.rho);
      for (int axis = 0; axis < 3; ++axis) {
        const Cons f = flux(w, eps, eos, axis);
        for (int j = 0; j < 3; ++j) {
          const double scale = std::max(1.0, std::abs(f.S[j]));
          double eff = rv.rho_re * rv.u_re[j] * rv.u_re[axis] + rv.ptilde.at(j, axis);
          double bad = rv.rho_re * rv.u_re[j] * rv.u_re[axis] + rt.ptilde.at(j, axis);
          if (j == axis) {
            eff += p;
            bad += p;
          }
          worst = std::max(worst, std::abs(f.S[j] - eff) / scale);
          worst_bad = std::max(worst_bad, std::abs(f.S[j] - bad) / scale);
        }
      }
    }
    CHECK(worst <= 1e-13);
    CHECK(worst_bad > 1e-6);  // negative control: tensor without the pressure factor
  }
}

TEST_CASE("pressure-loss tensor is a symmetric rank-one correction") {
  const Eos eos;
  std::mt19937_64 rng(55);
  const Prim w = random_state(rng, 0.9);
  const RelVars rv = rel_variables(w, 1.0, eos);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      CHECK(rv.ptilde.at(r, c) == doctest::Approx(rv.ptilde.at(c, r)).epsilon(1e-14));
      // proportional to u_re (x) u_re entrywise
      const double denom = rv.u_re[r] * rv.u_re[c];
      if (std::abs(denom) > 1e-12) {
        const double ratio = rv.ptilde.at(r, c) / denom;
        CHECK(ratio == doctest::Approx(rv.ptilde.at(0, 0) /
                                       (rv.u_re[0] * rv.u_re[0]))
                           .epsilon(1e-10));
      }
    }
}

TEST_CASE("recovery inverts the conserved map") {
  const Eos eos;
  std::mt19937_64 rng(777);
  for (double eps : {1.0, 0.1}) {
    double worst = 0;
    for (int trial = 0; trial < 2000; ++trial) {
      const Prim w = random_state(rng, 0.95 / eps);
      const Prim r = cons_to_prim(prim_to_cons(w, eps, eos), eps, eos);
      worst = std::max(worst, std::abs(r.rho - w.rho) / w.rho);
      for (int j = 0; j < 3; ++j)
        worst = std::max(worst,
                         std::abs(r.u[j] - w.u[j]) / std::max(1.0, std::abs(w.u[j])));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("recovery rejects superluminal and empty states") {
  const Eos eos;
  Cons c;
  c.D = 1.0;
  c.S = {2.0, 0.0, 0.0};  // |S| eps >= D: no admissible root
  CHECK_THROWS_AS(cons_to_prim(c, 1.0, eos), recovery_error);
  c.D = -0.5;
  c.S = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(cons_to_prim(c, 1.0, eos), recovery_error);
}

TEST_CASE("equation of state validates the admissibility window") {
  Eos eos;
  eos.sigma2 = 0.25;
  CHECK_NOTHROW(eos.validate(1.0));
  eos.sigma2 = 1.5;  // sound speed above light speed at eps = 1
  CHECK_THROWS_AS(eos.validate(1.0), config_error);
  eos.sigma2 = 0.25;
  eos.rho_min = 2.0;
  eos.rho_max = 1.0;
  CHECK_THROWS_AS(eos.validate(1.0), config_error);
}

TEST_CASE("uniform states are exact fixed points of the update") {
  RunConfig cfg;
  cfg.n3 = 32;
  cfg.fluid_ic = FluidIc::uniform;
  cfg.u0 = {0.0, 0.0, 0.3};
  const Grid3 g = Grid3::torus({1, 1, 32}, {1.0, 1.0, 1.0});
  const FluidField f0 = make_fluid_ic(cfg, g);
  const double dt = fluid_cfl_dt(f0);
  FluidField f = fv_step(f0, nullptr, dt);
  for (i64 i = 0; i < g.ncells(); ++i) {
    CHECK(f.D[size_t(i)] == f0.D[size_t(i)]);
    CHECK(f.S3[size_t(i)] == f0.S3[size_t(i)]);
  }
}

TEST_CASE("finite-volume step conserves mass and rejects large steps") {
  RunConfig cfg;
  cfg.n3 = 64;
  cfg.fluid_ic = FluidIc::density_sine;
  cfg.fluid_amp = 0.3;
  const Grid3 g = Grid3::torus({1, 1, 64}, {1.0, 1.0, 1.0});
  FluidField f = make_fluid_ic(cfg, g);
  const double m0 = total_mass(f);
  const double dt = fluid_cfl_dt(f);
  CHECK_THROWS_AS(fv_step(f, nullptr, 3.0 * dt), cfl_error);
  for (int s = 0; s < 20; ++s) f = fv_step(f, nullptr, dt);
  CHECK(std::abs(total_mass(f) - m0) / m0 <= 1e-13);
}

TEST_CASE("constant source integrates exactly on a uniform state") {
  RunConfig cfg;
  cfg.n1 = 1;
  cfg.n2 = 1;
  cfg.n3 = 16;
  cfg.fluid_ic = FluidIc::uniform;
  const Grid3 g = Grid3::torus({1, 1, 16}, {1.0, 1.0, 1.0});
  const FluidField f0 = make_fluid_ic(cfg, g);
  VecField src{ScalarField(g), ScalarField(g), ScalarField(g)};
  for (i64 i = 0; i < g.ncells(); ++i) src[2][i] = 0.25;
  const double dt = fluid_cfl_dt(f0);
  // Uniform state: flux differences vanish, so Heun reduces to S += dt * src.
  const FluidField f1 = fv_step(f0, &src, dt);
  for (i64 i = 0; i < g.ncells(); ++i) {
    CHECK(f1.S3[size_t(i)] == doctest::Approx(dt * 0.25).epsilon(1e-15));
    CHECK(f1.D[size_t(i)] == f0.D[size_t(i)]);  // mass row has no source
  }
}

TEST_CASE("field recovery reports the lowest failing cell") {
  const Grid3 g = Grid3::torus({1, 1, 8}, {1.0, 1.0, 1.0});
  const Eos eos;
  FluidField f(g, 1.0, eos);
  for (i64 i = 0; i < g.ncells(); ++i) {
    f.D[size_t(i)] = 1.0;
    f.S3[size_t(i)] = 0.1;
  }
  f.S3[3] = 5.0;  // superluminal
  f.S3[6] = 5.0;
  try {
    recover_primitives(f);
    CHECK(false);
  } catch (const recovery_error& e) {
    CHECK(e.cell == 3);
  }
}

TEST_CASE("stable step size follows the signal-speed bound") {
  const Grid3 g = Grid3::torus({1, 1, 64}, {1.0, 1.0, 1.0});
  const Eos eos;
  const FluidField f(g, 2.0, eos);
  // speed 1/eps = 1/2, one active axis with h = 1/64, cfl 0.4
  CHECK(fluid_cfl_dt(f, 0.4) == doctest::Approx(0.4 * 2.0 / 64.0).epsilon(1e-15));
  CHECK(max_signal_speed(2.0) == doctest::Approx(0.5));
}

TEST_CASE("non-relativistic deviation scales quadratically in epsilon") {
  const Eos eos;
  std::mt19937_64 rng(4242);
  std::vector<Prim> states;
  for (int i = 0; i < 400; ++i) states.push_back(random_state(rng, 0.9));
  const auto deviation = [&](double eps) {
    double acc = 0;
    for (const Prim& w : states) {
      const RelVars rv = rel_variables(w, eps, eos);
      acc += std::abs(rv.rho_re - w.rho) + (rv.u_re - w.u).norm() + rv.ptilde.max_abs();
    }
    return acc / double(states.size());
  };
  const double ratio = deviation(0.1) / deviation(0.05);
  CHECK(ratio > 3.6);
  CHECK(ratio < 4.4);
}

}  // TEST_SUITE
