#pragma once
#include <array>
#include <limits>
#include <vector>

#include "swlw/grid.hpp"

namespace swlw {

// Barotropic equation of state p(rho) on an open density interval.  The
// admissibility conditions for the signal-speed bound are p > 0 and
// 0 < p' < 1/eps^2 on the whole interval (sound speed below the light speed
// 1/eps).  The linear law p = sigma2 * rho satisfies them iff
// 0 < sigma2 < 1/eps^2.
struct Eos {
  double sigma2 = 0.25;
  double rho_min = 0.0;
  double rho_max = std::numeric_limits<double>::infinity();

  // p and dp/drho at rho; throws recovery-side callers reject out-of-domain
  // densities before calling, so this only guards internal misuse.
  void eval(double rho, double& p, double& dp) const;
  double pressure(double rho) const;
  bool in_domain(double rho) const { return rho > rho_min && rho < rho_max; }
  void validate(double eps) const;  // config_error when inadmissible
};

struct Prim {
  double rho = 1.0;
  Vec3 u;
};

struct Cons {
  double D = 1.0;  // relativistic density
  Vec3 S;          // relativistic momentum
};

struct Mat3 {
  std::array<double, 9> e{};
  double& at(int r, int c) { return e[size_t(3 * r + c)]; }
  double at(int r, int c) const { return e[size_t(3 * r + c)]; }
  double max_abs() const;
};

// Which form of the pressure-loss tensor to assemble.  `corrected` restores
// the pressure factor that makes the flux identity close exactly;
// `transcribed` is the form without it, kept as a negative control.
enum class PtildeForm { corrected, transcribed };

// Auxiliary variables of the illuminating form: effective density rho_re,
// effective velocity u_re, and the pressure-loss tensor.
struct RelVars {
  double rho_re = 0.0;
  Vec3 u_re;
  Mat3 ptilde;
};

// Lorentz-type factor and mappings between primitive and conserved states.
// eps is the inverse light speed; physical states satisfy eps^2 |u|^2 < 1.
Cons prim_to_cons(const Prim& w, double eps, const Eos& eos);
RelVars rel_variables(const Prim& w, double eps, const Eos& eos,
                      PtildeForm form = PtildeForm::corrected);

// Inverse map via a safeguarded Newton iteration on the scalar density
// equation  rho - D + eps^2 |S|^2 / (D + eps^2 p(rho)) = 0, which is strictly
// monotone on the admissible interval.  Throws recovery_error (cell = -1 for
// point calls) on non-physical input or when |f| fails to reach
// tol * max(1, D) within max_iter.
Prim cons_to_prim(const Cons& c, double eps, const Eos& eos, double tol = 1e-12,
                  int max_iter = 50);

// Physical flux of (D, S) along `axis`.
Cons flux(const Prim& w, double eps, const Eos& eos, int axis);

// Global signal-speed bound: the light speed 1/eps dominates every
// characteristic speed for an admissible EOS.
double max_signal_speed(double eps);

// Conserved fluid state on a grid (structure-of-arrays).
struct FluidField {
  Grid3 grid;
  double eps = 1.0;
  Eos eos;
  std::vector<double> D, S1, S2, S3;

  FluidField() = default;
  FluidField(const Grid3& g, double eps_, const Eos& eos_);

  std::vector<double>& S(int a) { return a == 0 ? S1 : (a == 1 ? S2 : S3); }
  const std::vector<double>& S(int a) const { return a == 0 ? S1 : (a == 1 ? S2 : S3); }
};

// Primitive fields recovered cell by cell; throws recovery_error carrying the
// first offending flat index.
struct PrimField {
  std::vector<double> rho, u1, u2, u3;
  std::vector<double>& u(int a) { return a == 0 ? u1 : (a == 1 ? u2 : u3); }
  const std::vector<double>& u(int a) const { return a == 0 ? u1 : (a == 1 ? u2 : u3); }
};
PrimField recover_primitives(const FluidField& f, double tol = 1e-12,
                             int max_iter = 50);

// Largest stable dt: cfl / (a * sum over active axes of 1/h), a = 1/eps.
double fluid_cfl_dt(const FluidField& f, double cfl = 0.4);

// One SSP-RK2 (Heun) step of the unsplit finite-volume scheme with Rusanov
// interface fluxes at the global signal-speed bound.  `source`, when present,
// is added to the momentum rows only (the mass row has no source).  dt must
// satisfy the advertised CFL bound or the step is rejected with cfl_error.
FluidField fv_step(const FluidField& f, const VecField* source, double dt,
                   double cfl = 0.4, double recovery_tol = 1e-12,
                   int max_iter = 50);

// Volume-weighted conserved totals, accumulated serially in index order.
double total_mass(const FluidField& f);
Vec3 total_momentum(const FluidField& f);

// The conserved density D as a scalar field.  By the algebraic identity
// D = rho_re this *is* the effective density; callers needing rho_re read it
// straight off the conserved state with no recovery.
ScalarField density_field(const FluidField& f);

}  // namespace swlw
