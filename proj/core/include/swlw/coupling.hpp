#pragma once
#include <cstdint>
#include <limits>
#include <vector>

#include "swlw/dirac_solver.hpp"
#include "swlw/grid.hpp"
#include "swlw/lagrangian.hpp"
#include "swlw/rel_euler.hpp"
#include "swlw/wave_solver.hpp"

namespace swlw {

// Constants of the coupled system.  delta == 0 selects the automatic
// mollifier radius 4 * max active spacing.
struct CouplingParams {
  double epsilon = 1.0;
  double lambda = 1.0;   // cubic self-interaction strength
  double kappa = 1.0;    // potential feedback  V = kappa / rho_re
  double alpha = 0.1;    // momentum forcing strength
  double delta = 0.0;    // mollifier radius (0 = auto)
  double cfl = 0.4;
  double recovery_tol = 1e-12;
  int recovery_max_iter = 50;
};

double resolve_delta(const CouplingParams& p, const Grid3& g);

// Compactly supported smoothing kernel sampled on the grid: the radial bump
// exp(-1/(1 - r^2/delta^2)) truncated at r = delta, discretized over active
// axes and normalized so the tap weights sum to 1 exactly (the roundoff of
// the normalization is absorbed into the center tap).  Convolving with it
// keeps constants invariant to machine precision.
struct MollifierKernel {
  double delta = 0.0;
  struct Tap {
    int o[3];
    double w;
  };
  std::vector<Tap> taps;

  ScalarField convolve(const ScalarField& f) const;
};

// Requires delta >= 2 * max active spacing (so the bump is resolved) and a
// tap radius of at most half the grid extent per active axis.
MollifierKernel build_mollifier(double delta, const Grid3& g);

// The label-space grid carried by the short-wave field: same extents as the
// Eulerian grid, box lengths (L1, L2, m L3).
Grid3 lagrangian_grid(const Grid3& eulerian, double m);

// Potential V(y) = kappa / rho_re(x(y)) on the label grid.  Each node runs a
// Newton inversion of the label map; `guess` (if non-null) carries warm
// starts between calls and is updated in place.
ScalarField potential_field(const ScalarField& rho_re, const InverseMap& inv,
                            double kappa, const Grid3& label_grid,
                            std::vector<Vec3>* guess = nullptr);

// Pullback of a label-space observable to the Eulerian frame: w(y(x)).
ScalarField shortwave_energy_on_eulerian(const ScalarField& w_label,
                                         const LabelField& labels);

// Momentum source  alpha * grad(mollifier * w)  per active axis.
VecField force_source(const ScalarField& w_eulerian, const MollifierKernel& kernel,
                      double alpha);

// Full coupled state.  evolve_fluid == false freezes the fluid and labels
// (the short-wave field then propagates in a static background potential);
// an empty spinor runs the fluid alone.  Both switches reuse the same
// stepping path so decoupled runs agree bitwise with zero-coupling runs.
struct CoupledState {
  FluidField fluid;
  LabelField labels;
  SpinorField spinor;
  double time = 0.0;
  bool evolve_fluid = true;
};

// Scratch carried across steps: the smoothing kernel, the coupling fields of
// the latest refresh, and warm starts for the map inversion.  Holding them
// here keeps coevolve_step itself a pure state -> state map (the cached
// couplings are a deterministic function of the state they were stamped
// with).
struct CoevolveWorkspace {
  AlphaSet alpha = build_alpha_set();
  MollifierKernel kernel;
  bool kernel_ready = false;
  VecField force;
  bool force_active = false;
  ScalarField V_label;
  double stamp = std::numeric_limits<double>::quiet_NaN();
  std::vector<Vec3> inv_guess;
};

// Recompute the coupling fields (force on the Eulerian grid, potential on the
// label grid) from the given state.
void refresh_couplings(const CoupledState& cs, const CouplingParams& p,
                       CoevolveWorkspace& ws);

// Stage provider for a frozen scalar potential plus the live cubic
// self-interaction.  Returns an empty provider (free propagation) when both
// vanish, so zero-coupling runs take the identical code path as free runs.
// The referenced V and alpha set must outlive the provider.
PotentialProvider frozen_potential_provider(const ScalarField& V, double lambda,
                                            const AlphaSet& alpha);

// One coupled step: half fluid step with frozen force; full label transport
// and full short-wave step with frozen potential (the cubic self-interaction
// stays live on the stage values); couplings recomputed from the updated
// state; second half fluid step.
CoupledState coevolve_step(const CoupledState& cs, const CouplingParams& p,
                           double dt, CoevolveWorkspace& ws);

// Iterative decoupled solution of the same system over [0, t_final]: the
// fluid+label trajectory is evolved against a forcing built from the
// *wave-propagated* short-wave observable composed with the previous
// iterate's labels, and iterates repeat until the sup-in-time L2 distance of
// the primitive trajectories falls below tol.  Iterate zero freezes the
// initial composition in time.  On convergence the potential history and a
// short-wave trajectory (propagated against it, interaction coefficients
// from the wave-evolved observables) are reconstructed along the converged
// trajectory.
struct PicardResult {
  std::vector<double> times;
  std::vector<double> distances;  // one per completed iterate
  bool converged = false;
  bool diverged = false;
  int iterations = 0;

  std::vector<FluidField> fluid;
  std::vector<LabelField> labels;
  std::vector<ScalarField> potential;  // on the label grid
  std::vector<SpinorField> spinor;
};

PicardResult picard_solve(const CoupledState& init, const CouplingParams& p,
                          double t_final, double tol, int max_iter);

// Short-wave trajectory against a prescribed potential history (linear
// interpolation in time between samples), substepped to the field's own CFL
// limit.  With thirring_from_wave the cubic coefficients come from the
// wave-propagated charge and pseudoscalar observables of u0; otherwise they
// are evaluated on the live stage values.
std::vector<SpinorField> dirac_full_solve(const SpinorField& u0,
                                          const std::vector<double>& times,
                                          const std::vector<ScalarField>& potential,
                                          const CouplingParams& p,
                                          bool thirring_from_wave);

}  // namespace swlw
