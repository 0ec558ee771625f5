#pragma once
#include "swlw/config.hpp"
#include "swlw/dirac_solver.hpp"
#include "swlw/grid.hpp"
#include "swlw/rel_euler.hpp"

namespace swlw {

// Periodized Gaussian bump: sum of images of exp(-(x-c)^2 / (2 s^2)) over
// enough periods to be smooth on the torus to machine precision.
double periodic_gaussian(double x, double center, double s, double L);

// Fluid initial data on the Eulerian grid, assembled from primitives and
// mapped to conserved variables.  Non-uniform profiles vary along the
// resolved fluid axis (validated to be x3).
FluidField make_fluid_ic(const RunConfig& cfg, const Grid3& g);

// Short-wave initial data on the label grid.  plane-wave and constant fill
// the first spinor component only; gaussian-packet mixes the first and third
// components by the angle spinor_mix so both the charge and the pseudoscalar
// observables are nontrivial.
SpinorField make_spinor_ic(const RunConfig& cfg, const Grid3& label_grid);

}  // namespace swlw
