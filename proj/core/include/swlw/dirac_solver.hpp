#pragma once
#include <cstdint>
#include <functional>
#include <vector>

#include "swlw/dirac_algebra.hpp"
#include "swlw/grid.hpp"

namespace swlw {

// Discrete 4-spinor field on a periodic grid; components are node-major,
// data[4*node + c].
struct SpinorField {
  Grid3 grid;
  std::vector<cplx> data;

  SpinorField() = default;
  explicit SpinorField(const Grid3& g) : grid(g), data(size_t(4 * g.ncells())) {}

  bool empty() const { return data.empty(); }
  i64 nodes() const { return grid.ncells(); }

  Spinor get(i64 node) const {
    Spinor s;
    for (int c = 0; c < 4; ++c) s.c[size_t(c)] = data[size_t(4 * node + c)];
    return s;
  }
  void set(i64 node, const Spinor& s) {
    for (int c = 0; c < 4; ++c) data[size_t(4 * node + c)] = s.c[size_t(c)];
  }
};

// Node-wise interaction matrices B(y).  A separate type (rather than raw
// coefficients) keeps the solver agnostic of how B was assembled and lets
// tests feed deliberately broken matrices to the hypothesis checks.
struct PotentialField {
  Grid3 grid;
  std::vector<Mat4c> b;

  PotentialField() = default;
  explicit PotentialField(const Grid3& g) : grid(g), b(size_t(g.ncells())) {}
};

// Semidiscrete right-hand side of   d_t u = sum_i a_i d_i u - i B u
// with fourth-order centered differences along active axes.  Pass nullptr
// for free propagation (B = 0).
SpinorField dirac_rhs(const SpinorField& f, const PotentialField* B,
                      const AlphaSet& alpha);

// Fills `out` with the interaction matrices for stage time t and stage field.
// The stage field reference lets the cubic self-interaction be evaluated on
// RK4 stage values rather than frozen at the step start.
using PotentialProvider =
    std::function<void(double t, const SpinorField& stage, PotentialField& out)>;

// One classical RK4 step from time t.  Enforces dt <= cfl * min active h
// (throws cfl_error) and requires cfl <= 0.5, the stability margin of RK4
// against the spectral radius of the fourth-order first-derivative stencil.
// A null provider propagates the free equation.
SpinorField step_dirac(const SpinorField& f, const PotentialProvider& provider,
                       double t, double dt, double cfl = 0.4);

// Largest stable dt for this grid at the given safety factor.
double dirac_cfl_dt(const Grid3& g, double cfl = 0.4);

enum class Observable { charge, pseudo };

// Pointwise observable field w (|u|^2 or u^dag b u).
ScalarField observable_field(const SpinorField& f, Observable which,
                             const AlphaSet& alpha);

// Initial data (w, w_t) for the observable's wave equation.  The rate comes
// from the continuity identity: w_t = sum_i d_i (u^dag a_i u) for the charge,
// w_t = sum_i d_i (u^dag b a_i u) for the pseudoscalar, with the same
// fourth-order derivative used by the solver.
struct ObservablePair {
  ScalarField w, wt;
};
ObservablePair initial_observable(const SpinorField& f, Observable which,
                                  const AlphaSet& alpha);

// Total conserved charge  sum |u|^2 * cell volume.  Serial accumulation in
// index order so repeated runs agree bitwise.
double total_charge(const SpinorField& f);

// Spot check of the structural hypotheses on an interaction field: every
// sampled matrix must be Hermitian and commute with each alpha matrix.
// Returns the max residual over `samples` nodes drawn from the given seed.
double potential_hypotheses_residual(const PotentialField& B, const AlphaSet& alpha,
                                     int samples, std::uint64_t seed);

}  // namespace swlw
