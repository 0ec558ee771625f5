#pragma once
#include <vector>

#include "swlw/grid.hpp"
#include "swlw/rel_euler.hpp"

namespace swlw {

// Effective velocity u_re = S/D sampled on the fluid grid together with its
// fourth-order divergence.  The quotient identity makes this exact given the
// conserved state; no primitive recovery is involved.
struct VelocityField {
  Grid3 grid;
  VecField u;
  ScalarField div;
};

VelocityField make_velocity_field(const FluidField& f);
double max_velocity(const VelocityField& v);

// Tracer bundle: positions under the flow of u_re plus two Jacobian-type
// scalars per tracer, advanced as one coupled ODE system:
//   dPhi/dt = u(Phi),  dJ/dt = div u(Phi) J,  dJy/dt = -div u(Phi) Jy.
// J starts at 1 (volume distortion of the flow); Jy starts at the initial
// effective density carried along the trajectory, so Jy stays equal to
// rho_re(t, Phi(t)) for an exact solution.
struct FlowState {
  std::vector<Vec3> pos;
  std::vector<double> jphi, jy;

  static FlowState seed(const std::vector<Vec3>& x0,
                        const std::vector<double>& rho_re0);
};

void advance_flow(FlowState& fs, const VelocityField& vel, double dt);

// Label map y(t, x) stored as an affine part plus a periodic remainder:
//   y(x) = (x1, x2, m x3) + yper(x),
// with m the mean effective density.  The split is what makes the map
// representable on the torus; it requires the x3-average of the initial
// effective density to be independent of (x1, x2), which initial_label
// verifies.  The label-space box has lengths (L1, L2, m L3).
struct LabelField {
  Grid3 grid;     // Eulerian grid the remainders live on
  double m = 1.0;
  VecField yper;

  Vec3 eval(const Vec3& x) const;
  std::array<double, 3> label_lengths() const;
};

// Builds the t = 0 label map: y = (x1, x2, integral of rho_re(0) along x3).
// The x3 antiderivative of the mean-free part is taken spectrally, which is
// the exact inverse of spectral differentiation for band-limited data (the
// x3 Nyquist mode is dropped).  Throws config_error when rho_re0 is not
// positive or when its x3 column means vary across (x1, x2) beyond a
// relative 1e-8, since then no periodic split exists.
LabelField initial_label(const ScalarField& rho_re0);

// Semi-Lagrangian transport step for  d_t y + u . grad y = 0  with the
// velocity frozen over the step: each node back-traces an RK4 characteristic
// X_d, then uses the exact decomposition
//   y_new(x) = yper_old(X_d) + A X_d = [yper_old(X_d) + A (X_d - x)] + A x,
// so only the periodic remainder is interpolated (trilinearly) while the
// affine growth is applied exactly.  dt must satisfy
// dt * max|u| <= min active spacing (cfl_error otherwise).
void advance_label(LabelField& lf, const VelocityField& vel, double dt);

// Relative L2 residual of the measure identity det(dy/dx) = rho_re, with the
// Jacobian entries from fourth-order differences of the remainder:
//   || det - rho_re ||_2 / || rho_re ||_2 .
double verify_density_identity(const LabelField& lf, const ScalarField& rho_re);

// Evaluator for the inverse map x(y), built on damped Newton iteration with
// the analytic Jacobian A + grad yper (gradients precomputed on the grid,
// sampled trilinearly).  Residuals are wrapped to the nearest periodic image
// on the label-space torus.  Queries accept an optional warm start; without
// one the affine inverse seeds the iteration.  Throws inversion_error when a
// query fails to reach tolerance.
class InverseMap {
 public:
  explicit InverseMap(const LabelField& lf, double tol = 1e-12, int max_iter = 60);

  Vec3 query(const Vec3& y) const;
  Vec3 query(const Vec3& y, const Vec3& guess) const;

 private:
  LabelField lf_;
  std::array<ScalarField, 9> grad_;  // d yper_i / d x_j, row-major
  double tol_;
  int max_iter_;
};

}  // namespace swlw
