#pragma once
#include <memory>
#include <utility>
#include <vector>

#include "swlw/grid.hpp"

namespace swlw {

// Exact evolution of u_tt = Laplacian(u) on the periodic box, mode by mode:
//   uhat(t) = uhat0 cos(|k| t) + uthat0 sin(|k| t)/|k|,
// with the zero mode advancing linearly, uhat0 + t uthat0.  The transform
// pair is FFTW r2c/c2r with plans built once per evolver (FFTW_ESTIMATE, so
// plan creation is deterministic).  Evaluation at any t costs one inverse
// transform; there is no time-stepping error, which is what makes this
// usable as an oracle against discretized propagation.
class WaveEvolver {
 public:
  WaveEvolver(const ScalarField& u0, const ScalarField& ut0);
  ~WaveEvolver();

  WaveEvolver(WaveEvolver&&) noexcept;
  WaveEvolver& operator=(WaveEvolver&&) noexcept;
  WaveEvolver(const WaveEvolver&) = delete;
  WaveEvolver& operator=(const WaveEvolver&) = delete;

  const Grid3& grid() const;

  ScalarField value(double t) const;
  std::pair<ScalarField, ScalarField> value_and_rate(double t) const;

  // Wave energy  integral( u_t^2 + |grad u|^2 )  at time t, with the gradient
  // taken spectrally.  Constant in t up to roundoff.
  double energy(double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
ScalarField wave_evolve(const ScalarField& u0, const ScalarField& ut0, double t);

// Second-order discrete d'Alembertian residual of an equally spaced time
// series of snapshots: for each interior sample s,
//   r_s = (f_{s+1} - 2 f_s + f_{s-1})/dt^2 - Laplacian_h(f_s)
// with the 3-point Laplacian per active axis.  Returns the root mean square
// over interior samples of the volume-weighted L2 norm of r_s.  Needs at
// least 3 snapshots on a common grid.
double dalembertian_residual(const std::vector<ScalarField>& series, double dt);

// Spectral first derivative along `axis` (zeros when inactive).  The Nyquist
// mode is dropped: its first derivative has no consistent real representant.
ScalarField spectral_derivative(const ScalarField& f, int axis);

}  // namespace swlw
