#include "swlw/wave_solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>

#include "swlw/errors.hpp"

namespace swlw {

namespace {

// Our storage is x-fastest, so the logical FFTW dims are (n3, n2, n1) and the
// half-complex axis is the x axis.
struct SpectralBox {
  Grid3 grid;
  int nc1 = 0;       // n1/2 + 1 complex entries along x
  i64 nspec = 0;     // total complex entries
  double norm = 1.0; // 1/ncells, applied on the way back

  explicit SpectralBox(const Grid3& g) : grid(g) {
    nc1 = g.n[0] / 2 + 1;
    nspec = i64(g.n[2]) * g.n[1] * nc1;
    norm = 1.0 / double(g.ncells());
  }

  // Signed mode numbers and angular wavenumber for a spectral entry.
  void wavevector(i64 s, double k[3], bool& nyquist) const {
    const int i = int(s % nc1);
    const int j = int((s / nc1) % grid.n[1]);
    const int kk = int(s / (i64(nc1) * grid.n[1]));
    const int m[3] = {i, j <= grid.n[1] / 2 ? j : j - grid.n[1],
                      kk <= grid.n[2] / 2 ? kk : kk - grid.n[2]};
    nyquist = false;
    for (int a = 0; a < 3; ++a) {
      k[a] = 2.0 * M_PI * m[a] / grid.length(a);
      if (grid.n[a] % 2 == 0 && std::abs(m[a]) == grid.n[a] / 2 && grid.n[a] > 1)
        nyquist = true;
    }
  }
};

std::vector<std::complex<double>> forward(const SpectralBox& box, const ScalarField& f) {
  std::vector<double> in(f.v);
  std::vector<std::complex<double>> out(size_t(box.nspec));
  fftw_plan p = fftw_plan_dft_r2c_3d(box.grid.n[2], box.grid.n[1], box.grid.n[0],
                                     in.data(),
                                     reinterpret_cast<fftw_complex*>(out.data()),
                                     FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  return out;
}

ScalarField backward(const SpectralBox& box, std::vector<std::complex<double>> spec) {
  ScalarField out(box.grid);
  fftw_plan p = fftw_plan_dft_c2r_3d(box.grid.n[2], box.grid.n[1], box.grid.n[0],
                                     reinterpret_cast<fftw_complex*>(spec.data()),
                                     out.v.data(), FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
  for (double& x : out.v) x *= box.norm;
  return out;
}

}  // namespace

struct WaveEvolver::Impl {
  SpectralBox box;
  std::vector<std::complex<double>> u0hat, ut0hat;
  std::vector<double> kabs;  // |k| per spectral entry

  Impl(const ScalarField& u0, const ScalarField& ut0) : box(u0.grid) {
    if (!(ut0.grid == u0.grid))
      throw config_error("wave initial value and rate live on different grids");
    u0hat = forward(box, u0);
    ut0hat = forward(box, ut0);
    kabs.resize(size_t(box.nspec));
    double k[3];
    bool nyq;
    for (i64 s = 0; s < box.nspec; ++s) {
      box.wavevector(s, k, nyq);
      kabs[size_t(s)] = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    }
  }

  void spectrum_at(double t, bool rate, std::vector<std::complex<double>>& out) const {
    out.resize(size_t(box.nspec));
    for (i64 s = 0; s < box.nspec; ++s) {
      const double ka = kabs[size_t(s)];
      const auto& a = u0hat[size_t(s)];
      const auto& b = ut0hat[size_t(s)];
      if (ka == 0.0) {
        out[size_t(s)] = rate ? b : a + t * b;
      } else if (rate) {
        out[size_t(s)] = -ka * std::sin(ka * t) * a + std::cos(ka * t) * b;
      } else {
        out[size_t(s)] = std::cos(ka * t) * a + (std::sin(ka * t) / ka) * b;
      }
    }
  }
};

WaveEvolver::WaveEvolver(const ScalarField& u0, const ScalarField& ut0)
    : impl_(std::make_unique<Impl>(u0, ut0)) {}
WaveEvolver::~WaveEvolver() = default;
WaveEvolver::WaveEvolver(WaveEvolver&&) noexcept = default;
WaveEvolver& WaveEvolver::operator=(WaveEvolver&&) noexcept = default;

const Grid3& WaveEvolver::grid() const { return impl_->box.grid; }

ScalarField WaveEvolver::value(double t) const {
  std::vector<std::complex<double>> spec;
  impl_->spectrum_at(t, false, spec);
  return backward(impl_->box, std::move(spec));
}

std::pair<ScalarField, ScalarField> WaveEvolver::value_and_rate(double t) const {
  std::vector<std::complex<double>> spec;
  impl_->spectrum_at(t, false, spec);
  ScalarField u = backward(impl_->box, std::move(spec));
  impl_->spectrum_at(t, true, spec);
  ScalarField ut = backward(impl_->box, std::move(spec));
  return {std::move(u), std::move(ut)};
}

double WaveEvolver::energy(double t) const {
  auto [u, ut] = value_and_rate(t);
  const double vol = u.grid.cell_volume();
  double e = 0;
  for (double x : ut.v) e += x * x;
  for (int a = 0; a < 3; ++a) {
    if (!u.grid.axis_active(a)) continue;
    ScalarField du = spectral_derivative(u, a);
    for (double x : du.v) e += x * x;
  }
  return e * vol;
}

ScalarField wave_evolve(const ScalarField& u0, const ScalarField& ut0, double t) {
  return WaveEvolver(u0, ut0).value(t);
}

double dalembertian_residual(const std::vector<ScalarField>& series, double dt) {
  if (series.size() < 3) throw config_error("d'Alembertian residual needs >= 3 snapshots");
  if (!(dt > 0)) throw config_error("d'Alembertian residual needs dt > 0");
  const Grid3& g = series.front().grid;
  for (const auto& f : series)
    if (!(f.grid == g)) throw config_error("snapshot series grids differ");

  const double vol = g.cell_volume();
  const i64 nc = g.ncells();
  double acc = 0;
  for (size_t s = 1; s + 1 < series.size(); ++s) {
    const auto& fm = series[s - 1];
    const auto& f0 = series[s];
    const auto& fp = series[s + 1];
    double r2 = 0;
    int i, j, k;
    for (i64 idx = 0; idx < nc; ++idx) {
      g.coords(idx, i, j, k);
      double lap = 0;
      for (int a = 0; a < 3; ++a) {
        if (!g.axis_active(a)) continue;
        const i64 stride = a == 0 ? 1 : (a == 1 ? g.n[0] : i64(g.n[0]) * g.n[1]);
        const int q = a == 0 ? i : (a == 1 ? j : k);
        const i64 base = idx - i64(q) * stride;
        const double fp1 = f0.v[size_t(base + i64(g.wrap(q + 1, a)) * stride)];
        const double fm1 = f0.v[size_t(base + i64(g.wrap(q - 1, a)) * stride)];
        lap += (fp1 - 2.0 * f0.v[size_t(idx)] + fm1) / (g.h[a] * g.h[a]);
      }
      const double dtt =
          (fp.v[size_t(idx)] - 2.0 * f0.v[size_t(idx)] + fm.v[size_t(idx)]) / (dt * dt);
      const double r = dtt - lap;
      r2 += r * r;
    }
    acc += r2 * vol;
  }
  return std::sqrt(acc / double(series.size() - 2));
}

ScalarField spectral_derivative(const ScalarField& f, int axis) {
  const SpectralBox box(f.grid);
  if (!f.grid.axis_active(axis)) return ScalarField(f.grid);
  auto spec = forward(box, f);
  double k[3];
  bool nyq;
  for (i64 s = 0; s < box.nspec; ++s) {
    box.wavevector(s, k, nyq);
    const int m = axis == 0 ? int(s % box.nc1)
                            : (axis == 1 ? int((s / box.nc1) % f.grid.n[1])
                                         : int(s / (i64(box.nc1) * f.grid.n[1])));
    const bool axis_nyquist =
        f.grid.n[axis] % 2 == 0 &&
        (axis == 0 ? m == f.grid.n[0] / 2
                   : (m == f.grid.n[axis] / 2));
    if (axis_nyquist)
      spec[size_t(s)] = 0.0;
    else
      spec[size_t(s)] *= std::complex<double>(0.0, k[axis]);
  }
  return backward(box, std::move(spec));
}

}  // namespace swlw
