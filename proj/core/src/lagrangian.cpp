#include "swlw/lagrangian.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "swlw/errors.hpp"

namespace swlw {

VelocityField make_velocity_field(const FluidField& f) {
  VelocityField v;
  v.grid = f.grid;
  for (int a = 0; a < 3; ++a) {
    v.u[size_t(a)] = ScalarField(f.grid);
    const auto& s = f.S(a);
    for (size_t i = 0; i < s.size(); ++i) v.u[size_t(a)].v[i] = s[i] / f.D[i];
  }
  v.div = ScalarField(f.grid);
  for (int a = 0; a < 3; ++a) {
    if (!f.grid.axis_active(a)) continue;
    ScalarField d = deriv4(v.u[size_t(a)], a);
    for (size_t i = 0; i < v.div.v.size(); ++i) v.div.v[i] += d.v[i];
  }
  return v;
}

double max_velocity(const VelocityField& v) {
  double m = 0;
  for (size_t i = 0; i < v.div.v.size(); ++i) {
    const double s = v.u[0].v[i] * v.u[0].v[i] + v.u[1].v[i] * v.u[1].v[i] +
                     v.u[2].v[i] * v.u[2].v[i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

namespace {

Vec3 sample_velocity(const VelocityField& vel, const Vec3& x) {
  return {sample_trilinear(vel.u[0], x), sample_trilinear(vel.u[1], x),
          sample_trilinear(vel.u[2], x)};
}

Vec3 wrap_position(const Grid3& g, Vec3 x) {
  for (int a = 0; a < 3; ++a) {
    const double L = g.length(a);
    x[a] -= L * std::floor(x[a] / L);
  }
  return x;
}

}  // namespace

FlowState FlowState::seed(const std::vector<Vec3>& x0,
                          const std::vector<double>& rho_re0) {
  if (x0.size() != rho_re0.size())
    throw config_error("tracer seed: positions and densities disagree in count");
  FlowState fs;
  fs.pos = x0;
  fs.jphi.assign(x0.size(), 1.0);
  fs.jy = rho_re0;
  return fs;
}

void advance_flow(FlowState& fs, const VelocityField& vel, double dt) {
  const size_t n = fs.pos.size();
  parallel_for(i64(n), [&](i64 lo, i64 hi) {
    for (i64 t = lo; t < hi; ++t) {
      const Vec3 p0 = fs.pos[size_t(t)];
      const double j0 = fs.jphi[size_t(t)];
      const double y0 = fs.jy[size_t(t)];

      // Classical RK4 on the joint (position, jphi, jy) system.
      Vec3 kp[4];
      double kj[4], ky[4];
      const auto stage = [&](int s, double frac, const Vec3& kpp, double kjp, double kyp) {
        const Vec3 p = p0 + (dt * frac) * kpp;
        const double j = j0 + dt * frac * kjp;
        const double y = y0 + dt * frac * kyp;
        const double dv = sample_trilinear(vel.div, p);
        kp[s] = sample_velocity(vel, p);
        kj[s] = dv * j;
        ky[s] = -dv * y;
      };
      stage(0, 0.0, Vec3{}, 0.0, 0.0);
      stage(1, 0.5, kp[0], kj[0], ky[0]);
      stage(2, 0.5, kp[1], kj[1], ky[1]);
      stage(3, 1.0, kp[2], kj[2], ky[2]);

      Vec3 p = p0 + (dt / 6.0) * (kp[0] + 2.0 * kp[1] + 2.0 * kp[2] + kp[3]);
      fs.pos[size_t(t)] = wrap_position(vel.grid, p);
      fs.jphi[size_t(t)] = j0 + dt / 6.0 * (kj[0] + 2 * kj[1] + 2 * kj[2] + kj[3]);
      fs.jy[size_t(t)] = y0 + dt / 6.0 * (ky[0] + 2 * ky[1] + 2 * ky[2] + ky[3]);
    }
  });
}

Vec3 LabelField::eval(const Vec3& x) const {
  return {x.x + sample_trilinear(yper[0], x), x.y + sample_trilinear(yper[1], x),
          m * x.z + sample_trilinear(yper[2], x)};
}

std::array<double, 3> LabelField::label_lengths() const {
  return {grid.length(0), grid.length(1), m * grid.length(2)};
}

LabelField initial_label(const ScalarField& rho_re0) {
  const Grid3& g = rho_re0.grid;
  for (double r : rho_re0.v)
    if (!(r > 0.0))
      throw config_error("label map: initial effective density must be positive");

  // Column means along x3 must agree across (x1, x2), otherwise the affine
  // plus periodic split does not exist on the torus.
  const int n1 = g.n[0], n2 = g.n[1], n3 = g.n[2];
  std::vector<double> colmean(size_t(n1) * n2, 0.0);
  for (int k = 0; k < n3; ++k)
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i)
        colmean[size_t(j) * n1 + i] += rho_re0.v[size_t(g.index(i, j, k))];
  double m = 0;
  for (double& c : colmean) {
    c /= n3;
    m += c;
  }
  m /= double(n1) * n2;
  for (double c : colmean)
    if (std::abs(c - m) > 1e-8 * std::abs(m))
      throw config_error(
          "label map: x3 column means of the initial density vary across "
          "(x1, x2); no periodic label split exists");

  LabelField lf;
  lf.grid = g;
  lf.m = m;
  for (int a = 0; a < 3; ++a) lf.yper[size_t(a)] = ScalarField(g);

  // y3 = m x3 + (spectral x3-antiderivative of rho_re0 - m).  For n3 == 1 the
  // density is constant along x3 and the remainder vanishes.
  if (n3 > 1) {
    const i64 ncol = i64(n1) * n2;
    std::vector<double> real_buf(rho_re0.v);
    const int nc3 = n3 / 2 + 1;
    std::vector<std::complex<double>> spec(size_t(ncol) * nc3);

    // x3 runs along the slowest storage axis: each of the n1*n2 columns is a
    // strided 1-D transform, all done by one many-plan.
    fftw_iodim dim;
    dim.n = n3;
    dim.is = int(ncol);
    dim.os = int(ncol);
    fftw_iodim howmany[2];
    howmany[0].n = n2;
    howmany[0].is = n1;
    howmany[0].os = n1;
    howmany[1].n = n1;
    howmany[1].is = 1;
    howmany[1].os = 1;
    fftw_plan fwd = fftw_plan_guru_dft_r2c(
        1, &dim, 2, howmany, real_buf.data(),
        reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);

    const double L3 = g.length(2);
    for (int kk = 0; kk < nc3; ++kk) {
      const bool zero = kk == 0 || (n3 % 2 == 0 && kk == n3 / 2);
      const std::complex<double> inv_ik =
          zero ? 0.0 : 1.0 / std::complex<double>(0.0, 2.0 * M_PI * kk / L3);
      for (i64 c = 0; c < ncol; ++c) spec[size_t(kk) * ncol + size_t(c)] *= inv_ik;
    }

    fftw_plan bwd = fftw_plan_guru_dft_c2r(
        1, &dim, 2, howmany, reinterpret_cast<fftw_complex*>(spec.data()),
        lf.yper[2].v.data(), FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
    for (double& x : lf.yper[2].v) x /= n3;
  }
  return lf;
}

void advance_label(LabelField& lf, const VelocityField& vel, double dt) {
  if (!(lf.grid == vel.grid))
    throw config_error("label transport: velocity grid does not match labels");
  const double umax = max_velocity(vel);
  if (dt * umax > lf.grid.min_active_h() * (1.0 + 1e-12))
    throw cfl_error("label transport rejected: dt * max|u| exceeds grid spacing");

  const Grid3& g = lf.grid;
  VecField next;
  for (int a = 0; a < 3; ++a) next[size_t(a)] = ScalarField(g);
  const double A[3] = {1.0, 1.0, lf.m};

  parallel_for(g.ncells(), [&](i64 lo, i64 hi) {
    int i, j, k;
    for (i64 idx = lo; idx < hi; ++idx) {
      g.coords(idx, i, j, k);
      const Vec3 x = g.node(i, j, k);

      // RK4 back-trace along the frozen velocity field.
      const Vec3 k1 = sample_velocity(vel, x);
      const Vec3 k2 = sample_velocity(vel, x - (dt / 2) * k1);
      const Vec3 k3 = sample_velocity(vel, x - (dt / 2) * k2);
      const Vec3 k4 = sample_velocity(vel, x - dt * k3);
      const Vec3 xd = x - (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

      for (int a = 0; a < 3; ++a)
        next[size_t(a)].v[size_t(idx)] =
            sample_trilinear(lf.yper[size_t(a)], xd) + A[a] * (xd[a] - x[a]);
    }
  });
  lf.yper = std::move(next);
}

double verify_density_identity(const LabelField& lf, const ScalarField& rho_re) {
  if (!(rho_re.grid == lf.grid))
    throw config_error("density identity: field grids differ");

  // Jacobian rows: dy_i/dx_j = A_ij + d yper_i / dx_j.
  std::array<ScalarField, 9> dq;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) dq[size_t(3 * i + j)] = deriv4(lf.yper[size_t(i)], j);

  const double A[3] = {1.0, 1.0, lf.m};
  double num = 0, den = 0;
  for (i64 c = 0; c < lf.grid.ncells(); ++c) {
    double J[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        J[i][j] = (i == j ? A[i] : 0.0) + dq[size_t(3 * i + j)].v[size_t(c)];
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    const double r = det - rho_re.v[size_t(c)];
    num += r * r;
    den += rho_re.v[size_t(c)] * rho_re.v[size_t(c)];
  }
  return std::sqrt(num / den);
}

InverseMap::InverseMap(const LabelField& lf, double tol, int max_iter)
    : lf_(lf), tol_(tol), max_iter_(max_iter) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      grad_[size_t(3 * i + j)] = deriv4(lf_.yper[size_t(i)], j);
}

namespace {

// Solve the 3x3 system J d = r by elimination with partial pivoting.
bool solve3(double J[3][3], const double r[3], double d[3]) {
  double a[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = J[i][j];
    a[i][3] = r[i];
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int i = c + 1; i < 3; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    if (std::abs(a[piv][c]) < 1e-300) return false;
    if (piv != c)
      for (int j = 0; j < 4; ++j) std::swap(a[c][j], a[piv][j]);
    for (int i = c + 1; i < 3; ++i) {
      const double f = a[i][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[i][j] -= f * a[c][j];
    }
  }
  for (int i = 2; i >= 0; --i) {
    double s = a[i][3];
    for (int j = i + 1; j < 3; ++j) s -= a[i][j] * d[j];
    d[i] = s / a[i][i];
  }
  return true;
}

double wrap_delta(double d, double L) { return d - L * std::round(d / L); }

}  // namespace

Vec3 InverseMap::query(const Vec3& y) const {
  // Affine inverse as the cold start.
  return query(y, {y.x, y.y, y.z / lf_.m});
}

Vec3 InverseMap::query(const Vec3& y, const Vec3& guess) const {
  const auto lens = lf_.label_lengths();
  const double A[3] = {1.0, 1.0, lf_.m};

  Vec3 x = guess;
  const auto residual = [&](const Vec3& xq, double r[3]) {
    const Vec3 yx = lf_.eval(xq);
    double n2 = 0;
    for (int a = 0; a < 3; ++a) {
      r[a] = wrap_delta(y[a] - yx[a], lens[size_t(a)]);
      n2 += r[a] * r[a];
    }
    return n2;
  };

  double r[3];
  double n2 = residual(x, r);
  const double tol2 = tol_ * tol_;
  for (int it = 0; it < max_iter_; ++it) {
    if (n2 <= tol2) return x;
    double J[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        J[i][j] = (i == j ? A[i] : 0.0) +
                  sample_trilinear(grad_[size_t(3 * i + j)], x);
    double d[3];
    if (!solve3(J, r, d))
      throw inversion_error("inverse map: singular Jacobian during Newton");

    // Damp until the residual actually decreases.
    double step = 1.0;
    for (int half = 0; half < 30; ++half) {
      const Vec3 xn{x.x + step * d[0], x.y + step * d[1], x.z + step * d[2]};
      double rn[3];
      const double n2n = residual(xn, rn);
      if (n2n < n2 || n2n <= tol2) {
        x = xn;
        n2 = n2n;
        for (int a = 0; a < 3; ++a) r[a] = rn[a];
        break;
      }
      step *= 0.5;
      if (half == 29)
        throw inversion_error("inverse map: line search stalled");
    }
  }
  if (n2 <= tol2) return x;
  throw inversion_error("inverse map: Newton did not converge");
}

}  // namespace swlw
