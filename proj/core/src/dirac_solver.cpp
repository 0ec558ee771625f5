#include "swlw/dirac_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "swlw/errors.hpp"

namespace swlw {

SpinorField dirac_rhs(const SpinorField& f, const PotentialField* B,
                      const AlphaSet& alpha) {
  const Grid3& g = f.grid;
  if (B && !(B->grid == g))
    throw config_error("interaction field grid does not match spinor grid");

  SpinorField out(g);
  const i64 strides[3] = {1, g.n[0], i64(g.n[0]) * g.n[1]};

  parallel_for(g.ncells(), [&](i64 lo, i64 hi) {
    cplx du[4], acc[4], tmp[4];
    int i, j, k;
    for (i64 idx = lo; idx < hi; ++idx) {
      g.coords(idx, i, j, k);
      for (int c = 0; c < 4; ++c) acc[c] = 0.0;

      for (int a = 0; a < 3; ++a) {
        if (!g.axis_active(a)) continue;
        const int q = a == 0 ? i : (a == 1 ? j : k);
        const i64 base = idx - i64(q) * strides[a];
        const i64 p1 = base + i64(g.wrap(q + 1, a)) * strides[a];
        const i64 m1 = base + i64(g.wrap(q - 1, a)) * strides[a];
        const i64 p2 = base + i64(g.wrap(q + 2, a)) * strides[a];
        const i64 m2 = base + i64(g.wrap(q - 2, a)) * strides[a];
        const double c1 = 8.0 / (12.0 * g.h[a]);
        const double c2 = 1.0 / (12.0 * g.h[a]);
        for (int c = 0; c < 4; ++c) {
          du[c] = c1 * (f.data[size_t(4 * p1 + c)] - f.data[size_t(4 * m1 + c)]) -
                  c2 * (f.data[size_t(4 * p2 + c)] - f.data[size_t(4 * m2 + c)]);
        }
        alpha.a[size_t(a)].apply(du, tmp);
        for (int c = 0; c < 4; ++c) acc[c] += tmp[c];
      }

      if (B) {
        cplx u[4];
        for (int c = 0; c < 4; ++c) u[c] = f.data[size_t(4 * idx + c)];
        B->b[size_t(idx)].apply(u, tmp);
        const cplx mi(0, -1);
        for (int c = 0; c < 4; ++c) acc[c] += mi * tmp[c];
      }

      for (int c = 0; c < 4; ++c) out.data[size_t(4 * idx + c)] = acc[c];
    }
  });
  return out;
}

double dirac_cfl_dt(const Grid3& g, double cfl) { return cfl * g.min_active_h(); }

namespace {

void axpy(SpinorField& y, double a, const SpinorField& x) {
  for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

SpinorField stage_state(const SpinorField& f, double a, const SpinorField& k) {
  SpinorField s = f;
  axpy(s, a, k);
  return s;
}

}  // namespace

SpinorField step_dirac(const SpinorField& f, const PotentialProvider& provider,
                       double t, double dt, double cfl) {
  if (!(cfl > 0.0) || cfl > 0.5)
    throw cfl_error("dirac safety factor must lie in (0, 0.5]");
  const double dt_max = dirac_cfl_dt(f.grid, cfl) * (1.0 + 1e-12);
  if (!(dt > 0.0) || dt > dt_max)
    throw cfl_error("dirac step rejected: dt exceeds cfl * min spacing");

  const AlphaSet alpha = build_alpha_set();
  PotentialField B(f.grid);

  const auto rhs = [&](double ts, const SpinorField& stage) {
    if (!provider) return dirac_rhs(stage, nullptr, alpha);
    provider(ts, stage, B);
    return dirac_rhs(stage, &B, alpha);
  };

  SpinorField k1 = rhs(t, f);
  SpinorField k2 = rhs(t + dt / 2, stage_state(f, dt / 2, k1));
  SpinorField k3 = rhs(t + dt / 2, stage_state(f, dt / 2, k2));
  SpinorField k4 = rhs(t + dt, stage_state(f, dt, k3));

  SpinorField out = f;
  axpy(out, dt / 6, k1);
  axpy(out, dt / 3, k2);
  axpy(out, dt / 3, k3);
  axpy(out, dt / 6, k4);
  return out;
}

ScalarField observable_field(const SpinorField& f, Observable which,
                             const AlphaSet& alpha) {
  ScalarField out(f.grid);
  parallel_for(f.nodes(), [&](i64 lo, i64 hi) {
    for (i64 n = lo; n < hi; ++n) {
      const Spinor s = f.get(n);
      if (which == Observable::charge) {
        out.v[size_t(n)] = s.norm2();
      } else {
        cplx bs[4];
        alpha.b.apply(s.c.data(), bs);
        cplx p = 0;
        for (int c = 0; c < 4; ++c) p += std::conj(s.c[size_t(c)]) * bs[c];
        out.v[size_t(n)] = p.real();
      }
    }
  });
  return out;
}

ObservablePair initial_observable(const SpinorField& f, Observable which,
                                  const AlphaSet& alpha) {
  ObservablePair pair;
  pair.w = observable_field(f, which, alpha);

  // Per-axis current fields, then their divergence with the solver stencil.
  pair.wt = ScalarField(f.grid);
  for (int a = 0; a < 3; ++a) {
    if (!f.grid.axis_active(a)) continue;
    ScalarField cur(f.grid);
    const Mat4c m = which == Observable::charge ? alpha.a[size_t(a)]
                                                : alpha.b * alpha.a[size_t(a)];
    parallel_for(f.nodes(), [&](i64 lo, i64 hi) {
      cplx tmp[4];
      for (i64 n = lo; n < hi; ++n) {
        const Spinor s = f.get(n);
        m.apply(s.c.data(), tmp);
        cplx v = 0;
        for (int c = 0; c < 4; ++c) v += std::conj(s.c[size_t(c)]) * tmp[c];
        cur.v[size_t(n)] = v.real();
      }
    });
    ScalarField d = deriv4(cur, a);
    for (size_t i = 0; i < pair.wt.v.size(); ++i) pair.wt.v[i] += d.v[i];
  }
  return pair;
}

double total_charge(const SpinorField& f) {
  const double vol = f.grid.cell_volume();
  double q = 0;
  for (i64 n = 0; n < f.nodes(); ++n) q += f.get(n).norm2();
  return q * vol;
}

double potential_hypotheses_residual(const PotentialField& B, const AlphaSet& alpha,
                                     int samples, std::uint64_t seed) {
  if (B.b.empty()) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<i64> pick(0, i64(B.b.size()) - 1);
  double r = 0;
  for (int s = 0; s < samples; ++s) {
    const Mat4c& m = B.b[size_t(pick(rng))];
    r = std::max(r, m.hermiticity_residual());
    for (int a = 0; a < 3; ++a)
      r = std::max(r, commutator_max_abs(m, alpha.a[size_t(a)]));
  }
  return r;
}

}  // namespace swlw
