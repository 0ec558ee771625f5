#include "swlw/rel_euler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "swlw/errors.hpp"

namespace swlw {

void Eos::eval(double rho, double& p, double& dp) const {
  p = sigma2 * rho;
  dp = sigma2;
}

double Eos::pressure(double rho) const { return sigma2 * rho; }

void Eos::validate(double eps) const {
  if (!(sigma2 > 0.0)) throw config_error("eos: sigma2 must be positive");
  if (!(eps > 0.0)) throw config_error("eos: eps must be positive");
  if (!(sigma2 * eps * eps < 1.0))
    throw config_error("eos: sound speed must stay below the light speed 1/eps");
  if (!(rho_min >= 0.0) || !(rho_max > rho_min))
    throw config_error("eos: density interval is empty");
}

double Mat3::max_abs() const {
  double m = 0;
  for (double x : e) m = std::max(m, std::abs(x));
  return m;
}

namespace {

// 1/(1 - eps^2 |u|^2), rejecting superluminal input.
double gamma2(const Vec3& u, double eps) {
  const double s = 1.0 - eps * eps * u.norm2();
  if (!(s > 0.0))
    throw recovery_error("primitive state is superluminal: eps^2 |u|^2 >= 1", -1);
  return 1.0 / s;
}

}  // namespace

Cons prim_to_cons(const Prim& w, double eps, const Eos& eos) {
  const double p = eos.pressure(w.rho);
  const double g2 = gamma2(w.u, eps);
  const double e2 = eps * eps;
  Cons c;
  c.D = (w.rho + e2 * e2 * w.u.norm2() * p) * g2;
  c.S = ((w.rho + e2 * p) * g2) * w.u;
  return c;
}

RelVars rel_variables(const Prim& w, double eps, const Eos& eos, PtildeForm form) {
  const double p = eos.pressure(w.rho);
  const double e2 = eps * eps;
  const double u2 = w.u.norm2();
  const double g2 = gamma2(w.u, eps);

  RelVars r;
  r.rho_re = (w.rho + e2 * e2 * u2 * p) * g2;
  // u_re = (rho + eps^2 p) / (rho + eps^4 |u|^2 p) * u
  const double scale = (w.rho + e2 * p) / (w.rho + e2 * e2 * u2 * p);
  r.u_re = scale * w.u;

  // Pressure-loss tensor: coef * u_re (x) u_re.  The corrected coefficient
  // carries a pressure factor; the transcribed one omits it and does not
  // close the flux identity (kept for the negative control).
  const double base = r.rho_re * e2 * (e2 * u2 - 1.0) / (w.rho + e2 * p);
  const double coef = form == PtildeForm::corrected ? base * p : base;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.ptilde.at(i, j) = coef * r.u_re[i] * r.u_re[j];
  return r;
}

Prim cons_to_prim(const Cons& c, double eps, const Eos& eos, double tol,
                  int max_iter) {
  return [&]() -> Prim {
    const double e2 = eps * eps;
    const double s2 = c.S.norm2();
    if (!(c.D > 0.0)) throw recovery_error("recovery: D must be positive", -1);

    const double ftol = tol * std::max(1.0, c.D);
    const auto fval = [&](double rho) {
      return rho - c.D + e2 * s2 / (c.D + e2 * eos.pressure(rho));
    };

    // Physical roots lie in (rho_min, D]: f(D) >= 0 and f is increasing.
    double hi = c.D;
    double lo = std::max(eos.rho_min, 0.0);
    if (fval(lo) > 0.0 && s2 > 0.0)
      throw recovery_error("recovery: momentum too large for the density window", -1);

    double rho = c.D;  // exact when S = 0
    bool done = std::abs(fval(rho)) <= ftol;
    for (int it = 0; it < max_iter && !done; ++it) {
      double p, dp;
      eos.eval(rho, p, dp);
      const double denom = c.D + e2 * p;
      const double f = rho - c.D + e2 * s2 / denom;
      const double df = 1.0 - e2 * e2 * s2 * dp / (denom * denom);
      double next = rho - f / df;
      if (f > 0.0) hi = rho; else lo = rho;
      if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
      rho = next;
      done = std::abs(fval(rho)) <= ftol;
    }
    if (!done) throw recovery_error("recovery: Newton did not converge", -1);
    if (!eos.in_domain(rho))
      throw recovery_error("recovery: density left the admissible interval", -1);

    Prim w;
    w.rho = rho;
    const double vmag = std::sqrt(s2) / (c.D + e2 * eos.pressure(rho));
    if (eps * vmag >= 1.0)
      throw recovery_error("recovery: recovered velocity is superluminal", -1);
    if (s2 > 0.0) w.u = c.S * (vmag / std::sqrt(s2));
    return w;
  }();
}

Cons flux(const Prim& w, double eps, const Eos& eos, int axis) {
  const double p = eos.pressure(w.rho);
  const double g2 = gamma2(w.u, eps);
  const double G = (w.rho + eps * eps * p) * g2;
  Cons f;
  f.D = G * w.u[axis];
  for (int j = 0; j < 3; ++j) f.S[j] = G * w.u[j] * w.u[axis];
  f.S[axis] += p;
  return f;
}

double max_signal_speed(double eps) { return 1.0 / eps; }

FluidField::FluidField(const Grid3& g, double eps_, const Eos& eos_)
    : grid(g),
      eps(eps_),
      eos(eos_),
      D(size_t(g.ncells()), 1.0),
      S1(size_t(g.ncells()), 0.0),
      S2(size_t(g.ncells()), 0.0),
      S3(size_t(g.ncells()), 0.0) {}

PrimField recover_primitives(const FluidField& f, double tol, int max_iter) {
  const i64 nc = f.grid.ncells();
  PrimField w;
  w.rho.resize(size_t(nc));
  w.u1.resize(size_t(nc));
  w.u2.resize(size_t(nc));
  w.u3.resize(size_t(nc));

  // Cells are independent; the first failure (lowest index) wins so the
  // reported cell is deterministic under any thread count.
  std::vector<i64> bad(size_t(num_threads()), -1);
  std::atomic<int> slot{0};
  parallel_for(nc, [&](i64 lo, i64 hi) {
    const int my = slot.fetch_add(1);
    for (i64 i = lo; i < hi; ++i) {
      Cons c{f.D[size_t(i)], {f.S1[size_t(i)], f.S2[size_t(i)], f.S3[size_t(i)]}};
      try {
        Prim p = cons_to_prim(c, f.eps, f.eos, tol, max_iter);
        w.rho[size_t(i)] = p.rho;
        w.u1[size_t(i)] = p.u.x;
        w.u2[size_t(i)] = p.u.y;
        w.u3[size_t(i)] = p.u.z;
      } catch (const recovery_error&) {
        if (bad[size_t(my)] < 0) bad[size_t(my)] = i;
        return;
      }
    }
  });
  i64 first_bad = -1;
  for (i64 b : bad)
    if (b >= 0 && (first_bad < 0 || b < first_bad)) first_bad = b;
  if (first_bad >= 0)
    throw recovery_error("recovery failed in cell", first_bad);
  return w;
}

double fluid_cfl_dt(const FluidField& f, double cfl) {
  const double a = max_signal_speed(f.eps);
  double inv = 0;
  for (int d = 0; d < 3; ++d)
    if (f.grid.axis_active(d)) inv += 1.0 / f.grid.h[d];
  if (inv == 0.0) inv = 1.0 / f.grid.h[0];
  return cfl / (a * inv);
}

namespace {

struct Rate {
  std::vector<double> D, S1, S2, S3;
  explicit Rate(i64 n) : D(size_t(n), 0.0), S1(size_t(n), 0.0), S2(size_t(n), 0.0), S3(size_t(n), 0.0) {}
};

// Rusanov flux divergence plus momentum source, evaluated on prims that the
// caller has already recovered.
void accumulate_rate(const FluidField& f, const PrimField& w, const VecField* source,
                     Rate& r) {
  const Grid3& g = f.grid;
  const i64 nc = g.ncells();
  const double a = max_signal_speed(f.eps);
  const i64 strides[3] = {1, g.n[0], i64(g.n[0]) * g.n[1]};

  std::fill(r.D.begin(), r.D.end(), 0.0);
  std::fill(r.S1.begin(), r.S1.end(), 0.0);
  std::fill(r.S2.begin(), r.S2.end(), 0.0);
  std::fill(r.S3.begin(), r.S3.end(), 0.0);

  for (int d = 0; d < 3; ++d) {
    if (!g.axis_active(d)) continue;
    // Interface flux between cell idx and its +1 neighbor along d, stored at
    // idx; the divergence update then reads two adjacent entries.
    const size_t nb_sz = size_t(nc);
    std::vector<double> FD(nb_sz), FS1(nb_sz), FS2(nb_sz), FS3(nb_sz);
    parallel_for(nc, [&](i64 lo, i64 hi) {
      int i, j, k;
      for (i64 idx = lo; idx < hi; ++idx) {
        g.coords(idx, i, j, k);
        const int q = d == 0 ? i : (d == 1 ? j : k);
        const i64 nb = idx - i64(q) * strides[d] + i64(g.wrap(q + 1, d)) * strides[d];

        const Prim wl{w.rho[size_t(idx)],
                      {w.u1[size_t(idx)], w.u2[size_t(idx)], w.u3[size_t(idx)]}};
        const Prim wr{w.rho[size_t(nb)],
                      {w.u1[size_t(nb)], w.u2[size_t(nb)], w.u3[size_t(nb)]}};
        const Cons fl = flux(wl, f.eps, f.eos, d);
        const Cons fr = flux(wr, f.eps, f.eos, d);
        const Cons ul{f.D[size_t(idx)],
                      {f.S1[size_t(idx)], f.S2[size_t(idx)], f.S3[size_t(idx)]}};
        const Cons ur{f.D[size_t(nb)],
                      {f.S1[size_t(nb)], f.S2[size_t(nb)], f.S3[size_t(nb)]}};

        FD[size_t(idx)] = 0.5 * (fl.D + fr.D) - 0.5 * a * (ur.D - ul.D);
        FS1[size_t(idx)] = 0.5 * (fl.S.x + fr.S.x) - 0.5 * a * (ur.S.x - ul.S.x);
        FS2[size_t(idx)] = 0.5 * (fl.S.y + fr.S.y) - 0.5 * a * (ur.S.y - ul.S.y);
        FS3[size_t(idx)] = 0.5 * (fl.S.z + fr.S.z) - 0.5 * a * (ur.S.z - ul.S.z);
      }
    });
    const double invh = 1.0 / g.h[d];
    parallel_for(nc, [&](i64 lo, i64 hi) {
      int i, j, k;
      for (i64 idx = lo; idx < hi; ++idx) {
        g.coords(idx, i, j, k);
        const int q = d == 0 ? i : (d == 1 ? j : k);
        const i64 mb = idx - i64(q) * strides[d] + i64(g.wrap(q - 1, d)) * strides[d];
        r.D[size_t(idx)] += (FD[size_t(mb)] - FD[size_t(idx)]) * invh;
        r.S1[size_t(idx)] += (FS1[size_t(mb)] - FS1[size_t(idx)]) * invh;
        r.S2[size_t(idx)] += (FS2[size_t(mb)] - FS2[size_t(idx)]) * invh;
        r.S3[size_t(idx)] += (FS3[size_t(mb)] - FS3[size_t(idx)]) * invh;
      }
    });
  }

  if (source) {
    for (i64 idx = 0; idx < nc; ++idx) {
      r.S1[size_t(idx)] += (*source)[0].v[size_t(idx)];
      r.S2[size_t(idx)] += (*source)[1].v[size_t(idx)];
      r.S3[size_t(idx)] += (*source)[2].v[size_t(idx)];
    }
  }
}

}  // namespace

FluidField fv_step(const FluidField& f, const VecField* source, double dt,
                   double cfl, double recovery_tol, int max_iter) {
  if (!(cfl > 0.0) || cfl > 1.0)
    throw cfl_error("fluid safety factor must lie in (0, 1]");
  if (!(dt > 0.0) || dt > fluid_cfl_dt(f, cfl) * (1.0 + 1e-12))
    throw cfl_error("fluid step rejected: dt exceeds the CFL bound");
  if (source)
    for (int a = 0; a < 3; ++a)
      if (!((*source)[size_t(a)].grid == f.grid))
        throw config_error("momentum source grid does not match fluid grid");

  const i64 nc = f.grid.ncells();
  Rate r(nc);

  // Heun / SSP-RK2: u1 = u + dt L(u);  u_next = (u + u1 + dt L(u1)) / 2.
  PrimField w = recover_primitives(f, recovery_tol, max_iter);
  accumulate_rate(f, w, source, r);

  FluidField u1 = f;
  for (i64 i = 0; i < nc; ++i) {
    u1.D[size_t(i)] += dt * r.D[size_t(i)];
    u1.S1[size_t(i)] += dt * r.S1[size_t(i)];
    u1.S2[size_t(i)] += dt * r.S2[size_t(i)];
    u1.S3[size_t(i)] += dt * r.S3[size_t(i)];
  }

  PrimField w1 = recover_primitives(u1, recovery_tol, max_iter);
  accumulate_rate(u1, w1, source, r);

  FluidField out = f;
  for (i64 i = 0; i < nc; ++i) {
    out.D[size_t(i)] = 0.5 * (f.D[size_t(i)] + u1.D[size_t(i)] + dt * r.D[size_t(i)]);
    out.S1[size_t(i)] = 0.5 * (f.S1[size_t(i)] + u1.S1[size_t(i)] + dt * r.S1[size_t(i)]);
    out.S2[size_t(i)] = 0.5 * (f.S2[size_t(i)] + u1.S2[size_t(i)] + dt * r.S2[size_t(i)]);
    out.S3[size_t(i)] = 0.5 * (f.S3[size_t(i)] + u1.S3[size_t(i)] + dt * r.S3[size_t(i)]);
  }
  return out;
}

double total_mass(const FluidField& f) {
  double s = 0;
  for (double x : f.D) s += x;
  return s * f.grid.cell_volume();
}

Vec3 total_momentum(const FluidField& f) {
  Vec3 s;
  for (size_t i = 0; i < f.D.size(); ++i) {
    s.x += f.S1[i];
    s.y += f.S2[i];
    s.z += f.S3[i];
  }
  return s * f.grid.cell_volume();
}

ScalarField density_field(const FluidField& f) {
  ScalarField d(f.grid);
  d.v = f.D;
  return d;
}

}  // namespace swlw
