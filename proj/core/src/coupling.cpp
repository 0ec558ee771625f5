#include "swlw/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "swlw/errors.hpp"

namespace swlw {

double resolve_delta(const CouplingParams& p, const Grid3& g) {
  if (p.delta < 0.0) throw config_error("mollifier radius must be >= 0");
  return p.delta == 0.0 ? 4.0 * g.max_active_h() : p.delta;
}

MollifierKernel build_mollifier(double delta, const Grid3& g) {
  if (!(delta >= 2.0 * g.max_active_h()))
    throw config_error("mollifier radius below 2 grid spacings is unresolved");

  int reach[3] = {0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    if (!g.axis_active(a)) continue;
    reach[a] = int(std::ceil(delta / g.h[a]));
    if (2 * reach[a] + 1 > g.n[a])
      throw config_error("mollifier radius exceeds half the box");
  }

  MollifierKernel ker;
  ker.delta = delta;
  size_t center = 0;
  double total = 0.0;
  for (int o3 = -reach[2]; o3 <= reach[2]; ++o3)
    for (int o2 = -reach[1]; o2 <= reach[1]; ++o2)
      for (int o1 = -reach[0]; o1 <= reach[0]; ++o1) {
        const double r2 = o1 * g.h[0] * o1 * g.h[0] + o2 * g.h[1] * o2 * g.h[1] +
                          o3 * g.h[2] * o3 * g.h[2];
        const double q = r2 / (delta * delta);
        if (q >= 1.0) continue;
        MollifierKernel::Tap tap;
        tap.o[0] = o1;
        tap.o[1] = o2;
        tap.o[2] = o3;
        tap.w = std::exp(-1.0 / (1.0 - q));
        if (o1 == 0 && o2 == 0 && o3 == 0) center = ker.taps.size();
        total += tap.w;
        ker.taps.push_back(tap);
      }

  for (auto& t : ker.taps) t.w /= total;
  // Fold the normalization roundoff into the center tap: the weights then
  // sum to 1 exactly and constants pass through the convolution unchanged.
  double sum = 0.0;
  for (const auto& t : ker.taps) sum += t.w;
  ker.taps[center].w += 1.0 - sum;
  return ker;
}

ScalarField MollifierKernel::convolve(const ScalarField& f) const {
  const Grid3& g = f.grid;
  ScalarField out(g);
  parallel_for(g.ncells(), [&](i64 lo, i64 hi) {
    int i, j, k;
    for (i64 idx = lo; idx < hi; ++idx) {
      g.coords(idx, i, j, k);
      double s = 0.0;
      for (const auto& t : taps) {
        const i64 nb = g.index(g.wrap(i + t.o[0], 0), g.wrap(j + t.o[1], 1),
                               g.wrap(k + t.o[2], 2));
        s += t.w * f.v[size_t(nb)];
      }
      out.v[size_t(idx)] = s;
    }
  });
  return out;
}

Grid3 lagrangian_grid(const Grid3& eulerian, double m) {
  if (!(m > 0.0)) throw config_error("label grid: mean density must be positive");
  return Grid3::torus(eulerian.n, {eulerian.length(0), eulerian.length(1),
                                   m * eulerian.length(2)});
}

ScalarField potential_field(const ScalarField& rho_re, const InverseMap& inv,
                            double kappa, const Grid3& label_grid,
                            std::vector<Vec3>* guess) {
  ScalarField V(label_grid);
  if (kappa == 0.0) return V;

  const bool warm = guess && guess->size() == size_t(label_grid.ncells());
  if (guess && !warm) guess->assign(size_t(label_grid.ncells()), Vec3{});

  parallel_for(label_grid.ncells(), [&](i64 lo, i64 hi) {
    int i, j, k;
    for (i64 idx = lo; idx < hi; ++idx) {
      label_grid.coords(idx, i, j, k);
      const Vec3 y = label_grid.node(i, j, k);
      const Vec3 x = warm ? inv.query(y, (*guess)[size_t(idx)]) : inv.query(y);
      if (guess) (*guess)[size_t(idx)] = x;
      const double rho = sample_trilinear(rho_re, x);
      V.v[size_t(idx)] = kappa / rho;
    }
  });
  return V;
}

ScalarField shortwave_energy_on_eulerian(const ScalarField& w_label,
                                         const LabelField& labels) {
  ScalarField out(labels.grid);
  parallel_for(labels.grid.ncells(), [&](i64 lo, i64 hi) {
    int i, j, k;
    for (i64 idx = lo; idx < hi; ++idx) {
      labels.grid.coords(idx, i, j, k);
      out.v[size_t(idx)] = sample_trilinear(w_label, labels.eval(labels.grid.node(i, j, k)));
    }
  });
  return out;
}

VecField force_source(const ScalarField& w_eulerian, const MollifierKernel& kernel,
                      double alpha) {
  VecField out;
  if (alpha == 0.0) {
    for (int a = 0; a < 3; ++a) out[size_t(a)] = ScalarField(w_eulerian.grid);
    return out;
  }
  ScalarField smoothed = kernel.convolve(w_eulerian);
  for (int a = 0; a < 3; ++a) {
    out[size_t(a)] = deriv4(smoothed, a);
    for (double& x : out[size_t(a)].v) x *= alpha;
  }
  return out;
}

void refresh_couplings(const CoupledState& cs, const CouplingParams& p,
                       CoevolveWorkspace& ws) {
  const bool has_spinor = !cs.spinor.empty();

  if (!ws.kernel_ready) {
    ws.kernel = build_mollifier(resolve_delta(p, cs.fluid.grid), cs.fluid.grid);
    ws.kernel_ready = true;
  }

  // Momentum forcing from the short-wave charge density seen in the
  // Eulerian frame.
  if (has_spinor && p.alpha != 0.0) {
    ScalarField w_label = observable_field(cs.spinor, Observable::charge, ws.alpha);
    ScalarField w_eul = shortwave_energy_on_eulerian(w_label, cs.labels);
    ws.force = force_source(w_eul, ws.kernel, p.alpha);
    ws.force_active = true;
  } else {
    for (int a = 0; a < 3; ++a) ws.force[size_t(a)] = ScalarField(cs.fluid.grid);
    ws.force_active = false;
  }

  // Potential feedback on the label grid.
  if (has_spinor && p.kappa != 0.0) {
    InverseMap inv(cs.labels);
    ws.V_label = potential_field(density_field(cs.fluid), inv, p.kappa,
                                 cs.spinor.grid, &ws.inv_guess);
  } else if (has_spinor) {
    ws.V_label = ScalarField(cs.spinor.grid);
  } else {
    ws.V_label = ScalarField();
  }
}

PotentialProvider frozen_potential_provider(const ScalarField& V, double lambda,
                                            const AlphaSet& alpha) {
  const bool vzero = V.v.empty() || V.max_abs() == 0.0;
  if (lambda == 0.0 && vzero) return nullptr;  // free propagation path
  return [&V, lambda, &alpha, vzero](double, const SpinorField& stage,
                                     PotentialField& out) {
    parallel_for(stage.nodes(), [&](i64 lo, i64 hi) {
      for (i64 n = lo; n < hi; ++n) {
        Mat4c b = lambda != 0.0
                      ? thirring_matrix(stage.get(n), alpha) * cplx(lambda)
                      : Mat4c::zero();
        if (!vzero) b = b + Mat4c::identity() * cplx(V.v[size_t(n)]);
        out.b[size_t(n)] = b;
      }
    });
  };
}

CoupledState coevolve_step(const CoupledState& cs, const CouplingParams& p,
                           double dt, CoevolveWorkspace& ws) {
  if (!(dt > 0.0)) throw config_error("coevolve: dt must be positive");
  const bool has_spinor = !cs.spinor.empty();

  if (!(ws.stamp == cs.time)) {
    refresh_couplings(cs, p, ws);
    ws.stamp = cs.time;
  }

  CoupledState next = cs;
  const VecField* src = ws.force_active ? &ws.force : nullptr;

  if (cs.evolve_fluid) {
    next.fluid = fv_step(cs.fluid, src, dt / 2, p.cfl, p.recovery_tol,
                         p.recovery_max_iter);
    const VelocityField vel = make_velocity_field(next.fluid);
    advance_label(next.labels, vel, dt);
  }

  if (has_spinor) {
    const PotentialProvider provider =
        frozen_potential_provider(ws.V_label, p.lambda, ws.alpha);
    next.spinor = step_dirac(cs.spinor, provider, cs.time, dt, p.cfl);
  }

  next.time = cs.time + dt;

  if (cs.evolve_fluid) {
    refresh_couplings(next, p, ws);
    ws.stamp = next.time;
    next.fluid = fv_step(next.fluid, ws.force_active ? &ws.force : nullptr, dt / 2,
                         p.cfl, p.recovery_tol, p.recovery_max_iter);
  } else {
    ws.stamp = next.time;  // background frozen; couplings unchanged
  }
  return next;
}

namespace {

struct PrimSnapshot {
  std::vector<double> rho, u1, u2, u3;
};

PrimSnapshot snapshot_prims(const FluidField& f, const CouplingParams& p) {
  PrimField w = recover_primitives(f, p.recovery_tol, p.recovery_max_iter);
  return {std::move(w.rho), std::move(w.u1), std::move(w.u2), std::move(w.u3)};
}

double traj_distance(const std::vector<PrimSnapshot>& a,
                     const std::vector<PrimSnapshot>& b, double vol) {
  double dmax = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    double s = 0.0;
    for (size_t i = 0; i < a[k].rho.size(); ++i) {
      const double dr = a[k].rho[i] - b[k].rho[i];
      const double d1 = a[k].u1[i] - b[k].u1[i];
      const double d2 = a[k].u2[i] - b[k].u2[i];
      const double d3 = a[k].u3[i] - b[k].u3[i];
      s += dr * dr + d1 * d1 + d2 * d2 + d3 * d3;
    }
    dmax = std::max(dmax, std::sqrt(s * vol));
  }
  return dmax;
}

}  // namespace

PicardResult picard_solve(const CoupledState& init, const CouplingParams& p,
                          double t_final, double tol, int max_iter) {
  if (init.spinor.empty())
    throw config_error("iterative solve needs a short-wave field");
  if (!(t_final > 0.0)) throw config_error("iterative solve: t_final must be > 0");
  if (max_iter < 1) throw config_error("iterative solve: max_iter must be >= 1");

  const Grid3& g = init.fluid.grid;
  const double dt0 = fluid_cfl_dt(init.fluid, p.cfl);
  const int nsteps = int(std::ceil(t_final / dt0 - 1e-12));
  const double dt = t_final / nsteps;
  if (i64(nsteps + 1) * g.ncells() > i64(5e7))
    throw config_error(
        "iterative solve: trajectory storage too large; use a smaller grid or "
        "shorter horizon");

  PicardResult res;
  res.times.resize(size_t(nsteps) + 1);
  for (int k = 0; k <= nsteps; ++k) res.times[size_t(k)] = k * dt;

  const MollifierKernel kernel = build_mollifier(resolve_delta(p, g), g);
  const AlphaSet alpha = build_alpha_set();

  // The short-wave observable is propagated by its wave equation once: it
  // does not depend on the fluid iterate, only its composition with the
  // labels does.
  const ObservablePair wc0 = initial_observable(init.spinor, Observable::charge, alpha);
  WaveEvolver charge_wave(wc0.w, wc0.wt);
  std::vector<ScalarField> w_label_t(size_t(nsteps) + 1);
  for (int k = 0; k <= nsteps; ++k)
    w_label_t[size_t(k)] = charge_wave.value(res.times[size_t(k)]);

  const auto compose_force = [&](const LabelField& labels, int k) {
    return force_source(shortwave_energy_on_eulerian(w_label_t[size_t(k)], labels),
                        kernel, p.alpha);
  };

  // One fluid+label trajectory under a fixed forcing history.
  struct Traj {
    std::vector<FluidField> fluid;
    std::vector<LabelField> labels;
    std::vector<PrimSnapshot> prims;
  };
  const auto evolve = [&](const std::vector<VecField>& force_t) {
    Traj tr;
    tr.fluid.reserve(size_t(nsteps) + 1);
    tr.labels.reserve(size_t(nsteps) + 1);
    tr.prims.reserve(size_t(nsteps) + 1);
    FluidField f = init.fluid;
    LabelField lf = init.labels;
    for (int k = 0; k <= nsteps; ++k) {
      tr.fluid.push_back(f);
      tr.labels.push_back(lf);
      tr.prims.push_back(snapshot_prims(f, p));
      if (k == nsteps) break;
      const VecField& src = force_t[size_t(k)];
      const VelocityField vel = make_velocity_field(f);
      advance_label(lf, vel, dt);
      f = fv_step(f, p.alpha != 0.0 ? &src : nullptr, dt, p.cfl, p.recovery_tol,
                  p.recovery_max_iter);
    }
    return tr;
  };

  // Iterate 0: the initial composition frozen in time.
  std::vector<VecField> force_t(size_t(nsteps) + 1);
  {
    const VecField f0 = compose_force(init.labels, 0);
    for (auto& f : force_t) f = f0;
  }
  Traj prev = evolve(force_t);

  const double vol = g.cell_volume();
  bool rising = false;
  for (int it = 1; it <= max_iter; ++it) {
    for (int k = 0; k <= nsteps; ++k)
      force_t[size_t(k)] = compose_force(prev.labels[size_t(k)], k);
    Traj cur = evolve(force_t);
    const double d = traj_distance(cur.prims, prev.prims, vol);
    res.distances.push_back(d);
    res.iterations = it;
    prev = std::move(cur);
    if (d <= tol) {
      res.converged = true;
      break;
    }
    if (res.distances.size() >= 2 && d >= res.distances[res.distances.size() - 2]) {
      if (rising) {
        res.diverged = true;
        break;
      }
      rising = true;
    } else {
      rising = false;
    }
  }

  res.fluid = std::move(prev.fluid);
  res.labels = std::move(prev.labels);

  // Potential history along the (final) trajectory, then the short-wave
  // trajectory against it.
  res.potential.resize(size_t(nsteps) + 1);
  std::vector<Vec3> guess;
  for (int k = 0; k <= nsteps; ++k) {
    InverseMap inv(res.labels[size_t(k)]);
    res.potential[size_t(k)] =
        potential_field(density_field(res.fluid[size_t(k)]), inv, p.kappa,
                        init.spinor.grid, &guess);
  }
  res.spinor = dirac_full_solve(init.spinor, res.times, res.potential, p, true);
  return res;
}

std::vector<SpinorField> dirac_full_solve(const SpinorField& u0,
                                          const std::vector<double>& times,
                                          const std::vector<ScalarField>& potential,
                                          const CouplingParams& p,
                                          bool thirring_from_wave) {
  if (times.size() < 2 || potential.size() != times.size())
    throw config_error("short-wave solve: potential history and times disagree");
  const Grid3& g = u0.grid;
  const AlphaSet alpha = build_alpha_set();

  // Wave-propagated interaction coefficients (charge and pseudoscalar).
  std::unique_ptr<WaveEvolver> wc, wp;
  if (thirring_from_wave && p.lambda != 0.0) {
    const ObservablePair c0 = initial_observable(u0, Observable::charge, alpha);
    const ObservablePair p0 = initial_observable(u0, Observable::pseudo, alpha);
    wc = std::make_unique<WaveEvolver>(c0.w, c0.wt);
    wp = std::make_unique<WaveEvolver>(p0.w, p0.wt);
  }

  std::vector<SpinorField> out;
  out.reserve(times.size());
  out.push_back(u0);
  SpinorField u = u0;
  const double dt_max = dirac_cfl_dt(g, p.cfl);

  for (size_t k = 0; k + 1 < times.size(); ++k) {
    const double t0 = times[k], t1 = times[k + 1];
    const int nsub = std::max(1, int(std::ceil((t1 - t0) / dt_max - 1e-12)));
    const double dts = (t1 - t0) / nsub;

    const ScalarField& V0 = potential[k];
    const ScalarField& V1 = potential[k + 1];
    const PotentialProvider provider = [&](double t, const SpinorField& stage,
                                           PotentialField& B) {
      const double th = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
      ScalarField wcf, wpf;
      if (wc) {
        wcf = wc->value(t);
        wpf = wp->value(t);
      }
      parallel_for(stage.nodes(), [&](i64 lo, i64 hi) {
        for (i64 n = lo; n < hi; ++n) {
          Mat4c b = Mat4c::zero();
          if (p.lambda != 0.0) {
            if (wc) {
              // U = wc I - wp b, assembled from the wave-evolved observables.
              b = Mat4c::identity() * cplx(p.lambda * wcf.v[size_t(n)]) -
                  alpha.b * cplx(p.lambda * wpf.v[size_t(n)]);
            } else {
              b = thirring_matrix(stage.get(n), alpha) * cplx(p.lambda);
            }
          }
          const double V = (1.0 - th) * V0.v[size_t(n)] + th * V1.v[size_t(n)];
          b = b + Mat4c::identity() * cplx(V);
          B.b[size_t(n)] = b;
        }
      });
    };

    for (int s = 0; s < nsub; ++s)
      u = step_dirac(u, provider, t0 + s * dts, dts, p.cfl);
    out.push_back(u);
  }
  return out;
}

}  // namespace swlw
