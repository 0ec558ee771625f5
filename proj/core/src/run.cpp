#include "swlw/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <sstream>

#include "swlw/dirac_solver.hpp"
#include "swlw/errors.hpp"
#include "swlw/initial_conditions.hpp"
#include "swlw/io.hpp"
#include "swlw/lagrangian.hpp"
#include "swlw/wave_solver.hpp"

namespace swlw {

const std::vector<std::string> diagnostics_columns = {
    "time",         "total_mass",
    "momentum_x",   "momentum_y",
    "momentum_z",   "total_charge",
    "density_identity_residual", "wave_oracle_residual",
    "picard_distance"};

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

double rel_l2(const ScalarField& a, const ScalarField& b) {
  double num = 0, den = 0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const double d = a.v[i] - b.v[i];
    num += d * d;
    den += b.v[i] * b.v[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

CouplingParams coupling_params(const RunConfig& cfg) {
  CouplingParams p;
  p.epsilon = cfg.epsilon;
  p.lambda = cfg.lambda;
  p.kappa = cfg.kappa;
  p.alpha = cfg.alpha;
  p.delta = cfg.delta;
  p.cfl = cfg.cfl;
  p.recovery_tol = cfg.recovery_tol;
  p.recovery_max_iter = cfg.recovery_max_iter;
  return p;
}

struct Engine {
  RunConfig cfg;
  CouplingParams params;
  Grid3 grid, label_grid;
  CoupledState st;
  AlphaSet alpha = build_alpha_set();
  std::unique_ptr<WaveEvolver> oracle;  // charge observable on the label grid
  double dt = 0;
  int nsteps = 0;
};

Engine make_engine(const RunConfig& cfg) {
  validate_config(cfg);
  set_num_threads(cfg.threads);

  Engine e;
  e.cfg = cfg;
  e.params = coupling_params(cfg);
  const double L = cfg.box_length;
  e.grid = Grid3::torus({cfg.n1, cfg.n2, cfg.n3}, {L, L, L});

  e.st.fluid = make_fluid_ic(cfg, e.grid);
  e.st.labels = initial_label(density_field(e.st.fluid));
  e.label_grid = lagrangian_grid(e.grid, e.st.labels.m);
  if (cfg.mode != RunMode::euler_only)
    e.st.spinor = make_spinor_ic(cfg, e.label_grid);
  e.st.evolve_fluid = cfg.mode != RunMode::dirac_only;
  e.st.time = 0.0;

  // One dt formula for every mode (the min over both fields' CFL bounds), so
  // decoupled runs land on identical step sequences.
  const double dtf = fluid_cfl_dt(e.st.fluid, cfg.cfl);
  const double dtd = dirac_cfl_dt(e.label_grid, cfg.cfl);
  double dt = std::min(dtf, dtd);
  if (cfg.t_final > 0) {
    e.nsteps = int(std::ceil(cfg.t_final / dt - 1e-12));
    e.dt = cfg.t_final / e.nsteps;
  }

  if (!e.st.spinor.empty()) {
    const ObservablePair w0 =
        initial_observable(e.st.spinor, Observable::charge, e.alpha);
    e.oracle = std::make_unique<WaveEvolver>(w0.w, w0.wt);
  }
  return e;
}

std::vector<double> diagnostics_row(const Engine& e, const CoupledState& st,
                                    double t, double picard_distance) {
  const Vec3 P = total_momentum(st.fluid);
  std::vector<double> row(diagnostics_columns.size(), nan_v);
  row[0] = t;
  row[1] = total_mass(st.fluid);
  row[2] = P.x;
  row[3] = P.y;
  row[4] = P.z;
  if (!st.spinor.empty()) {
    row[5] = total_charge(st.spinor);
    row[7] = rel_l2(observable_field(st.spinor, Observable::charge, e.alpha),
                    e.oracle->value(t));
  }
  row[6] = verify_density_identity(st.labels, density_field(st.fluid));
  row[8] = picard_distance;
  return row;
}

// Output hooks; the in-memory runner passes none.
struct Sink {
  virtual ~Sink() = default;
  virtual void row(const std::vector<double>& r) = 0;
  virtual void snapshot(int step, double t, const Engine& e, const CoupledState& st) = 0;
  virtual void iterates(const std::vector<double>& distances) = 0;
};

RunResult simulate(const RunConfig& cfg, Sink* sink) {
  Engine e = make_engine(cfg);
  RunResult res;

  const auto emit = [&](const CoupledState& st, double t, double pd) {
    const std::vector<double> r = diagnostics_row(e, st, t, pd);
    res.times.push_back(t);
    res.rows.push_back(r);
    if (sink) sink->row(r);
  };

  if (cfg.mode == RunMode::picard) {
    if (!(cfg.t_final > 0))
      throw config_error("picard mode needs t_final > 0");
    PicardResult pr = picard_solve(e.st, e.params, cfg.t_final, cfg.picard_tol,
                                   cfg.picard_max_iter);
    const double final_d = pr.distances.empty() ? nan_v : pr.distances.back();
    const int last = int(pr.times.size()) - 1;
    for (int k = 0; k <= last; ++k) {
      if (k % cfg.out_every != 0 && k != last) continue;
      CoupledState view;
      view.fluid = pr.fluid[size_t(k)];
      view.labels = pr.labels[size_t(k)];
      view.spinor = pr.spinor[size_t(k)];
      view.time = pr.times[size_t(k)];
      emit(view, view.time, final_d);
    }
    if (sink) {
      sink->iterates(pr.distances);
      CoupledState first{pr.fluid.front(), pr.labels.front(), pr.spinor.front(),
                         0.0, true};
      CoupledState fin{pr.fluid.back(), pr.labels.back(), pr.spinor.back(),
                       cfg.t_final, true};
      sink->snapshot(0, 0.0, e, first);
      sink->snapshot(int(pr.times.size()) - 1, cfg.t_final, e, fin);
    }
    res.final_state.fluid = pr.fluid.back();
    res.final_state.labels = pr.labels.back();
    res.final_state.spinor = pr.spinor.back();
    res.final_state.time = cfg.t_final;
    res.picard = std::move(pr);
    res.has_picard = true;
    return res;
  }

  CoevolveWorkspace ws;
  emit(e.st, 0.0, nan_v);
  if (sink) sink->snapshot(0, 0.0, e, e.st);

  for (int step = 1; step <= e.nsteps; ++step) {
    e.st = coevolve_step(e.st, e.params, e.dt, ws);
    const double t = step == e.nsteps ? cfg.t_final : step * e.dt;
    if (step % cfg.out_every == 0 || step == e.nsteps) emit(e.st, t, nan_v);
    const bool cadence = cfg.snap_every > 0 && step % cfg.snap_every == 0;
    if (sink && (cadence || step == e.nsteps)) sink->snapshot(step, t, e, e.st);
  }
  res.final_state = e.st;
  return res;
}

struct FileSink : Sink {
  std::string dir;
  CsvWriter csv;

  FileSink(const std::string& outdir)
      : dir(outdir), csv(outdir + "/diagnostics.csv", diagnostics_columns) {}

  void row(const std::vector<double>& r) override { csv.row(r); }

  void snapshot(int step, double t, const Engine& e, const CoupledState& st) override {
    char tag[16];
    std::snprintf(tag, sizeof tag, "%06d", step);

    write_snapshot(dir + "/fluid_" + tag + ".snap", e.grid, t,
                   {{"D", &st.fluid.D},
                    {"S1", &st.fluid.S1},
                    {"S2", &st.fluid.S2},
                    {"S3", &st.fluid.S3}});

    const size_t n = st.labels.yper[0].v.size();
    std::vector<double> slope(n, st.labels.m);
    write_snapshot(dir + "/labels_" + tag + ".snap", e.grid, t,
                   {{"y1per", &st.labels.yper[0].v},
                    {"y2per", &st.labels.yper[1].v},
                    {"y3per", &st.labels.yper[2].v},
                    {"label_slope", &slope}});

    if (!st.spinor.empty()) {
      const size_t nn = size_t(st.spinor.nodes());
      std::vector<std::vector<double>> comp(8, std::vector<double>(nn));
      for (size_t node = 0; node < nn; ++node)
        for (int c = 0; c < 4; ++c) {
          comp[size_t(2 * c)][node] = st.spinor.data[4 * node + size_t(c)].real();
          comp[size_t(2 * c + 1)][node] = st.spinor.data[4 * node + size_t(c)].imag();
        }
      write_snapshot(dir + "/spinor_" + tag + ".snap", e.label_grid, t,
                     {{"u1_re", &comp[0]},
                      {"u1_im", &comp[1]},
                      {"u2_re", &comp[2]},
                      {"u2_im", &comp[3]},
                      {"u3_re", &comp[4]},
                      {"u3_im", &comp[5]},
                      {"u4_re", &comp[6]},
                      {"u4_im", &comp[7]}});
    }
  }

  void iterates(const std::vector<double>& distances) override {
    CsvWriter w(dir + "/picard_iterates.csv", {"iterate", "distance"});
    for (size_t i = 0; i < distances.size(); ++i)
      w.row({double(i + 1), distances[i]});
  }
};

}  // namespace

RunResult run_in_memory(const RunConfig& cfg) { return simulate(cfg, nullptr); }

int run_simulation(const RunConfig& cfg, const std::string& outdir) {
  std::filesystem::create_directories(outdir);
  write_manifest(outdir + "/manifest.txt", cfg);
  FileSink sink(outdir);
  simulate(cfg, &sink);
  return 0;
}

// ---- scenario measurements ------------------------------------------------

std::pair<double, double> wave_observable_errors(const RunConfig& cfg) {
  validate_config(cfg);
  set_num_threads(cfg.threads);

  const double L = cfg.box_length;
  const Grid3 grid = Grid3::torus({cfg.n1, cfg.n2, cfg.n3}, {L, L, L});
  const FluidField fluid = make_fluid_ic(cfg, grid);
  const LabelField labels = initial_label(density_field(fluid));
  const Grid3 lg = lagrangian_grid(grid, labels.m);
  SpinorField u = make_spinor_ic(cfg, lg);
  const AlphaSet alpha = build_alpha_set();

  // Frozen background potential from the initial density.
  ScalarField V(lg);
  if (cfg.kappa != 0.0) {
    InverseMap inv(labels);
    V = potential_field(density_field(fluid), inv, cfg.kappa, lg, nullptr);
  }
  const PotentialProvider provider =
      frozen_potential_provider(V, cfg.lambda, alpha);

  const ObservablePair c0 = initial_observable(u, Observable::charge, alpha);
  const ObservablePair p0 = initial_observable(u, Observable::pseudo, alpha);
  const WaveEvolver charge_wave(c0.w, c0.wt);
  const WaveEvolver pseudo_wave(p0.w, p0.wt);

  const double T = cfg.t_final;
  double dt = dirac_cfl_dt(lg, cfg.cfl);
  const int nsteps = std::max(1, int(std::ceil(T / dt - 1e-12)));
  dt = T / nsteps;
  for (int s = 0; s < nsteps; ++s)
    u = step_dirac(u, provider, s * dt, dt, cfg.cfl);

  const double ec = rel_l2(observable_field(u, Observable::charge, alpha),
                           charge_wave.value(T));
  const double ep = rel_l2(observable_field(u, Observable::pseudo, alpha),
                           pseudo_wave.value(T));
  return {ec, ep};
}

double density_identity_error(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.mode = RunMode::euler_only;
  const RunResult r = run_in_memory(c);
  return r.rows.back()[6];
}

double flow_jacobian_error(const RunConfig& cfg, int nsteps) {
  if (nsteps < 1) throw config_error("flow consistency check needs nsteps >= 1");
  const double L = cfg.box_length;
  const double T = cfg.t_final;
  const double dt = T / nsteps;

  // Smooth analytic velocity with nonzero divergence; C-infinity sampling
  // keeps the RK4 order clean (interpolated fields are only C0 across faces).
  const auto vel = [&](const Vec3& x) -> Vec3 {
    const double s = std::sin(2 * M_PI * x.z / L);
    const double c = std::cos(2 * M_PI * x.z / L);
    return {0.2 * s + 0.1 * c, 0.15 * c, 0.25 + 0.2 * s};
  };
  const auto dvg = [&](const Vec3& x) -> double {
    return 0.2 * (2 * M_PI / L) * std::cos(2 * M_PI * x.z / L);
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, L);
  const int ntr = 512;
  double worst = 0;
  for (int tr = 0; tr < ntr; ++tr) {
    Vec3 p{uni(rng), uni(rng), uni(rng)};
    double j = 1.0;
    double jy = 1.0 + 0.3 * std::sin(2 * M_PI * p.z / L);
    const double p0 = j * jy;
    for (int s = 0; s < nsteps; ++s) {
      Vec3 kp[4];
      double kj[4], ky[4];
      const Vec3 base = p;
      const double jb = j, yb = jy;
      const auto stage = [&](int i, double frac, const Vec3& kpp, double kjp, double kyp) {
        const Vec3 q = base + (dt * frac) * kpp;
        const double dv = dvg(q);
        kp[i] = vel(q);
        kj[i] = dv * (jb + dt * frac * kjp);
        ky[i] = -dv * (yb + dt * frac * kyp);
      };
      stage(0, 0.0, Vec3{}, 0, 0);
      stage(1, 0.5, kp[0], kj[0], ky[0]);
      stage(2, 0.5, kp[1], kj[1], ky[1]);
      stage(3, 1.0, kp[2], kj[2], ky[2]);
      p = base + (dt / 6.0) * (kp[0] + 2.0 * kp[1] + 2.0 * kp[2] + kp[3]);
      j = jb + dt / 6.0 * (kj[0] + 2 * kj[1] + 2 * kj[2] + kj[3]);
      jy = yb + dt / 6.0 * (ky[0] + 2 * ky[1] + 2 * ky[2] + ky[3]);
    }
    worst = std::max(worst, std::abs(j * jy - p0) / std::abs(p0));
  }
  return worst;
}

// ---- audit ------------------------------------------------------------------

namespace {

struct RandomStates {
  std::vector<Prim> states;
};

RandomStates draw_states(int count, double max_speed, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rho_d(0.3, 3.0);
  std::uniform_real_distribution<double> mag_d(0.0, max_speed);
  std::normal_distribution<double> dir_d(0.0, 1.0);
  RandomStates rs;
  rs.states.reserve(size_t(count));
  for (int i = 0; i < count; ++i) {
    Vec3 dir{dir_d(rng), dir_d(rng), dir_d(rng)};
    const double n = dir.norm();
    if (n > 0) dir = dir * (1.0 / n);
    Prim w;
    w.rho = rho_d(rng);
    w.u = dir * mag_d(rng);
    rs.states.push_back(w);
  }
  return rs;
}

// Max normalized mismatch between the conservative flux and the effective-
// variable form  rho_re u_re (x) u_re + ptilde + p I  (mass row:
// rho_re u_re), over the given states.
double flux_identity_residual(const std::vector<Prim>& states, double eps,
                              const Eos& eos, PtildeForm form) {
  double worst = 0;
  for (const Prim& w : states) {
    const RelVars rv = rel_variables(w, eps, eos, form);
    const double p = eos.pressure(w.rho);
    for (int axis = 0; axis < 3; ++axis) {
      const Cons f = flux(w, eps, eos, axis);
      double scale = 1.0;
      scale = std::max(scale, std::abs(f.D));
      for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(f.S[j]));

      double r = std::abs(f.D - rv.rho_re * rv.u_re[axis]);
      for (int j = 0; j < 3; ++j) {
        double eff = rv.rho_re * rv.u_re[j] * rv.u_re[axis] + rv.ptilde.at(j, axis);
        if (j == axis) eff += p;
        r = std::max(r, std::abs(f.S[j] - eff));
      }
      worst = std::max(worst, r / scale);
    }
  }
  return worst;
}

double conserved_identity_residual(const std::vector<Prim>& states, double eps,
                                   const Eos& eos) {
  double worst = 0;
  for (const Prim& w : states) {
    const Cons c = prim_to_cons(w, eps, eos);
    const RelVars rv = rel_variables(w, eps, eos);
    worst = std::max(worst, std::abs(c.D - rv.rho_re) / std::max(1.0, std::abs(c.D)));
    for (int j = 0; j < 3; ++j)
      worst = std::max(worst, std::abs(c.S[j] - rv.rho_re * rv.u_re[j]) /
                                  std::max(1.0, std::abs(c.S[j])));
  }
  return worst;
}

double recovery_residual(const std::vector<Prim>& states, double eps, const Eos& eos) {
  double worst = 0;
  for (const Prim& w : states) {
    const Cons c = prim_to_cons(w, eps, eos);
    const Prim r = cons_to_prim(c, eps, eos);
    double err = std::abs(r.rho - w.rho) / w.rho;
    for (int j = 0; j < 3; ++j)
      err = std::max(err, std::abs(r.u[j] - w.u[j]) / std::max(1.0, std::abs(w.u[j])));
    worst = std::max(worst, err);
  }
  return worst;
}

double nonrel_deviation(const std::vector<Prim>& states, double eps, const Eos& eos) {
  double acc = 0;
  for (const Prim& w : states) {
    const RelVars rv = rel_variables(w, eps, eos);
    acc += std::abs(rv.rho_re - w.rho) + (rv.u_re - w.u).norm() + rv.ptilde.max_abs();
  }
  return acc / double(states.size());
}

RunConfig audit_slab_config(std::uint64_t seed, int threads) {
  RunConfig c;
  c.n1 = 1;
  c.n2 = 1;
  c.n3 = 64;
  c.mode = RunMode::coevolve;
  c.fluid_ic = FluidIc::density_sine;
  c.fluid_amp = 0.2;
  c.fluid_mode = 1;
  c.spinor_ic = SpinorIc::gaussian_packet;
  c.spinor_mode = 2;
  c.spinor_width = 0.15;
  c.t_final = 0.1;
  c.out_every = 1;
  c.seed = seed;
  c.threads = threads;
  return c;
}

}  // namespace

std::vector<AuditEntry> run_audit(const RunConfig& cfg) {
  set_num_threads(cfg.threads);
  std::vector<AuditEntry> out;
  const auto push = [&](const std::string& name, double value, double tol, bool pass) {
    out.push_back({name, pass, value, tol});
  };
  const auto push_le = [&](const std::string& name, double value, double tol) {
    push(name, value, tol, value <= tol);
  };

  const AlphaSet alpha = build_alpha_set();

  // Matrix algebra and the structural hypotheses of the observable identity.
  push_le("alpha_algebra", algebra_residual(alpha), 1e-14);
  {
    Spinor e1;
    e1.c[0] = 1.0;
    push_le("thirring_unit",
            (thirring_matrix(e1, alpha) - Mat4c::identity()).max_abs(), 1e-14);
  }
  {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> vd(-1.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      Spinor s;
      for (int c = 0; c < 4; ++c) s.c[size_t(c)] = cplx(nd(rng), nd(rng));
      const Mat4c B = interaction_matrix(s, vd(rng), vd(rng), alpha);
      worst = std::max(worst, B.hermiticity_residual());
      for (int a = 0; a < 3; ++a)
        worst = std::max(worst, commutator_max_abs(B, alpha.a[size_t(a)]));
    }
    push_le("interaction_hypotheses", worst, 1e-13);
  }

  // Algebraic identities of the effective variables.
  {
    Eos eos;
    eos.sigma2 = cfg.sigma2;
    double worst_cons = 0, worst_flux = 0, control = 1e300, worst_rec = 0;
    for (double eps : {1.0, 0.1}) {
      const auto rs = draw_states(1000, 0.95 / eps, cfg.seed + std::uint64_t(eps * 1000));
      worst_cons = std::max(worst_cons, conserved_identity_residual(rs.states, eps, eos));
      worst_flux = std::max(
          worst_flux, flux_identity_residual(rs.states, eps, eos, PtildeForm::corrected));
      control = std::min(control, flux_identity_residual(rs.states, eps, eos,
                                                         PtildeForm::transcribed));
      worst_rec = std::max(worst_rec, recovery_residual(rs.states, eps, eos));
    }
    push_le("conserved_identity", worst_cons, 1e-13);
    push_le("flux_identity", worst_flux, 1e-13);
    // Negative control: the tensor without its pressure factor must be
    // *detected* as inconsistent.
    push("flux_identity_control", control, 1e-6, control > 1e-6);
    push_le("recovery_roundtrip", worst_rec, 1e-10);

    const auto rs = draw_states(1000, 0.9, cfg.seed + 77);
    const double ratio = nonrel_deviation(rs.states, 0.1, eos) /
                         nonrel_deviation(rs.states, 0.05, eos);
    push("nonrel_scaling", std::abs(ratio - 4.0), 0.4, std::abs(ratio - 4.0) <= 0.4);
  }

  // Mollifier partition of unity.
  {
    const Grid3 g = Grid3::torus({1, 1, 64}, {1, 1, 1});
    const MollifierKernel k = build_mollifier(4.0 * g.max_active_h(), g);
    double s = 0;
    for (const auto& t : k.taps) s += t.w;
    push_le("mollifier_partition", std::abs(s - 1.0), 1e-15);
  }

  // Label determinant at t = 0 on a fine slab (pure spatial discretization).
  {
    RunConfig c = audit_slab_config(cfg.seed, cfg.threads);
    c.n3 = 256;
    c.fluid_amp = 0.3;
    const Grid3 g = Grid3::torus({c.n1, c.n2, c.n3}, {1, 1, 1});
    const FluidField f = make_fluid_ic(c, g);
    const LabelField lf = initial_label(density_field(f));
    push_le("label_determinant_t0",
            verify_density_identity(lf, density_field(f)), 1e-8);
  }

  // Short conservation runs.
  {
    RunConfig c = audit_slab_config(cfg.seed, cfg.threads);
    c.mode = RunMode::euler_only;
    const RunResult r = run_in_memory(c);
    const double drift =
        std::abs(r.rows.back()[1] - r.rows.front()[1]) / std::abs(r.rows.front()[1]);
    push_le("mass_conservation", drift, 1e-12);
  }
  {
    RunConfig c = audit_slab_config(cfg.seed, cfg.threads);
    c.mode = RunMode::dirac_only;
    c.fluid_ic = FluidIc::uniform;
    c.spinor_ic = SpinorIc::plane_wave;
    c.spinor_mode = 1;
    c.kappa = 0.5;
    const RunResult r = run_in_memory(c);
    const double drift =
        std::abs(r.rows.back()[5] - r.rows.front()[5]) / std::abs(r.rows.front()[5]);
    push_le("charge_conservation", drift, 1e-8);
  }

  // Bitwise decoupling: zero-coupling coevolve vs the single-field modes.
  {
    RunConfig c = audit_slab_config(cfg.seed, cfg.threads);
    c.n3 = 32;
    c.t_final = 0.05;
    c.lambda = 0;
    c.kappa = 0;
    c.alpha = 0;
    RunConfig ce = c;
    ce.mode = RunMode::euler_only;
    RunConfig cd = c;
    cd.mode = RunMode::dirac_only;
    const RunResult both = run_in_memory(c);
    const RunResult eul = run_in_memory(ce);
    const RunResult dir = run_in_memory(cd);

    double worst = 0;
    bool ok = both.rows.size() == eul.rows.size() && both.rows.size() == dir.rows.size();
    if (ok) {
      for (size_t r = 0; r < both.rows.size(); ++r) {
        // fluid-owned columns against euler-only, field-owned against
        // dirac-only; equality must be exact.
        for (int cidx : {0, 1, 2, 3, 4, 6})
          worst = std::max(worst,
                           std::abs(both.rows[r][size_t(cidx)] - eul.rows[r][size_t(cidx)]));
        for (int cidx : {5, 7})
          worst = std::max(worst,
                           std::abs(both.rows[r][size_t(cidx)] - dir.rows[r][size_t(cidx)]));
      }
    }
    push("decoupling", worst, 0.0, ok && worst == 0.0);
  }

  // Quick two-level order estimate for the wave-oracle comparison.
  {
    RunConfig c = audit_slab_config(cfg.seed, cfg.threads);
    c.mode = RunMode::dirac_only;
    c.t_final = 0.25;
    c.n3 = 32;
    const auto [e1c, e1p] = wave_observable_errors(c);
    c.n3 = 64;
    const auto [e2c, e2p] = wave_observable_errors(c);
    const double order = std::log2(std::max(e1c, e1p) / std::max(e2c, e2p));
    push("wave_order", order, 2.0, order >= 2.0);
  }

  return out;
}

std::string format_audit(const std::vector<AuditEntry>& entries) {
  std::ostringstream o;
  for (const auto& e : entries)
    o << "check=" << e.name << " status=" << (e.pass ? "pass" : "fail")
      << " value=" << format_double(e.value) << " tol=" << format_double(e.tol)
      << "\n";
  return o.str();
}

// ---- convergence ------------------------------------------------------------

const char* to_string(ConvergenceScenario s) {
  switch (s) {
    case ConvergenceScenario::automatic: return "auto";
    case ConvergenceScenario::wave_oracle: return "wave-oracle";
    case ConvergenceScenario::density_identity: return "density-identity";
    case ConvergenceScenario::flow_jacobian: return "flow-jacobian";
  }
  return "?";
}

ConvergenceScenario parse_scenario(const std::string& name) {
  if (name == "auto") return ConvergenceScenario::automatic;
  if (name == "wave-oracle") return ConvergenceScenario::wave_oracle;
  if (name == "density-identity") return ConvergenceScenario::density_identity;
  if (name == "flow-jacobian") return ConvergenceScenario::flow_jacobian;
  throw config_error("unknown convergence scenario: " + name);
}

namespace {

RunConfig scale_grid(const RunConfig& cfg, int factor) {
  RunConfig c = cfg;
  if (c.n1 > 1) c.n1 *= factor;
  if (c.n2 > 1) c.n2 *= factor;
  if (c.n3 > 1) c.n3 *= factor;
  return c;
}

}  // namespace

std::vector<ConvergenceRow> run_convergence(const RunConfig& cfg, int levels,
                                            ConvergenceScenario scenario) {
  if (levels < 2) throw config_error("convergence needs levels >= 2");
  if (scenario == ConvergenceScenario::automatic) {
    scenario = cfg.mode == RunMode::euler_only ? ConvergenceScenario::density_identity
                                               : ConvergenceScenario::wave_oracle;
  }

  // Resource guard: refuse refinements whose finest level leaves desk scale.
  if (scenario != ConvergenceScenario::flow_jacobian) {
    int active = 0;
    for (int n : {cfg.n1, cfg.n2, cfg.n3})
      if (n > 1) ++active;
    const double finest = double(i64(cfg.n1) * cfg.n2 * cfg.n3) *
                          std::pow(2.0, double(active * (levels - 1)));
    if (finest > 4e6)
      throw config_error("convergence: finest level exceeds the resource guard; "
                         "use a coarser base grid or fewer levels");
  }

  std::vector<ConvergenceRow> rows;
  double prev = 0;
  for (int lev = 0; lev < levels; ++lev) {
    ConvergenceRow r;
    r.level = lev;
    switch (scenario) {
      case ConvergenceScenario::wave_oracle: {
        const RunConfig c = scale_grid(cfg, 1 << lev);
        const auto [ec, ep] = wave_observable_errors(c);
        r.error = std::max(ec, ep);
        r.resolution = std::max({c.n1, c.n2, c.n3});
        break;
      }
      case ConvergenceScenario::density_identity: {
        const RunConfig c = scale_grid(cfg, 1 << lev);
        r.error = density_identity_error(c);
        r.resolution = std::max({c.n1, c.n2, c.n3});
        break;
      }
      case ConvergenceScenario::flow_jacobian: {
        const int nsteps = 8 << lev;
        r.error = flow_jacobian_error(cfg, nsteps);
        r.resolution = nsteps;
        break;
      }
      case ConvergenceScenario::automatic:
        break;
    }
    r.order = lev == 0 ? std::numeric_limits<double>::quiet_NaN()
                       : std::log2(prev / r.error);
    prev = r.error;
    rows.push_back(r);
  }
  return rows;
}

std::string format_convergence(const std::vector<ConvergenceRow>& rows,
                               ConvergenceScenario scenario) {
  std::ostringstream o;
  o << "scenario=" << to_string(scenario) << "\n";
  for (const auto& r : rows)
    o << "level=" << r.level << " resolution=" << r.resolution
      << " error=" << format_double(r.error) << " order=" << format_double(r.order)
      << "\n";
  return o.str();
}

}  // namespace swlw
