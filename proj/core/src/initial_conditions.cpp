#include "swlw/initial_conditions.hpp"

#include <cmath>

#include "swlw/errors.hpp"

namespace swlw {

double periodic_gaussian(double x, double center, double s, double L) {
  double g = 0;
  for (int m = -6; m <= 6; ++m) {
    const double d = x - center + m * L;
    g += std::exp(-d * d / (2.0 * s * s));
  }
  return g;
}

FluidField make_fluid_ic(const RunConfig& cfg, const Grid3& g) {
  Eos eos;
  eos.sigma2 = cfg.sigma2;
  eos.rho_min = cfg.rho_min;
  eos.rho_max = cfg.rho_max;
  eos.validate(cfg.epsilon);

  FluidField f(g, cfg.epsilon, eos);
  const int ax = resolve_axis(cfg.fluid_axis, g.n[0], g.n[1], g.n[2]) - 1;
  const double L = g.length(ax);
  const double sigma = std::sqrt(cfg.sigma2);

  int i, j, k;
  for (i64 idx = 0; idx < g.ncells(); ++idx) {
    g.coords(idx, i, j, k);
    const double x = g.node(i, j, k)[ax];

    Prim w;
    w.u = cfg.u0;
    switch (cfg.fluid_ic) {
      case FluidIc::uniform:
        w.rho = cfg.rho0;
        break;
      case FluidIc::density_sine:
        w.rho = cfg.rho0 *
                (1.0 + cfg.fluid_amp * std::sin(2.0 * M_PI * cfg.fluid_mode * x / L));
        break;
      case FluidIc::acoustic_pulse: {
        // Right-moving simple-wave profile: the velocity perturbation rides
        // the density bump at the sound speed.
        const double bump =
            periodic_gaussian(x, L / 2, cfg.fluid_width * L, L);
        w.rho = cfg.rho0 * (1.0 + cfg.fluid_amp * bump);
        w.u[ax] += sigma * cfg.fluid_amp * bump;
        break;
      }
    }
    if (!eos.in_domain(w.rho))
      throw config_error("fluid initial data leaves the density window");
    if (!(cfg.epsilon * w.u.norm() < 1.0))
      throw config_error("fluid initial data is superluminal");

    const Cons c = prim_to_cons(w, cfg.epsilon, eos);
    f.D[size_t(idx)] = c.D;
    f.S1[size_t(idx)] = c.S.x;
    f.S2[size_t(idx)] = c.S.y;
    f.S3[size_t(idx)] = c.S.z;
  }
  return f;
}

SpinorField make_spinor_ic(const RunConfig& cfg, const Grid3& label_grid) {
  SpinorField u(label_grid);
  const Grid3& g = label_grid;
  const int ax = resolve_axis(cfg.spinor_axis, g.n[0], g.n[1], g.n[2]) - 1;
  const double L = g.length(ax);

  int i, j, k;
  for (i64 idx = 0; idx < g.ncells(); ++idx) {
    g.coords(idx, i, j, k);
    const double y = g.node(i, j, k)[ax];

    double env = 1.0, phase = 0.0, mix = 0.0;
    switch (cfg.spinor_ic) {
      case SpinorIc::plane_wave:
        phase = 2.0 * M_PI * cfg.spinor_mode * y / L;
        break;
      case SpinorIc::constant:
        break;
      case SpinorIc::gaussian_packet:
        env = periodic_gaussian(y, L / 2, cfg.spinor_width * L, L);
        phase = 2.0 * M_PI * cfg.spinor_mode * y / L;
        mix = cfg.spinor_mix;
        break;
    }
    const cplx ph = std::polar(cfg.spinor_amp * env, phase);
    Spinor s;
    s.c[0] = ph * std::cos(mix);
    s.c[2] = ph * std::sin(mix);
    u.set(idx, s);
  }
  return u;
}

}  // namespace swlw
