#pragma once
#include <cstdint>
#include <string>

#include "swlw/grid.hpp"
#include "swlw/rel_euler.hpp"

namespace swlw {

enum class RunMode { coevolve, euler_only, dirac_only, picard };
enum class FluidIc { uniform, density_sine, acoustic_pulse };
enum class SpinorIc { plane_wave, gaussian_packet, constant };

// Flat key=value run configuration.  Every key has a default, so an empty
// file is a valid config; unknown or duplicate keys are rejected.  `N=32` is
// parse-time shorthand for n1=n2=n3=32 and never appears in the canonical
// serialization.
struct RunConfig {
  // grid
  int n1 = 1, n2 = 1, n3 = 64;
  double box_length = 1.0;

  // physics
  double epsilon = 1.0;
  double sigma2 = 0.25;
  double rho_min = 0.0;
  double rho_max = std::numeric_limits<double>::infinity();
  PtildeForm ptilde_form = PtildeForm::corrected;
  double lambda = 1.0;
  double kappa = 1.0;
  double alpha = 0.1;
  double delta = 0.0;  // 0 = auto (4 * max active spacing)

  // numerics
  double cfl = 0.4;
  double t_final = 0.25;
  double recovery_tol = 1e-12;
  int recovery_max_iter = 50;
  double picard_tol = 1e-8;
  int picard_max_iter = 30;

  // mode and initial data
  RunMode mode = RunMode::coevolve;
  FluidIc fluid_ic = FluidIc::density_sine;
  double rho0 = 1.0;
  Vec3 u0;
  double fluid_amp = 0.2;
  int fluid_mode = 1;
  double fluid_width = 0.2;   // fraction of the box length
  int fluid_axis = 0;         // 0 = auto
  SpinorIc spinor_ic = SpinorIc::gaussian_packet;
  double spinor_amp = 1.0;
  int spinor_mode = 2;
  double spinor_width = 0.15;
  double spinor_mix = 0.3;    // component mixing angle of the packet
  int spinor_axis = 0;        // 0 = auto

  // output
  int out_every = 10;
  int snap_every = 0;  // 0 = initial and final snapshots only
  std::uint64_t seed = 12345;
  int threads = 1;
};

// Parse from text / file.  Throws config_error on syntax errors, unknown or
// duplicate keys, or failed validation.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical serialization: fixed key order, %.17g doubles.  A fixed point of
// parse-then-serialize.
std::string serialize_config(const RunConfig& cfg);

// Range and consistency checks; throws config_error with the offending key.
void validate_config(const RunConfig& cfg);

// FNV-1a hash of the canonical serialization, for run manifests.
std::uint64_t config_hash(const RunConfig& cfg);

// Resolve an axis request (0 = auto) against grid extents: auto picks the
// axis with the most cells, later axes winning ties (so cubes resolve to x3,
// which is the label-compatible direction).  Returns 1, 2, or 3.
int resolve_axis(int requested, int n1, int n2, int n3);

const char* to_string(RunMode m);
const char* to_string(FluidIc ic);
const char* to_string(SpinorIc ic);
const char* to_string(PtildeForm f);

}  // namespace swlw
