#pragma once
#include <string>
#include <utility>
#include <vector>

#include "swlw/config.hpp"
#include "swlw/coupling.hpp"

namespace swlw {

// Column order of every diagnostics row (CSV and in-memory).  Columns that
// do not apply to a mode hold NaN.
extern const std::vector<std::string> diagnostics_columns;

struct RunResult {
  std::vector<double> times;
  std::vector<std::vector<double>> rows;  // diagnostics, one per output time
  CoupledState final_state;
  PicardResult picard;  // populated in picard mode only
  bool has_picard = false;
};

// Run the configured scenario, returning diagnostics in memory (no files).
RunResult run_in_memory(const RunConfig& cfg);

// Run and write artifacts into outdir: manifest.txt, diagnostics.csv,
// snapshots (initial, final, and every snap_every-th step), and
// picard_iterates.csv in picard mode.  Returns the process exit status.
int run_simulation(const RunConfig& cfg, const std::string& outdir);

// ---- scenario measurements shared by audit, convergence, and acceptance ----

// Short-wave observables against their wave-equation oracles: relative L2
// errors of the charge and pseudoscalar fields at cfg.t_final, for a run in
// a frozen background potential (dirac-only semantics).
std::pair<double, double> wave_observable_errors(const RunConfig& cfg);

// Final-time label determinant residual of a fluid-only run with co-evolved
// labels (euler-only semantics).
double density_identity_error(const RunConfig& cfg);

// Volume-distortion consistency of the tracer bundle: along any trajectory
// the product jphi * jy is exactly conserved, so its drift isolates the time
// integrator's error.  Integrates seeded tracers through a smooth analytic
// velocity for cfg.t_final in nsteps RK4 steps and returns the max relative
// drift of the product.  Converges at the integrator's order (4).
double flow_jacobian_error(const RunConfig& cfg, int nsteps);

// ---- audit ----

struct AuditEntry {
  std::string name;
  bool pass = false;
  double value = 0;  // measured residual / ratio / order
  double tol = 0;    // threshold it was compared against
};

std::vector<AuditEntry> run_audit(const RunConfig& cfg);
std::string format_audit(const std::vector<AuditEntry>& entries);

// ---- convergence ----

enum class ConvergenceScenario { automatic, wave_oracle, density_identity, flow_jacobian };

struct ConvergenceRow {
  int level = 0;
  int resolution = 0;  // cells along the refined axis, or step count
  double error = 0;
  double order = 0;    // NaN on the coarsest level
};

std::vector<ConvergenceRow> run_convergence(const RunConfig& cfg, int levels,
                                            ConvergenceScenario scenario);
std::string format_convergence(const std::vector<ConvergenceRow>& rows,
                               ConvergenceScenario scenario);
const char* to_string(ConvergenceScenario s);
ConvergenceScenario parse_scenario(const std::string& name);

}  // namespace swlw
