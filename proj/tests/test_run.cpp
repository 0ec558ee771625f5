#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swlw/config.hpp"
#include "swlw/errors.hpp"
#include "swlw/io.hpp"
#include "swlw/run.hpp"

using namespace swlw;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / "swlw_test_run" / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

RunConfig slab_config() {
  RunConfig cfg;
  cfg.n1 = 1;
  cfg.n2 = 1;
  cfg.n3 = 32;
  cfg.t_final = 0.05;
  cfg.out_every = 2;
  return cfg;
}

int column(const std::string& name) {
  for (size_t i = 0; i < diagnostics_columns.size(); ++i)
    if (diagnostics_columns[i] == name) return int(i);
  REQUIRE(false);
  return -1;
}

}  // namespace

TEST_SUITE("run") {

TEST_CASE("uniform fluid-only run keeps mass and momentum bitwise constant") {
  RunConfig cfg = slab_config();
  cfg.mode = RunMode::euler_only;
  cfg.fluid_ic = FluidIc::uniform;
  cfg.u0 = {0.0, 0.0, 0.25};
  const RunResult r = run_in_memory(cfg);
  REQUIRE(r.rows.size() >= 2);
  const int cm = column("total_mass");
  const int cp = column("momentum_z");
  for (const auto& row : r.rows) {
    CHECK(row[size_t(cm)] == r.rows.front()[size_t(cm)]);
    CHECK(row[size_t(cp)] == r.rows.front()[size_t(cp)]);
  }
}

TEST_CASE("free plane-wave run keeps the charge column constant to 1e-10") {
  RunConfig cfg;
  cfg.n3 = 64;
  cfg.mode = RunMode::dirac_only;
  cfg.fluid_ic = FluidIc::uniform;
  cfg.spinor_ic = SpinorIc::plane_wave;
  cfg.spinor_mode = 1;
  cfg.cfl = 0.1;
  cfg.t_final = 0.1;
  cfg.out_every = 1;
  const RunResult r = run_in_memory(cfg);
  const int cq = column("total_charge");
  const double q0 = r.rows.front()[size_t(cq)];
  for (const auto& row : r.rows)
    CHECK(std::abs(row[size_t(cq)] - q0) / q0 <= 1e-10);
}

TEST_CASE("zero-coupling coevolve matches the single-field runs bitwise") {
  RunConfig cfg = slab_config();
  cfg.lambda = 0.0;
  cfg.kappa = 0.0;
  cfg.alpha = 0.0;
  cfg.out_every = 1;

  RunConfig ce = cfg;
  ce.mode = RunMode::euler_only;
  RunConfig cd = cfg;
  cd.mode = RunMode::dirac_only;

  const RunResult both = run_in_memory(cfg);
  const RunResult eul = run_in_memory(ce);
  const RunResult dir = run_in_memory(cd);
  REQUIRE(both.rows.size() == eul.rows.size());
  REQUIRE(both.rows.size() == dir.rows.size());

  const int fluid_cols[] = {column("time"), column("total_mass"),
                            column("momentum_x"), column("momentum_y"),
                            column("momentum_z"),
                            column("density_identity_residual")};
  const int wave_cols[] = {column("total_charge"), column("wave_oracle_residual")};
  for (size_t r = 0; r < both.rows.size(); ++r) {
    for (int c : fluid_cols) CHECK(both.rows[r][size_t(c)] == eul.rows[r][size_t(c)]);
    for (int c : wave_cols) CHECK(both.rows[r][size_t(c)] == dir.rows[r][size_t(c)]);
  }
}

TEST_CASE("repeated in-memory runs are bitwise identical") {
  const RunConfig cfg = slab_config();
  const RunResult a = run_in_memory(cfg);
  const RunResult b = run_in_memory(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t r = 0; r < a.rows.size(); ++r)
    for (size_t c = 0; c < a.rows[r].size(); ++c) {
      const double x = a.rows[r][c], y = b.rows[r][c];
      CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
    }
}

TEST_CASE("file runs write byte-identical artifacts on reruns") {
  RunConfig cfg = slab_config();
  cfg.snap_every = 4;
  const auto d1 = fresh_dir("a");
  const auto d2 = fresh_dir("b");
  CHECK(run_simulation(cfg, d1.string()) == 0);
  CHECK(run_simulation(cfg, d2.string()) == 0);

  for (const char* f : {"manifest.txt", "diagnostics.csv", "fluid_000000.snap",
                        "labels_000000.snap", "spinor_000000.snap"}) {
    const std::string ta = slurp((d1 / f).string());
    REQUIRE(!ta.empty());
    CHECK(ta == slurp((d2 / f).string()));
  }

  // Snapshot cadence: initial, every 4th step, final.
  const Snapshot s0 = read_snapshot((d1 / "fluid_000000.snap").string());
  CHECK(s0.time == 0.0);
  CHECK(s0.names == std::vector<std::string>{"D", "S1", "S2", "S3"});
  CHECK(std::filesystem::exists(d1 / "fluid_000004.snap"));

  const Snapshot lab = read_snapshot((d1 / "labels_000000.snap").string());
  CHECK(lab.names == std::vector<std::string>{"y1per", "y2per", "y3per",
                                              "label_slope"});

  // Diagnostics header matches the documented column order.
  std::istringstream csv(slurp((d1 / "diagnostics.csv").string()));
  std::string header;
  std::getline(csv, header);
  std::string want;
  for (size_t i = 0; i < diagnostics_columns.size(); ++i)
    want += (i ? "," : "") + diagnostics_columns[i];
  CHECK(header == want);
}

TEST_CASE("picard mode populates iterate artifacts and the distance column") {
  RunConfig cfg = slab_config();
  cfg.mode = RunMode::picard;
  cfg.t_final = 0.04;
  cfg.picard_tol = 1e-8;
  const auto dir = fresh_dir("picard");
  CHECK(run_simulation(cfg, dir.string()) == 0);
  CHECK(std::filesystem::exists(dir / "picard_iterates.csv"));

  const RunResult r = run_in_memory(cfg);
  CHECK(r.has_picard);
  CHECK(r.picard.converged);
  const int cd = column("picard_distance");
  for (const auto& row : r.rows) CHECK(!std::isnan(row[size_t(cd)]));
}

TEST_CASE("flow consistency error shrinks at fourth order") {
  RunConfig cfg;
  cfg.t_final = 1.0;
  const double e1 = flow_jacobian_error(cfg, 8);
  const double e2 = flow_jacobian_error(cfg, 16);
  const double e3 = flow_jacobian_error(cfg, 32);
  CHECK(std::log2(e1 / e2) > 3.5);
  CHECK(std::log2(e2 / e3) > 3.5);
}

TEST_CASE("convergence driver reports orders and guards resources") {
  RunConfig cfg;
  cfg.n3 = 16;
  cfg.mode = RunMode::dirac_only;
  cfg.fluid_ic = FluidIc::uniform;
  cfg.t_final = 0.25;
  const auto rows =
      run_convergence(cfg, 2, ConvergenceScenario::wave_oracle);
  REQUIRE(rows.size() == 2);
  CHECK(std::isnan(rows[0].order));
  CHECK(rows[1].order >= 2.0);
  CHECK(rows[1].resolution == 32);

  CHECK_THROWS_AS(run_convergence(cfg, 1, ConvergenceScenario::wave_oracle),
                  config_error);
  RunConfig big;
  big.n1 = big.n2 = big.n3 = 64;
  CHECK_THROWS_AS(run_convergence(big, 5, ConvergenceScenario::wave_oracle),
                  config_error);

  const std::string text = format_convergence(rows, ConvergenceScenario::wave_oracle);
  CHECK(text.find("scenario=wave-oracle") != std::string::npos);
  CHECK(text.find("level=1") != std::string::npos);
}

TEST_CASE("scenario names round-trip") {
  for (const char* name :
       {"auto", "wave-oracle", "density-identity", "flow-jacobian"})
    CHECK(std::string(to_string(parse_scenario(name))) == name);
  CHECK_THROWS_AS(parse_scenario("bogus"), config_error);
}

TEST_CASE("audit battery passes on the default configuration") {
  RunConfig cfg;  // default config: the documented expectation is all-pass
  const auto entries = run_audit(cfg);
  CHECK(entries.size() >= 14);
  for (const auto& e : entries) {
    INFO(e.name, " value=", e.value, " tol=", e.tol);
    CHECK(e.pass);
  }
  const std::string text = format_audit(entries);
  CHECK(text.find("check=alpha_algebra status=pass") != std::string::npos);
  CHECK(text.find("check=flux_identity_control status=pass") != std::string::npos);
}

}  // TEST_SUITE
