#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "swlw/config.hpp"
#include "swlw/errors.hpp"
#include "swlw/io.hpp"

using namespace swlw;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir() {
  const auto d = std::filesystem::temp_directory_path() / "swlw_test_io";
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("serialization is a fixed point of parsing") {
  RunConfig cfg;
  cfg.n3 = 48;
  cfg.epsilon = 0.25;
  cfg.lambda = 0.75;
  cfg.mode = RunMode::picard;
  cfg.fluid_ic = FluidIc::acoustic_pulse;
  const std::string s1 = serialize_config(cfg);
  const RunConfig back = parse_config(s1);
  const std::string s2 = serialize_config(back);
  CHECK(s1 == s2);
  CHECK(config_hash(cfg) == config_hash(back));
}

TEST_CASE("parser handles comments, blanks, and whitespace") {
  const RunConfig cfg = parse_config(
      "# leading comment\n"
      "\n"
      "  n3 = 24   # trailing comment\n"
      "epsilon=0.5\n"
      "mode = dirac-only\n");
  CHECK(cfg.n3 == 24);
  CHECK(cfg.epsilon == 0.5);
  CHECK(cfg.mode == RunMode::dirac_only);
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_config("unknown_key=1\n"), config_error);
  CHECK_THROWS_AS(parse_config("n3=16\nn3=32\n"), config_error);
  CHECK_THROWS_AS(parse_config("n3\n"), config_error);
  CHECK_THROWS_AS(parse_config("n3=abc\n"), config_error);
  CHECK_THROWS_AS(parse_config("mode=warp\n"), config_error);
  CHECK_THROWS_WITH_AS(parse_config("alpha=-1\n"),
                       doctest::Contains("alpha"), config_error);
}

TEST_CASE("cube shorthand expands and conflicts are rejected") {
  const RunConfig cfg = parse_config("N=16\n");
  CHECK(cfg.n1 == 16);
  CHECK(cfg.n2 == 16);
  CHECK(cfg.n3 == 16);
  CHECK_THROWS_AS(parse_config("N=16\nn1=8\n"), config_error);
}

TEST_CASE("validation enforces the documented ranges") {
  const auto expect_reject = [](const std::string& text) {
    CHECK_THROWS_AS(parse_config(text), config_error);
  };
  expect_reject("cfl=0.6\n");
  expect_reject("cfl=0\n");
  expect_reject("sigma2=1.2\n");            // sound above light at eps = 1
  expect_reject("epsilon=0.5\nsigma2=4.5\n");
  expect_reject("fluid_amp=1.0\n");
  expect_reject("u0_1=1.5\n");              // superluminal at eps = 1
  expect_reject("threads=0\n");
  expect_reject("out_every=0\n");
  expect_reject("n1=1\nn2=1\nn3=1\n");      // fewer than 2 cells
  expect_reject("n3=1\nn1=4\n");            // sine IC cannot vary along x3
}

TEST_CASE("axis resolution prefers the most resolved axis, later ties win") {
  CHECK(resolve_axis(0, 1, 1, 64) == 3);
  CHECK(resolve_axis(0, 64, 1, 1) == 1);
  CHECK(resolve_axis(0, 16, 16, 16) == 3);
  CHECK(resolve_axis(0, 32, 32, 16) == 2);
  CHECK(resolve_axis(2, 8, 8, 8) == 2);
}

TEST_CASE("enum names round-trip through the parser") {
  for (const char* m : {"coevolve", "euler-only", "dirac-only", "picard"}) {
    const RunConfig cfg = parse_config(std::string("mode=") + m + "\n");
    CHECK(std::string(to_string(cfg.mode)) == m);
  }
  for (const char* ic : {"uniform", "density-sine", "acoustic-pulse"}) {
    const RunConfig cfg = parse_config(std::string("fluid_ic=") + ic + "\n");
    CHECK(std::string(to_string(cfg.fluid_ic)) == ic);
  }
  for (const char* ic : {"plane-wave", "gaussian-packet", "constant"}) {
    const RunConfig cfg = parse_config(std::string("spinor_ic=") + ic + "\n");
    CHECK(std::string(to_string(cfg.spinor_ic)) == ic);
  }
  for (const char* f : {"corrected", "transcribed"}) {
    const RunConfig cfg = parse_config(std::string("ptilde_form=") + f + "\n");
    CHECK(std::string(to_string(cfg.ptilde_form)) == f);
  }
}

TEST_CASE("hash distinguishes configs that differ in one key") {
  RunConfig a, b;
  b.kappa = 0.9999;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a) == config_hash(a));
}

TEST_CASE("doubles survive the canonical formatting") {
  for (double x : {1.0 / 3.0, 0.1, 1e-300, 6.02214076e23, -0.0})
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("snapshots round-trip bit for bit") {
  const Grid3 g = Grid3::torus({4, 3, 5}, {1.0, 2.0, 0.5});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  std::vector<double> a(size_t(g.ncells())), b(size_t(g.ncells()));
  for (auto& v : a) v = d(rng);
  for (auto& v : b) v = d(rng);

  const auto path = (temp_dir() / "roundtrip.snap").string();
  write_snapshot(path, g, 0.625, {{"alpha_f", &a}, {"beta_f", &b}});

  const Snapshot s = read_snapshot(path);
  CHECK(s.grid == g);
  CHECK(s.time == 0.625);
  REQUIRE(s.names.size() == 2);
  CHECK(s.names[0] == "alpha_f");
  CHECK(s.names[1] == "beta_f");
  CHECK(s.fields[0] == a);
  CHECK(s.fields[1] == b);

  // Header is the documented single ASCII line.
  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "dims=4,3,5 spacing=0.25,0.66666666666666663,0.10000000000000001 "
        "time=0.625 fields=alpha_f,beta_f");
}

TEST_CASE("csv writer emits the header and one row per call") {
  const auto path = (temp_dir() / "diag.csv").string();
  {
    CsvWriter w(path, {"a", "b"});
    w.row({1.0, 0.5});
    w.row({2.0, 1.0 / 3.0});
  }
  const std::string text = slurp(path);
  CHECK(text == "a,b\n1,0.5\n2,0.33333333333333331\n");
}

TEST_CASE("manifest is reproducible and carries the config hash") {
  RunConfig cfg;
  cfg.n3 = 32;
  const auto p1 = (temp_dir() / "m1.txt").string();
  const auto p2 = (temp_dir() / "m2.txt").string();
  write_manifest(p1, cfg);
  write_manifest(p2, cfg);
  const std::string t1 = slurp(p1);
  CHECK(t1 == slurp(p2));
  CHECK(t1.find("version=") != std::string::npos);
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  CHECK(t1.find(std::string("config_hash=") + hex) != std::string::npos);
  CHECK(t1.find("n3=32") != std::string::npos);
}

}  // TEST_SUITE
