#include "swlw/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "swlw/errors.hpp"

namespace swlw {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw config_error("key '" + key + "': expected a real number, got '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw config_error("key '" + key + "': expected an integer, got '" + v + "'");
  return int(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw config_error("key '" + key + "': expected an unsigned integer, got '" + v + "'");
  return x;
}

int parse_axis(const std::string& key, const std::string& v) {
  if (v == "auto") return 0;
  const int a = parse_int(key, v);
  if (a < 1 || a > 3)
    throw config_error("key '" + key + "': axis must be auto, 1, 2, or 3");
  return a;
}

std::string axis_string(int a) { return a == 0 ? "auto" : std::to_string(a); }

}  // namespace

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::coevolve: return "coevolve";
    case RunMode::euler_only: return "euler-only";
    case RunMode::dirac_only: return "dirac-only";
    case RunMode::picard: return "picard";
  }
  return "?";
}

const char* to_string(FluidIc ic) {
  switch (ic) {
    case FluidIc::uniform: return "uniform";
    case FluidIc::density_sine: return "density-sine";
    case FluidIc::acoustic_pulse: return "acoustic-pulse";
  }
  return "?";
}

const char* to_string(SpinorIc ic) {
  switch (ic) {
    case SpinorIc::plane_wave: return "plane-wave";
    case SpinorIc::gaussian_packet: return "gaussian-packet";
    case SpinorIc::constant: return "constant";
  }
  return "?";
}

const char* to_string(PtildeForm f) {
  return f == PtildeForm::corrected ? "corrected" : "transcribed";
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, bool> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key=value, got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    if (val.empty())
      throw config_error("key '" + key + "': empty value");
    if (seen.count(key))
      throw config_error("duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "N") {
      const int n = parse_int(key, val);
      cfg.n1 = cfg.n2 = cfg.n3 = n;
    } else if (key == "n1") {
      cfg.n1 = parse_int(key, val);
    } else if (key == "n2") {
      cfg.n2 = parse_int(key, val);
    } else if (key == "n3") {
      cfg.n3 = parse_int(key, val);
    } else if (key == "box_length") {
      cfg.box_length = parse_double(key, val);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(key, val);
    } else if (key == "sigma2") {
      cfg.sigma2 = parse_double(key, val);
    } else if (key == "rho_min") {
      cfg.rho_min = parse_double(key, val);
    } else if (key == "rho_max") {
      cfg.rho_max = parse_double(key, val);
    } else if (key == "ptilde_form") {
      if (val == "corrected") cfg.ptilde_form = PtildeForm::corrected;
      else if (val == "transcribed") cfg.ptilde_form = PtildeForm::transcribed;
      else throw config_error("key 'ptilde_form': expected corrected|transcribed");
    } else if (key == "lambda") {
      cfg.lambda = parse_double(key, val);
    } else if (key == "kappa") {
      cfg.kappa = parse_double(key, val);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(key, val);
    } else if (key == "delta") {
      cfg.delta = parse_double(key, val);
    } else if (key == "cfl") {
      cfg.cfl = parse_double(key, val);
    } else if (key == "t_final") {
      cfg.t_final = parse_double(key, val);
    } else if (key == "recovery_tol") {
      cfg.recovery_tol = parse_double(key, val);
    } else if (key == "recovery_max_iter") {
      cfg.recovery_max_iter = parse_int(key, val);
    } else if (key == "picard_tol") {
      cfg.picard_tol = parse_double(key, val);
    } else if (key == "picard_max_iter") {
      cfg.picard_max_iter = parse_int(key, val);
    } else if (key == "mode") {
      if (val == "coevolve") cfg.mode = RunMode::coevolve;
      else if (val == "euler-only") cfg.mode = RunMode::euler_only;
      else if (val == "dirac-only") cfg.mode = RunMode::dirac_only;
      else if (val == "picard") cfg.mode = RunMode::picard;
      else throw config_error("key 'mode': expected coevolve|euler-only|dirac-only|picard");
    } else if (key == "fluid_ic") {
      if (val == "uniform") cfg.fluid_ic = FluidIc::uniform;
      else if (val == "density-sine") cfg.fluid_ic = FluidIc::density_sine;
      else if (val == "acoustic-pulse") cfg.fluid_ic = FluidIc::acoustic_pulse;
      else throw config_error("key 'fluid_ic': expected uniform|density-sine|acoustic-pulse");
    } else if (key == "rho0") {
      cfg.rho0 = parse_double(key, val);
    } else if (key == "u0_1") {
      cfg.u0.x = parse_double(key, val);
    } else if (key == "u0_2") {
      cfg.u0.y = parse_double(key, val);
    } else if (key == "u0_3") {
      cfg.u0.z = parse_double(key, val);
    } else if (key == "fluid_amp") {
      cfg.fluid_amp = parse_double(key, val);
    } else if (key == "fluid_mode") {
      cfg.fluid_mode = parse_int(key, val);
    } else if (key == "fluid_width") {
      cfg.fluid_width = parse_double(key, val);
    } else if (key == "fluid_axis") {
      cfg.fluid_axis = parse_axis(key, val);
    } else if (key == "spinor_ic") {
      if (val == "plane-wave") cfg.spinor_ic = SpinorIc::plane_wave;
      else if (val == "gaussian-packet") cfg.spinor_ic = SpinorIc::gaussian_packet;
      else if (val == "constant") cfg.spinor_ic = SpinorIc::constant;
      else throw config_error("key 'spinor_ic': expected plane-wave|gaussian-packet|constant");
    } else if (key == "spinor_amp") {
      cfg.spinor_amp = parse_double(key, val);
    } else if (key == "spinor_mode") {
      cfg.spinor_mode = parse_int(key, val);
    } else if (key == "spinor_width") {
      cfg.spinor_width = parse_double(key, val);
    } else if (key == "spinor_mix") {
      cfg.spinor_mix = parse_double(key, val);
    } else if (key == "spinor_axis") {
      cfg.spinor_axis = parse_axis(key, val);
    } else if (key == "out_every") {
      cfg.out_every = parse_int(key, val);
    } else if (key == "snap_every") {
      cfg.snap_every = parse_int(key, val);
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, val);
    } else if (key == "threads") {
      cfg.threads = parse_int(key, val);
    } else {
      throw config_error("unknown key '" + key + "'");
    }
  }
  if (seen.count("N") && (seen.count("n1") || seen.count("n2") || seen.count("n3")))
    throw config_error("key 'N' conflicts with explicit n1/n2/n3");

  validate_config(cfg);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg) {
  const auto fail = [](const std::string& m) { throw config_error(m); };

  if (cfg.n1 < 1 || cfg.n2 < 1 || cfg.n3 < 1) fail("grid extents must be >= 1");
  if (i64(cfg.n1) * cfg.n2 * cfg.n3 < 2) fail("grid must have at least 2 cells");
  if (!(cfg.box_length > 0)) fail("box_length must be > 0");
  if (!(cfg.epsilon > 0)) fail("epsilon must be > 0");
  if (!(cfg.sigma2 > 0)) fail("sigma2 must be > 0");
  if (!(cfg.sigma2 * cfg.epsilon * cfg.epsilon < 1.0))
    fail("sigma2 must satisfy sigma2 * epsilon^2 < 1 (sound below light speed)");
  if (!(cfg.rho_min >= 0) || !(cfg.rho_max > cfg.rho_min))
    fail("density window [rho_min, rho_max] is empty");
  if (cfg.kappa < 0) fail("kappa must be >= 0");
  if (cfg.alpha < 0) fail("alpha must be >= 0");
  if (cfg.delta < 0) fail("delta must be >= 0 (0 selects the automatic radius)");
  if (!(cfg.cfl > 0) || cfg.cfl > 0.5) fail("cfl must lie in (0, 0.5]");
  if (!(cfg.t_final >= 0)) fail("t_final must be >= 0");
  if (!(cfg.recovery_tol > 0)) fail("recovery_tol must be > 0");
  if (cfg.recovery_max_iter < 1) fail("recovery_max_iter must be >= 1");
  if (!(cfg.picard_tol > 0)) fail("picard_tol must be > 0");
  if (cfg.picard_max_iter < 1) fail("picard_max_iter must be >= 1");

  if (!(cfg.rho0 > cfg.rho_min) || !(cfg.rho0 < cfg.rho_max))
    fail("rho0 must lie inside the density window");
  if (!(cfg.epsilon * cfg.u0.norm() < 1.0))
    fail("initial velocity must satisfy epsilon |u0| < 1");
  if (cfg.fluid_amp < 0 || cfg.fluid_amp >= 1) fail("fluid_amp must lie in [0, 1)");
  if (cfg.fluid_mode < 0) fail("fluid_mode must be >= 0");
  if (!(cfg.fluid_width > 0) || cfg.fluid_width > 0.5)
    fail("fluid_width must lie in (0, 0.5] (fraction of the box)");
  if (cfg.spinor_amp < 0) fail("spinor_amp must be >= 0");
  if (cfg.spinor_mode < 0) fail("spinor_mode must be >= 0");
  if (!(cfg.spinor_width > 0) || cfg.spinor_width > 0.5)
    fail("spinor_width must lie in (0, 0.5] (fraction of the box)");
  if (cfg.out_every < 1) fail("out_every must be >= 1");
  if (cfg.snap_every < 0) fail("snap_every must be >= 0");
  if (cfg.threads < 1) fail("threads must be >= 1");

  // A non-uniform fluid must vary along x3 only, otherwise the initial label
  // map has no periodic split on the torus.
  if (cfg.fluid_ic != FluidIc::uniform) {
    if (resolve_axis(cfg.fluid_axis, cfg.n1, cfg.n2, cfg.n3) != 3)
      fail("non-uniform fluid initial data must vary along x3 "
           "(set fluid_axis=3 and put resolution in n3)");
    if (cfg.n3 < 2) fail("fluid_axis=3 needs n3 >= 2");
  }
}

int resolve_axis(int requested, int n1, int n2, int n3) {
  if (requested != 0) return requested;
  int axis = 1, best = n1;
  if (n2 >= best) { best = n2; axis = 2; }
  if (n3 >= best) { axis = 3; }
  return axis;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "mode=" << to_string(c.mode) << "\n";
  o << "n1=" << c.n1 << "\n";
  o << "n2=" << c.n2 << "\n";
  o << "n3=" << c.n3 << "\n";
  o << "box_length=" << fmt_double(c.box_length) << "\n";
  o << "epsilon=" << fmt_double(c.epsilon) << "\n";
  o << "sigma2=" << fmt_double(c.sigma2) << "\n";
  o << "rho_min=" << fmt_double(c.rho_min) << "\n";
  o << "rho_max=" << fmt_double(c.rho_max) << "\n";
  o << "ptilde_form=" << to_string(c.ptilde_form) << "\n";
  o << "lambda=" << fmt_double(c.lambda) << "\n";
  o << "kappa=" << fmt_double(c.kappa) << "\n";
  o << "alpha=" << fmt_double(c.alpha) << "\n";
  o << "delta=" << fmt_double(c.delta) << "\n";
  o << "cfl=" << fmt_double(c.cfl) << "\n";
  o << "t_final=" << fmt_double(c.t_final) << "\n";
  o << "recovery_tol=" << fmt_double(c.recovery_tol) << "\n";
  o << "recovery_max_iter=" << c.recovery_max_iter << "\n";
  o << "picard_tol=" << fmt_double(c.picard_tol) << "\n";
  o << "picard_max_iter=" << c.picard_max_iter << "\n";
  o << "fluid_ic=" << to_string(c.fluid_ic) << "\n";
  o << "rho0=" << fmt_double(c.rho0) << "\n";
  o << "u0_1=" << fmt_double(c.u0.x) << "\n";
  o << "u0_2=" << fmt_double(c.u0.y) << "\n";
  o << "u0_3=" << fmt_double(c.u0.z) << "\n";
  o << "fluid_amp=" << fmt_double(c.fluid_amp) << "\n";
  o << "fluid_mode=" << c.fluid_mode << "\n";
  o << "fluid_width=" << fmt_double(c.fluid_width) << "\n";
  o << "fluid_axis=" << axis_string(c.fluid_axis) << "\n";
  o << "spinor_ic=" << to_string(c.spinor_ic) << "\n";
  o << "spinor_amp=" << fmt_double(c.spinor_amp) << "\n";
  o << "spinor_mode=" << c.spinor_mode << "\n";
  o << "spinor_width=" << fmt_double(c.spinor_width) << "\n";
  o << "spinor_mix=" << fmt_double(c.spinor_mix) << "\n";
  o << "spinor_axis=" << axis_string(c.spinor_axis) << "\n";
  o << "out_every=" << c.out_every << "\n";
  o << "snap_every=" << c.snap_every << "\n";
  o << "seed=" << c.seed << "\n";
  o << "threads=" << c.threads << "\n";
  return o.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace swlw
