#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>

namespace swlw {

// Bad or inconsistent user input (config keys, parameter ranges, grid shapes).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A step was requested with dt above the advertised stability bound.
struct cfl_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Primitive recovery failed: non-physical conserved state or Newton stall.
struct recovery_error : std::runtime_error {
  std::int64_t cell = -1;
  recovery_error(const std::string& what, std::int64_t cell_idx)
      : std::runtime_error(what), cell(cell_idx) {}
};

// Numerical inversion of the label map did not converge.
struct inversion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace swlw
