#pragma once
#include <fstream>
#include <string>
#include <vector>

#include "swlw/config.hpp"
#include "swlw/grid.hpp"

namespace swlw {

// Snapshot format: one ASCII header line
//   dims=N1,N2,N3 spacing=h1,h2,h3 time=<t> fields=<comma-separated names>
// followed by the raw little-endian float64 payload in field-then-z-then-y-
// then-x order (which is exactly the in-memory layout of ScalarField).
struct SnapshotField {
  std::string name;
  const std::vector<double>* data;
};

void write_snapshot(const std::string& path, const Grid3& g, double time,
                    const std::vector<SnapshotField>& fields);

struct Snapshot {
  Grid3 grid;
  double time = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> fields;
};

Snapshot read_snapshot(const std::string& path);

// %.17g: shortest representation that round-trips a double.
std::string format_double(double x);

// Diagnostics CSV: header row once, then one fixed-width-free row per call.
// All numeric cells are %.17g so files are byte-stable across runs.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  size_t ncols_;
};

// Run manifest: version, config hash, seed, then the canonical config after
// a separator line.  No timestamps, so reruns produce identical bytes.
void write_manifest(const std::string& path, const RunConfig& cfg);

}  // namespace swlw
