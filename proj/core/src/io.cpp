#include "swlw/io.hpp"

#include <bit>
#include <cstdio>
#include <sstream>

#include "swlw/errors.hpp"
#include "swlw/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot payloads are little-endian; add byte swapping for "
              "big-endian targets");

namespace swlw {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_snapshot(const std::string& path, const Grid3& g, double time,
                    const std::vector<SnapshotField>& fields) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open snapshot for writing: " + path);

  std::ostringstream head;
  head << "dims=" << g.n[0] << "," << g.n[1] << "," << g.n[2]
       << " spacing=" << format_double(g.h[0]) << "," << format_double(g.h[1])
       << "," << format_double(g.h[2]) << " time=" << format_double(time)
       << " fields=";
  for (size_t f = 0; f < fields.size(); ++f) {
    if (f) head << ",";
    head << fields[f].name;
  }
  head << "\n";
  out << head.str();

  const size_t count = size_t(g.ncells());
  for (const auto& f : fields) {
    if (f.data->size() != count)
      throw config_error("snapshot field '" + f.name + "' has the wrong size");
    out.write(reinterpret_cast<const char*>(f.data->data()),
              std::streamsize(count * sizeof(double)));
  }
  if (!out) throw config_error("short write on snapshot: " + path);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open snapshot: " + path);
  std::string header;
  if (!std::getline(in, header)) throw config_error("snapshot has no header: " + path);

  Snapshot snap;
  std::array<int, 3> dims{};
  std::array<double, 3> spacing{};
  bool have_dims = false, have_spacing = false, have_fields = false;

  for (const std::string& tok : split(header, ' ')) {
    const size_t eq = tok.find('=');
    if (eq == std::string::npos)
      throw config_error("bad snapshot header token: " + tok);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "dims") {
      const auto p = split(val, ',');
      if (p.size() != 3) throw config_error("snapshot dims needs 3 entries");
      for (int a = 0; a < 3; ++a) dims[size_t(a)] = std::stoi(p[size_t(a)]);
      have_dims = true;
    } else if (key == "spacing") {
      const auto p = split(val, ',');
      if (p.size() != 3) throw config_error("snapshot spacing needs 3 entries");
      for (int a = 0; a < 3; ++a) spacing[size_t(a)] = std::stod(p[size_t(a)]);
      have_spacing = true;
    } else if (key == "time") {
      snap.time = std::stod(val);
    } else if (key == "fields") {
      snap.names = split(val, ',');
      have_fields = true;
    } else {
      throw config_error("unknown snapshot header key: " + key);
    }
  }
  if (!have_dims || !have_spacing || !have_fields)
    throw config_error("snapshot header is missing dims/spacing/fields");

  snap.grid.n = dims;
  snap.grid.h = spacing;
  const size_t count = size_t(snap.grid.ncells());
  snap.fields.resize(snap.names.size());
  for (auto& f : snap.fields) {
    f.resize(count);
    in.read(reinterpret_cast<char*>(f.data()), std::streamsize(count * sizeof(double)));
    if (size_t(in.gcount()) != count * sizeof(double))
      throw config_error("snapshot payload truncated: " + path);
  }
  return snap;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), ncols_(columns.size()) {
  if (!out_) throw config_error("cannot open csv for writing: " + path);
  for (size_t c = 0; c < columns.size(); ++c) {
    if (c) out_ << ",";
    out_ << columns[c];
  }
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_)
    throw config_error("csv row has the wrong number of columns");
  for (size_t c = 0; c < values.size(); ++c) {
    if (c) out_ << ",";
    out_ << format_double(values[c]);
  }
  out_ << "\n";
  out_.flush();
}

void write_manifest(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open manifest for writing: " + path);
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  out << "version=" << version_string << "\n";
  out << "config_hash=" << hex << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "---\n";
  out << serialize_config(cfg);
}

}  // namespace swlw
