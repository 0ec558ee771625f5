#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace swlw {

using i64 = std::int64_t;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int a) { return a == 0 ? x : (a == 1 ? y : z); }
  double operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Uniform node-centered grid on a periodic box.  Nodes sit at x_a = i*h[a],
// i = 0..n[a]-1; the box length along axis a is n[a]*h[a].  An axis with
// n[a] == 1 is inactive: fields are constant along it and derivatives vanish.
// Storage is x-fastest: flat index = (k*n2 + j)*n1 + i.
struct Grid3 {
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> h{1.0, 1.0, 1.0};

  static Grid3 torus(std::array<int, 3> n, std::array<double, 3> lengths);

  i64 ncells() const { return i64(n[0]) * n[1] * n[2]; }
  double cell_volume() const { return h[0] * h[1] * h[2]; }
  double length(int a) const { return n[a] * h[a]; }
  bool axis_active(int a) const { return n[a] > 1; }

  i64 index(int i, int j, int k) const { return (i64(k) * n[1] + j) * n[0] + i; }
  void coords(i64 idx, int& i, int& j, int& k) const {
    i = int(idx % n[0]);
    j = int((idx / n[0]) % n[1]);
    k = int(idx / (i64(n[0]) * n[1]));
  }
  Vec3 node(int i, int j, int k) const { return {i * h[0], j * h[1], k * h[2]}; }

  int wrap(int i, int a) const {
    int m = i % n[a];
    return m < 0 ? m + n[a] : m;
  }

  // Smallest / largest spacing over active axes; a fully inactive grid
  // (1,1,1) reports its nominal spacing so callers never divide by zero.
  double min_active_h() const;
  double max_active_h() const;

  bool operator==(const Grid3&) const = default;
};

struct ScalarField {
  Grid3 grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid3& g) : grid(g), v(size_t(g.ncells()), 0.0) {}

  double& operator[](i64 i) { return v[size_t(i)]; }
  double operator[](i64 i) const { return v[size_t(i)]; }
  i64 size() const { return i64(v.size()); }

  double max_abs() const;
};

using VecField = std::array<ScalarField, 3>;

// Fourth-order centered first derivative along `axis`; returns zeros when the
// axis is inactive.  (8(f_{+1}-f_{-1}) - (f_{+2}-f_{-2})) / (12h), periodic.
ScalarField deriv4(const ScalarField& f, int axis);

// Periodic trilinear interpolation of a node-centered field at point x
// (coordinates in physical units; any real value is wrapped into the box).
double sample_trilinear(const ScalarField& f, const Vec3& x);

// Global worker count used by parallel_for.  Default 1; the CLI sets it from
// --threads.  Results are bitwise independent of the value: chunks are static
// and writes are disjoint, reductions stay serial.
void set_num_threads(int n);
int num_threads();

// Runs body(begin, end) over a static partition of [0, count).
void parallel_for(i64 count, const std::function<void(i64, i64)>& body);

}  // namespace swlw
