#include "swlw/grid.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "swlw/errors.hpp"

namespace swlw {

Grid3 Grid3::torus(std::array<int, 3> n, std::array<double, 3> lengths) {
  Grid3 g;
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 1) throw config_error("grid extent must be >= 1");
    if (!(lengths[a] > 0.0)) throw config_error("box length must be positive");
    g.n[a] = n[a];
    g.h[a] = lengths[a] / n[a];
  }
  return g;
}

double Grid3::min_active_h() const {
  double m = 0.0;
  bool any = false;
  for (int a = 0; a < 3; ++a)
    if (axis_active(a)) {
      m = any ? std::min(m, h[a]) : h[a];
      any = true;
    }
  return any ? m : h[0];
}

double Grid3::max_active_h() const {
  double m = 0.0;
  bool any = false;
  for (int a = 0; a < 3; ++a)
    if (axis_active(a)) {
      m = any ? std::max(m, h[a]) : h[a];
      any = true;
    }
  return any ? m : h[0];
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ScalarField deriv4(const ScalarField& f, int axis) {
  const Grid3& g = f.grid;
  ScalarField out(g);
  if (!g.axis_active(axis)) return out;

  const double c = 1.0 / (12.0 * g.h[axis]);
  // Flat-index stride of one step along `axis`.
  const i64 stride = axis == 0 ? 1 : (axis == 1 ? g.n[0] : i64(g.n[0]) * g.n[1]);

  parallel_for(g.ncells(), [&](i64 lo, i64 hi) {
    int i, j, k;
    for (i64 idx = lo; idx < hi; ++idx) {
      g.coords(idx, i, j, k);
      const int q = axis == 0 ? i : (axis == 1 ? j : k);
      const i64 base = idx - i64(q) * stride;
      const auto at = [&](int off) {
        return f.v[size_t(base + i64(g.wrap(q + off, axis)) * stride)];
      };
      out.v[size_t(idx)] = c * (8.0 * (at(1) - at(-1)) - (at(2) - at(-2)));
    }
  });
  return out;
}

double sample_trilinear(const ScalarField& f, const Vec3& x) {
  const Grid3& g = f.grid;
  int i0[3], i1[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    double u = x[a] / g.h[a];
    double fl = std::floor(u);
    t[a] = u - fl;
    long long bi = (long long)fl % g.n[a];
    if (bi < 0) bi += g.n[a];
    const int base = int(bi);
    i0[a] = base;
    i1[a] = base + 1 == g.n[a] ? 0 : base + 1;
  }
  const auto val = [&](int i, int j, int k) { return f.v[size_t(g.index(i, j, k))]; };
  const double c00 = val(i0[0], i0[1], i0[2]) * (1 - t[0]) + val(i1[0], i0[1], i0[2]) * t[0];
  const double c10 = val(i0[0], i1[1], i0[2]) * (1 - t[0]) + val(i1[0], i1[1], i0[2]) * t[0];
  const double c01 = val(i0[0], i0[1], i1[2]) * (1 - t[0]) + val(i1[0], i0[1], i1[2]) * t[0];
  const double c11 = val(i0[0], i1[1], i1[2]) * (1 - t[0]) + val(i1[0], i1[1], i1[2]) * t[0];
  const double c0 = c00 * (1 - t[1]) + c10 * t[1];
  const double c1 = c01 * (1 - t[1]) + c11 * t[1];
  return c0 * (1 - t[2]) + c1 * t[2];
}

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int n) { g_threads.store(n < 1 ? 1 : n); }
int num_threads() { return g_threads.load(); }

void parallel_for(i64 count, const std::function<void(i64, i64)>& body) {
  const int nt = std::min<i64>(num_threads(), count > 0 ? count : 1);
  if (nt <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const i64 chunk = (count + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const i64 lo = t * chunk;
    const i64 hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace swlw
