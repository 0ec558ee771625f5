#include "swlw/dirac_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace swlw {

Mat4c Mat4c::identity() {
  Mat4c m;
  for (int r = 0; r < 4; ++r) m.at(r, r) = 1.0;
  return m;
}

Mat4c Mat4c::operator+(const Mat4c& o) const {
  Mat4c m;
  for (size_t i = 0; i < 16; ++i) m.e_[i] = e_[i] + o.e_[i];
  return m;
}

Mat4c Mat4c::operator-(const Mat4c& o) const {
  Mat4c m;
  for (size_t i = 0; i < 16; ++i) m.e_[i] = e_[i] - o.e_[i];
  return m;
}

Mat4c Mat4c::operator*(const Mat4c& o) const {
  Mat4c m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cplx s = 0;
      for (int k = 0; k < 4; ++k) s += at(r, k) * o.at(k, c);
      m.at(r, c) = s;
    }
  return m;
}

Mat4c Mat4c::operator*(cplx s) const {
  Mat4c m;
  for (size_t i = 0; i < 16; ++i) m.e_[i] = e_[i] * s;
  return m;
}

Mat4c Mat4c::adjoint() const {
  Mat4c m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m.at(r, c) = std::conj(at(c, r));
  return m;
}

void Mat4c::apply(const cplx in[4], cplx out[4]) const {
  for (int r = 0; r < 4; ++r) {
    out[r] = e_[size_t(4 * r + 0)] * in[0] + e_[size_t(4 * r + 1)] * in[1] +
             e_[size_t(4 * r + 2)] * in[2] + e_[size_t(4 * r + 3)] * in[3];
  }
}

double Mat4c::max_abs() const {
  double m = 0;
  for (const auto& z : e_) m = std::max(m, std::abs(z));
  return m;
}

double Mat4c::hermiticity_residual() const { return (*this - adjoint()).max_abs(); }

AlphaSet build_alpha_set() {
  // Standard Dirac representation: a_i has the Pauli matrix sigma_i in both
  // off-diagonal 2x2 blocks.  b = i a1 a2 a3 comes out as
  // [[0, -I2], [-I2, 0]].
  const cplx I(0, 1);
  AlphaSet s;

  // sigma_1
  s.a[0].at(0, 3) = 1;
  s.a[0].at(1, 2) = 1;
  s.a[0].at(2, 1) = 1;
  s.a[0].at(3, 0) = 1;
  // sigma_2
  s.a[1].at(0, 3) = -I;
  s.a[1].at(1, 2) = I;
  s.a[1].at(2, 1) = -I;
  s.a[1].at(3, 0) = I;
  // sigma_3
  s.a[2].at(0, 2) = 1;
  s.a[2].at(1, 3) = -1;
  s.a[2].at(2, 0) = 1;
  s.a[2].at(3, 1) = -1;

  s.b = (s.a[0] * s.a[1] * s.a[2]) * I;
  return s;
}

double algebra_residual(const AlphaSet& alpha) {
  const Mat4c I = Mat4c::identity();
  double r = 0;
  for (int i = 0; i < 3; ++i) {
    r = std::max(r, alpha.a[i].hermiticity_residual());
    for (int j = 0; j < 3; ++j) {
      Mat4c anti = alpha.a[i] * alpha.a[j] + alpha.a[j] * alpha.a[i];
      if (i == j) anti = anti - I * cplx(2.0);
      r = std::max(r, anti.max_abs());
    }
    r = std::max(r, commutator_max_abs(alpha.b, alpha.a[i]));
  }
  r = std::max(r, alpha.b.hermiticity_residual());
  r = std::max(r, (alpha.b * alpha.b - I).max_abs());
  return r;
}

Mat4c thirring_matrix(const Spinor& s, const AlphaSet& alpha) {
  cplx bs[4];
  alpha.b.apply(s.c.data(), bs);
  cplx pseudo = 0;
  for (int k = 0; k < 4; ++k) pseudo += std::conj(s.c[size_t(k)]) * bs[k];
  // Both quadratic forms are real (b Hermitian); keep only the real parts so
  // U is exactly Hermitian in floating point as well.
  const double w = s.norm2();
  const double wp = pseudo.real();
  Mat4c u = Mat4c::identity() * cplx(w);
  return u - alpha.b * cplx(wp);
}

Mat4c interaction_matrix(const Spinor& s, double lambda, double V,
                         const AlphaSet& alpha) {
  return thirring_matrix(s, alpha) * cplx(lambda) + Mat4c::identity() * cplx(V);
}

CurrentSet currents(const Spinor& s, const AlphaSet& alpha) {
  CurrentSet out;
  out.charge = s.norm2();
  cplx tmp[4];
  const auto form = [&](const Mat4c& m) {
    m.apply(s.c.data(), tmp);
    cplx v = 0;
    for (int k = 0; k < 4; ++k) v += std::conj(s.c[size_t(k)]) * tmp[k];
    return v.real();
  };
  for (int i = 0; i < 3; ++i) out.current[size_t(i)] = form(alpha.a[i]);
  out.pseudo = form(alpha.b);
  for (int i = 0; i < 3; ++i)
    out.pseudo_current[size_t(i)] = form(alpha.b * alpha.a[i]);
  return out;
}

double commutator_max_abs(const Mat4c& a, const Mat4c& b) {
  return (a * b - b * a).max_abs();
}

}  // namespace swlw
