#pragma once
#include <array>
#include <complex>
#include <cstdint>

namespace swlw {

using cplx = std::complex<double>;

// Dense complex 4x4 matrix, row-major.  Small enough that value semantics
// and unrolled loops beat any library dispatch.
class Mat4c {
 public:
  Mat4c() : e_{} {}

  static Mat4c zero() { return Mat4c(); }
  static Mat4c identity();

  cplx& at(int r, int c) { return e_[size_t(4 * r + c)]; }
  const cplx& at(int r, int c) const { return e_[size_t(4 * r + c)]; }

  Mat4c operator+(const Mat4c& o) const;
  Mat4c operator-(const Mat4c& o) const;
  Mat4c operator*(const Mat4c& o) const;
  Mat4c operator*(cplx s) const;
  Mat4c adjoint() const;

  // out = M * in, for spinor application in hot loops.
  void apply(const cplx in[4], cplx out[4]) const;

  double max_abs() const;           // entrywise sup norm
  double hermiticity_residual() const;  // max |M - M^dagger| entry

 private:
  std::array<cplx, 16> e_;
};

// One 4-spinor value.
struct Spinor {
  std::array<cplx, 4> c{};
  double norm2() const {
    double s = 0;
    for (const auto& z : c) s += std::norm(z);
    return s;
  }
};

// The three Hermitian anticommuting alpha matrices in the standard Dirac
// representation, plus the chiral element b = i a1 a2 a3.  b is Hermitian,
// squares to the identity, and commutes with every a_i; together {I, b} spans
// the commutant of the alpha set.
struct AlphaSet {
  std::array<Mat4c, 3> a;
  Mat4c b;
};

AlphaSet build_alpha_set();

// Max residual over the defining relations: a_i a_j + a_j a_i = 2 delta_ij I,
// hermiticity of each a_i and of b, b^2 = I, and [b, a_i] = 0.
double algebra_residual(const AlphaSet& alpha);

// Cubic self-interaction matrix U(s) = (s^dag s) I - (s^dag b s) b.
// Hermitian by construction; U(e1) = I in this representation.
Mat4c thirring_matrix(const Spinor& s, const AlphaSet& alpha);

// Full interaction matrix B = lambda U(s) + V I.
Mat4c interaction_matrix(const Spinor& s, double lambda, double V,
                         const AlphaSet& alpha);

// The eight pointwise bilinear observables of a spinor value: the charge
// density |s|^2 with current s^dag a_i s, and the pseudoscalar density
// s^dag b s with current s^dag b a_i s.  All exactly real; the imaginary
// parts are discarded after forming the quadratic forms.
struct CurrentSet {
  double charge = 0;
  std::array<double, 3> current{};
  double pseudo = 0;
  std::array<double, 3> pseudo_current{};
};

CurrentSet currents(const Spinor& s, const AlphaSet& alpha);

double commutator_max_abs(const Mat4c& a, const Mat4c& b);

}  // namespace swlw
