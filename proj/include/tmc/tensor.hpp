#pragma once

// Dense 2x2 tensor algebra for plane-strain finite-strain mechanics.
//
// Non-symmetric second-order tensors (F, P, ...) are packed into 4-slot
// Voigt vectors with the fixed ordering
//
//     slot:       0    1    2    3
//     component:  11   22   12   21
//
// Double contraction A:B is then the plain dot product of the Voigt vectors,
// and a fourth-order tensor D_ijkl becomes the 4x4 matrix D[voigt(ij)][voigt(kl)].
// The out-of-plane stretch F33 is implicitly 1 and is never stored.

#include <array>
#include <cmath>
#include <utility>

#include <Eigen/Core>

#include "tmc/errors.hpp"

namespace tmc {

using Voigt4 = Eigen::Matrix<double, 4, 1>;
using Voigt4x4 = Eigen::Matrix<double, 4, 4>;

struct Tensor2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;

  static constexpr Tensor2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Tensor2 zero() { return {}; }
  static constexpr Tensor2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  // Component access with zero-based indices (i, j) in {0, 1}.
  double operator()(int i, int j) const {
    return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
  }
  double& operator()(int i, int j) {
    return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
  }

  constexpr double trace() const { return a11 + a22; }
  constexpr double det() const { return a11 * a22 - a12 * a21; }
  constexpr Tensor2 transpose() const { return {a11, a21, a12, a22}; }

  constexpr Tensor2& operator+=(const Tensor2& b) {
    a11 += b.a11; a12 += b.a12; a21 += b.a21; a22 += b.a22;
    return *this;
  }
  constexpr Tensor2& operator-=(const Tensor2& b) {
    a11 -= b.a11; a12 -= b.a12; a21 -= b.a21; a22 -= b.a22;
    return *this;
  }
  constexpr Tensor2& operator*=(double s) {
    a11 *= s; a12 *= s; a21 *= s; a22 *= s;
    return *this;
  }

  friend constexpr Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
  friend constexpr Tensor2 operator-(Tensor2 a, const Tensor2& b) { return a -= b; }
  friend constexpr Tensor2 operator-(Tensor2 a) { return a *= -1.0; }
  friend constexpr Tensor2 operator*(double s, Tensor2 a) { return a *= s; }
  friend constexpr Tensor2 operator*(Tensor2 a, double s) { return a *= s; }
  friend constexpr bool operator==(const Tensor2&, const Tensor2&) = default;
};

// Single contraction (matrix product).
constexpr Tensor2 dot(const Tensor2& a, const Tensor2& b) {
  return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

// Double contraction A:B = A_ij B_ij.
constexpr double ddot(const Tensor2& a, const Tensor2& b) {
  return a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22;
}

constexpr Tensor2 sym(const Tensor2& a) {
  const double s = 0.5 * (a.a12 + a.a21);
  return {a.a11, s, s, a.a22};
}

constexpr double frobenius_norm_sq(const Tensor2& a) { return ddot(a, a); }

// Determinant and inverse. Throws SingularTensorError when
// |det a| < 1e-14 * max(1, |a|^2).
std::pair<double, Tensor2> det_inv(const Tensor2& a);

// Voigt slot of component (i, j).
constexpr int voigt_index(int i, int j) { return i == j ? i : (i == 0 ? 2 : 3); }

// Component pair (i, j) held by Voigt slot s.
constexpr std::array<int, 2> voigt_pair(int s) {
  constexpr std::array<std::array<int, 2>, 4> pairs{{{0, 0}, {1, 1}, {0, 1}, {1, 0}}};
  return pairs[static_cast<std::size_t>(s)];
}

inline Voigt4 to_voigt(const Tensor2& a) { return Voigt4(a.a11, a.a22, a.a12, a.a21); }

inline Tensor2 from_voigt(const Voigt4& v) { return {v[0], v[2], v[3], v[1]}; }

// scale * I, where I is the fourth-order identity (I:A = A).
inline Voigt4x4 fourth_identity(double scale) { return scale * Voigt4x4::Identity(); }

}  // namespace tmc
