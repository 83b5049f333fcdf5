// Copyright 2026 The qqm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file quat.hpp
 * @brief Quaternion scalar ring used by every other module.
 *
 * q = w + x e1 + y e2 + z e3 with e_i e_j = -delta_ij + sum_k eps_ijk e_k
 * (eps_123 = +1). Multiplication is noncommutative, so the order of every
 * product in this library is significant.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "qqm/error.hpp"

namespace qqm {

/// Signed basis element produced by multiplying two basis units.
struct BasisProduct {
  int index;  // 0 = real unit, 1..3 = e1..e3
  int sign;   // +1 or -1
};

namespace detail {

constexpr int levi_civita(int i, int j, int k) {
  // Indices in 1..3; even permutations of (1,2,3) give +1.
  if (i == j || j == k || i == k) return 0;
  return ((i == 1 && j == 2) || (i == 2 && j == 3) || (i == 3 && j == 1)) ? 1 : -1;
}

constexpr BasisProduct make_basis_product(int i, int j) {
  if (i == 0) return {j, 1};
  if (j == 0) return {i, 1};
  if (i == j) return {0, -1};
  const int k = 6 - i - j;
  return {k, levi_civita(i, j, k)};
}

constexpr std::array<std::array<BasisProduct, 4>, 4> make_basis_table() {
  std::array<std::array<BasisProduct, 4>, 4> t{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t[i][j] = make_basis_product(i, j);
  return t;
}

}  // namespace detail

/// e_i e_j for i, j in {0 (=1), 1, 2, 3}.
inline constexpr auto kBasisTable = detail::make_basis_table();

struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
  // Reals embed as the real subring.
  constexpr Quaternion(double real) : w(real) {}  // NOLINT(google-explicit-constructor)

  static constexpr Quaternion basis(int k) {
    Quaternion q;
    q[k] = 1.0;
    return q;
  }

  constexpr double& operator[](int k) { return k == 0 ? w : k == 1 ? x : k == 2 ? y : z; }
  constexpr double operator[](int k) const { return k == 0 ? w : k == 1 ? x : k == 2 ? y : z; }

  constexpr bool operator==(const Quaternion&) const = default;

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }
};

inline constexpr Quaternion kOne{1.0, 0.0, 0.0, 0.0};
inline constexpr Quaternion kE1{0.0, 1.0, 0.0, 0.0};
inline constexpr Quaternion kE2{0.0, 0.0, 1.0, 0.0};
inline constexpr Quaternion kE3{0.0, 0.0, 0.0, 1.0};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
constexpr Quaternion operator/(Quaternion a, double s) { return a *= (1.0 / s); }

/// Product p*q expanded through the basis table; no hand-written sign pattern.
constexpr Quaternion mul(const Quaternion& p, const Quaternion& q) {
  Quaternion r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const BasisProduct bp = kBasisTable[i][j];
      r[bp.index] += bp.sign * (p[i] * q[j]);
    }
  }
  return r;
}

constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) { return mul(p, q); }

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

constexpr double norm2(const Quaternion& q) { return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z; }

inline double norm(const Quaternion& q) { return std::sqrt(norm2(q)); }

constexpr Quaternion real_part(const Quaternion& q) { return {q.w, 0.0, 0.0, 0.0}; }
constexpr Quaternion imag_part(const Quaternion& q) { return {0.0, q.x, q.y, q.z}; }
inline double imag_norm(const Quaternion& q) { return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z); }

/// p*q - q*p.
constexpr Quaternion commutator(const Quaternion& p, const Quaternion& q) { return p * q - q * p; }

/// Largest component-wise |a - b|.
inline double max_abs_diff(const Quaternion& a, const Quaternion& b) {
  return std::fmax(std::fmax(std::fabs(a.w - b.w), std::fabs(a.x - b.x)),
                   std::fmax(std::fabs(a.y - b.y), std::fabs(a.z - b.z)));
}

inline bool approx_equal(const Quaternion& a, const Quaternion& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

inline constexpr double kInverseGuard = 1e-300;

/// Throws ZeroDivisor when |q| is below kInverseGuard.
Quaternion inverse(const Quaternion& q);

/// A quaternion of modulus one. The constructor accepts inputs within 1e-12
/// of the unit sphere and renormalizes them.
class UnitQuaternion {
 public:
  static constexpr double kTolerance = 1e-12;

  UnitQuaternion() = default;
  explicit UnitQuaternion(const Quaternion& q);

  /// Projects any nonzero q onto the unit sphere.
  static UnitQuaternion normalized(const Quaternion& q);

  const Quaternion& value() const noexcept { return q_; }
  operator const Quaternion&() const noexcept { return q_; }  // NOLINT(google-explicit-constructor)

  /// For unit quaternions conj == inverse.
  UnitQuaternion inverse() const noexcept { return UnitQuaternion(conj(q_), Unchecked{}); }
  bool is_pure() const noexcept { return std::fabs(q_.w) <= kTolerance; }

 private:
  struct Unchecked {};
  UnitQuaternion(const Quaternion& q, Unchecked) : q_(q) {}
  Quaternion q_ = kOne;
};

/// q = magnitude * exp(axis * angle).
struct PolarForm {
  double magnitude = 0.0;
  UnitQuaternion axis{kE1};
  double angle = 0.0;  // in [0, pi]
  // Set when the imaginary part is below 1e-12; axis is then e1 by convention.
  bool degenerate_axis = false;
};

inline constexpr double kDegenerateAxisTolerance = 1e-12;

/// magnitude * (cos(angle) + axis sin(angle)). Throws NotPureImaginary if
/// axis has a real part.
Quaternion exp_polar(double magnitude, const UnitQuaternion& axis, double angle);

/// Inverse of exp_polar with the positive-magnitude branch. Throws
/// ZeroDivisor for q = 0.
PolarForm polar(const Quaternion& q);

inline Quaternion reconstruct(const PolarForm& p) {
  return exp_polar(p.magnitude, p.axis, p.angle);
}

using Rng = std::mt19937_64;

/// Four standard-normal components; with `unit` set the result is
/// normalized, which makes it uniform on the 3-sphere.
Quaternion random_quaternion(Rng& rng, bool unit);
Quaternion random_quaternion(std::uint64_t seed, bool unit);

/// Uniformly distributed unit quaternion with zero real part.
UnitQuaternion random_pure_unit(Rng& rng);

}  // namespace qqm
