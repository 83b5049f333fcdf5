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
 * @file hspace.hpp
 * @brief Linear algebra over the quaternions.
 *
 * Kets form a right module (scalars multiply on the right, |a>q) and bras a
 * left module (q<b|). The inner product is <a|b> = sum_i conj(a_i) b_i.
 *
 * Spectral work is delegated to the complex symplectic embedding
 *
 *   q = a + b e1 + c e2 + d e3  ->  [[a+bi,  c+di],
 *                                     [-c+di, a-bi]]
 *
 * laid out block-wise: chi(M) = [[Z1, Z2], [-conj(Z2), conj(Z1)]] where
 * M = Z1 + Z2 e2 with complex Z1, Z2 (i identified with e1).
 */

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qqm/quat.hpp"

namespace qqm {

class HVector {
 public:
  HVector() = default;
  explicit HVector(std::size_t n) : entries_(n) {}
  HVector(std::initializer_list<Quaternion> init) : entries_(init) {}
  explicit HVector(std::vector<Quaternion> entries) : entries_(std::move(entries)) {}

  /// Standard basis ket |k>.
  static HVector unit(std::size_t n, std::size_t k);

  std::size_t size() const noexcept { return entries_.size(); }
  Quaternion& operator[](std::size_t i) { return entries_[i]; }
  const Quaternion& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const Quaternion> data() const noexcept { return entries_; }
  std::span<Quaternion> data() noexcept { return entries_; }

  HVector& operator+=(const HVector& o);
  HVector& operator-=(const HVector& o);

 private:
  std::vector<Quaternion> entries_;
};

/// |v> q. There is deliberately no q * HVector.
HVector operator*(const HVector& v, const Quaternion& q);
HVector operator+(HVector a, const HVector& b);
HVector operator-(HVector a, const HVector& b);

class HCovector {
 public:
  HCovector() = default;
  explicit HCovector(std::size_t n) : entries_(n) {}
  explicit HCovector(std::vector<Quaternion> entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  Quaternion& operator[](std::size_t i) { return entries_[i]; }
  const Quaternion& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<Quaternion> entries_;
};

/// q <b|. There is deliberately no HCovector * q.
HCovector operator*(const Quaternion& q, const HCovector& b);

/// The bra dual to |v>: entries conj(v_i).
HCovector bra(const HVector& v);

/// <b| applied to |v>, i.e. sum_i b_i v_i.
Quaternion contract(const HCovector& b, const HVector& v);

/// <a|b> = sum_i conj(a_i) b_i. Throws DimensionMismatch.
Quaternion inner(const HVector& a, const HVector& b);

/// sqrt(Re <v|v>).
double norm(const HVector& v);

double max_abs_diff(const HVector& a, const HVector& b);

class HMatrix {
 public:
  HMatrix() = default;
  HMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  HMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> data);
  HMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows);

  static HMatrix identity(std::size_t n);
  static HMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  /// Real diagonal matrix.
  static HMatrix diagonal(std::span<const double> values);
  /// Matrix whose columns are the given kets.
  static HMatrix from_columns(std::span<const HVector> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Quaternion& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Quaternion& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Quaternion> data() const noexcept { return data_; }
  std::span<Quaternion> data() noexcept { return data_; }

  HVector column(std::size_t j) const;

  HMatrix& operator+=(const HMatrix& o);
  HMatrix& operator-=(const HMatrix& o);
  HMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Quaternion> data_;
};

HMatrix operator+(HMatrix a, const HMatrix& b);
HMatrix operator-(HMatrix a, const HMatrix& b);
HMatrix operator-(HMatrix a);
HMatrix operator*(double s, HMatrix a);

/// Entry-wise sum_k A_ik B_kj. Throws DimensionMismatch.
HMatrix matmul(const HMatrix& a, const HMatrix& b);
/// M v. Commutes with right scalars: M (v q) = (M v) q.
HVector apply(const HMatrix& m, const HVector& v);

inline HMatrix operator*(const HMatrix& a, const HMatrix& b) { return matmul(a, b); }
inline HVector operator*(const HMatrix& m, const HVector& v) { return apply(m, v); }

/// (lambda M)_ij = lambda M_ij.
HMatrix left_scale(const Quaternion& lambda, const HMatrix& m);
/// (M lambda)_ij = M_ij lambda.
HMatrix right_scale(const HMatrix& m, const Quaternion& lambda);

/// (M^dagger)_ij = conj(M_ji).
HMatrix adjoint(const HMatrix& m);

/// AB - BA.
HMatrix commutator(const HMatrix& a, const HMatrix& b);

double max_abs(const HMatrix& m);
double max_abs_diff(const HMatrix& a, const HMatrix& b);
double frobenius_norm(const HMatrix& m);

/// max |M - M^dagger|.
double hermitian_residual(const HMatrix& m);
/// max |M + M^dagger|.
double anti_hermitian_residual(const HMatrix& m);

/// B^dagger M B: restriction of M to the span of B's (orthonormal) columns.
HMatrix restrict_to(const HMatrix& m, const HMatrix& basis);

struct ComplexEmbedding {
  Eigen::MatrixXcd matrix;

  std::size_t quaternion_rows() const { return static_cast<std::size_t>(matrix.rows()) / 2; }
  std::size_t quaternion_cols() const { return static_cast<std::size_t>(matrix.cols()) / 2; }

  /// max |J conj(chi) J^-1 - chi|.
  double symplectic_residual() const;
};

ComplexEmbedding embed(const HMatrix& m);

/// Inverse of embed. Throws NotSymplectic when the symplectic residual
/// exceeds `tolerance`; otherwise the two redundant blocks are averaged.
HMatrix lift(const ComplexEmbedding& c, double tolerance = 1e-10);

/// Eigenpairs H v = v lambda (eigenvalue on the right).
struct HermitianEigen {
  std::vector<double> values;  // ascending, one per quaternionic eigenvector
  std::vector<HVector> vectors;
};

/// Throws NotHermitian if max |H - H^dagger| > 1e-10. Eigenvectors inside a
/// degenerate cluster are orthonormal but otherwise arbitrary.
HermitianEigen eig_hermitian(const HMatrix& h);

/// exp(A) for anti-Hermitian A, via the embedding. Throws NotAntiHermitian,
/// or NotSymplectic if the complex result leaves the embedding's image by
/// more than 1e-8.
HMatrix expm_antihermitian(const HMatrix& a);

/// exp(M) for an arbitrary square M (Pade scaling-and-squaring on the
/// embedding). Not unitary in general.
HMatrix expm_general(const HMatrix& m);

/// Random Hermitian matrix with standard-normal quaternion entries.
HMatrix random_hermitian(std::size_t n, Rng& rng);
/// Random anti-Hermitian matrix (pure-imaginary diagonal).
HMatrix random_antihermitian(std::size_t n, Rng& rng);
/// Random ket of unit norm.
HVector random_ket(std::size_t n, Rng& rng);
HMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng);

/// Largest |lambda| of a Hermitian matrix.
double spectral_norm_hermitian(const HMatrix& h);

}  // namespace qqm
