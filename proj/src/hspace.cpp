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

#include "qqm/hspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qqm/error.hpp"
#include "qqm/kernels.hpp"

namespace qqm {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

using cd = std::complex<double>;

Quaternion from_complex_pair(const cd& z1, const cd& z2) {
  return {z1.real(), z1.imag(), z2.real(), z2.imag()};
}

}  // namespace

// ---------------------------------------------------------------------------
// Vectors

HVector HVector::unit(std::size_t n, std::size_t k) {
  HVector v(n);
  v[k] = kOne;
  return v;
}

HVector& HVector::operator+=(const HVector& o) {
  require_same_size(size(), o.size(), "HVector +=");
  for (std::size_t i = 0; i < size(); ++i) entries_[i] += o[i];
  return *this;
}

HVector& HVector::operator-=(const HVector& o) {
  require_same_size(size(), o.size(), "HVector -=");
  for (std::size_t i = 0; i < size(); ++i) entries_[i] -= o[i];
  return *this;
}

HVector operator*(const HVector& v, const Quaternion& q) {
  HVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * q;
  return out;
}

HVector operator+(HVector a, const HVector& b) { return a += b; }
HVector operator-(HVector a, const HVector& b) { return a -= b; }

HCovector operator*(const Quaternion& q, const HCovector& b) {
  HCovector out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = q * b[i];
  return out;
}

HCovector bra(const HVector& v) {
  HCovector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = conj(v[i]);
  return out;
}

Quaternion contract(const HCovector& b, const HVector& v) {
  require_same_size(b.size(), v.size(), "contract");
  Quaternion acc;
  for (std::size_t i = 0; i < v.size(); ++i) acc += b[i] * v[i];
  return acc;
}

Quaternion inner(const HVector& a, const HVector& b) {
  require_same_size(a.size(), b.size(), "inner");
  Quaternion acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc += conj(a[i]) * b[i];
  return acc;
}

double norm(const HVector& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += norm2(v[i]);
  return std::sqrt(acc);
}

double max_abs_diff(const HVector& a, const HVector& b) {
  require_same_size(a.size(), b.size(), "max_abs_diff");
  return kernels::serial::max_abs_diff(a.data(), b.data());
}

// ---------------------------------------------------------------------------
// Matrices

HMatrix::HMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_same_size(data_.size(), rows * cols, "HMatrix storage");
}

HMatrix::HMatrix(std::initializer_list<std::initializer_list<Quaternion>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require_same_size(r.size(), cols_, "HMatrix row length");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

HMatrix HMatrix::identity(std::size_t n) {
  HMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = kOne;
  return m;
}

HMatrix HMatrix::diagonal(std::span<const double> values) {
  HMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = Quaternion(values[i]);
  return m;
}

HMatrix HMatrix::from_columns(std::span<const HVector> columns) {
  if (columns.empty()) return {};
  HMatrix m(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require_same_size(columns[j].size(), m.rows(), "from_columns");
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = columns[j][i];
  }
  return m;
}

HVector HMatrix::column(std::size_t j) const {
  HVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

HMatrix& HMatrix::operator+=(const HMatrix& o) {
  require_same_size(rows_, o.rows_, "HMatrix += rows");
  require_same_size(cols_, o.cols_, "HMatrix += cols");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

HMatrix& HMatrix::operator-=(const HMatrix& o) {
  require_same_size(rows_, o.rows_, "HMatrix -= rows");
  require_same_size(cols_, o.cols_, "HMatrix -= cols");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

HMatrix& HMatrix::operator*=(double s) {
  for (auto& q : data_) q *= s;
  return *this;
}

HMatrix operator+(HMatrix a, const HMatrix& b) { return a += b; }
HMatrix operator-(HMatrix a, const HMatrix& b) { return a -= b; }
HMatrix operator-(HMatrix a) { return a *= -1.0; }
HMatrix operator*(double s, HMatrix a) { return a *= s; }

HMatrix matmul(const HMatrix& a, const HMatrix& b) {
  require_same_size(a.cols(), b.rows(), "matmul inner dimension");
  HMatrix c(a.rows(), b.cols());
  if (kernels::prefer_parallel(a.rows() * a.cols() * b.cols())) {
    kernels::parallel::matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  } else {
    kernels::serial::matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  }
  return c;
}

HVector apply(const HMatrix& m, const HVector& v) {
  require_same_size(m.cols(), v.size(), "apply");
  HVector out(m.rows());
  if (kernels::prefer_parallel(m.rows() * m.cols())) {
    kernels::parallel::matvec(m.data(), v.data(), out.data(), m.rows(), m.cols());
  } else {
    kernels::serial::matvec(m.data(), v.data(), out.data(), m.rows(), m.cols());
  }
  return out;
}

HMatrix left_scale(const Quaternion& lambda, const HMatrix& m) {
  HMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.data().size(); ++i) out.data()[i] = lambda * m.data()[i];
  return out;
}

HMatrix right_scale(const HMatrix& m, const Quaternion& lambda) {
  HMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.data().size(); ++i) out.data()[i] = m.data()[i] * lambda;
  return out;
}

HMatrix adjoint(const HMatrix& m) {
  HMatrix out(m.cols(), m.rows());
  kernels::serial::adjoint(m.data(), out.data(), m.rows(), m.cols());
  return out;
}

HMatrix commutator(const HMatrix& a, const HMatrix& b) { return matmul(a, b) - matmul(b, a); }

double max_abs(const HMatrix& m) {
  double worst = 0.0;
  for (const auto& q : m.data()) worst = std::max(worst, std::sqrt(norm2(q)));
  return worst;
}

double max_abs_diff(const HMatrix& a, const HMatrix& b) {
  require_same_size(a.rows(), b.rows(), "max_abs_diff rows");
  require_same_size(a.cols(), b.cols(), "max_abs_diff cols");
  if (kernels::prefer_parallel(a.data().size())) return kernels::parallel::max_abs_diff(a.data(), b.data());
  return kernels::serial::max_abs_diff(a.data(), b.data());
}

double frobenius_norm(const HMatrix& m) {
  double acc = 0.0;
  for (const auto& q : m.data()) acc += norm2(q);
  return std::sqrt(acc);
}

double hermitian_residual(const HMatrix& m) {
  if (!m.is_square()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      worst = std::max(worst, qqm::max_abs_diff(m(i, j), conj(m(j, i))));
  return worst;
}

double anti_hermitian_residual(const HMatrix& m) {
  if (!m.is_square()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      worst = std::max(worst, qqm::max_abs_diff(m(i, j), -conj(m(j, i))));
  return worst;
}

HMatrix restrict_to(const HMatrix& m, const HMatrix& basis) {
  return matmul(adjoint(basis), matmul(m, basis));
}

// ---------------------------------------------------------------------------
// Complex embedding

double ComplexEmbedding::symplectic_residual() const {
  const Eigen::Index r = matrix.rows() / 2;
  const Eigen::Index c = matrix.cols() / 2;
  const auto z1 = matrix.topLeftCorner(r, c);
  const auto z2 = matrix.topRightCorner(r, c);
  const double a = (matrix.bottomLeftCorner(r, c) + z2.conjugate()).cwiseAbs().maxCoeff();
  const double b = (matrix.bottomRightCorner(r, c) - z1.conjugate()).cwiseAbs().maxCoeff();
  return (r == 0 || c == 0) ? 0.0 : std::max(a, b);
}

ComplexEmbedding embed(const HMatrix& m) {
  const auto r = static_cast<Eigen::Index>(m.rows());
  const auto c = static_cast<Eigen::Index>(m.cols());
  ComplexEmbedding out{Eigen::MatrixXcd(2 * r, 2 * c)};
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      const Quaternion& q = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const cd z1(q.w, q.x);
      const cd z2(q.y, q.z);
      out.matrix(i, j) = z1;
      out.matrix(i, j + c) = z2;
      out.matrix(i + r, j) = -std::conj(z2);
      out.matrix(i + r, j + c) = std::conj(z1);
    }
  }
  return out;
}

HMatrix lift(const ComplexEmbedding& emb, double tolerance) {
  const double residual = emb.symplectic_residual();
  if (!(residual <= tolerance)) {
    throw Error(ErrorCode::NotSymplectic, "symplectic residual " + std::to_string(residual));
  }
  const Eigen::Index r = emb.matrix.rows() / 2;
  const Eigen::Index c = emb.matrix.cols() / 2;
  HMatrix out(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      const cd z1 = 0.5 * (emb.matrix(i, j) + std::conj(emb.matrix(i + r, j + c)));
      const cd z2 = 0.5 * (emb.matrix(i, j + c) - std::conj(emb.matrix(i + r, j)));
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = from_complex_pair(z1, z2);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral routines

namespace {

// Ket whose embedding has `col` as its first column: (u; v) -> u - conj(v) e2.
HVector ket_from_complex(const Eigen::VectorXcd& col, std::size_t n) {
  HVector v(n);
  const auto ni = static_cast<Eigen::Index>(n);
  for (Eigen::Index i = 0; i < ni; ++i) {
    v[static_cast<std::size_t>(i)] = from_complex_pair(col(i), -std::conj(col(i + ni)));
  }
  return v;
}

// Removes the right-span of each accepted ket from v (two passes).
void orthogonalize(HVector& v, std::span<const HVector> accepted) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : accepted) v -= u * inner(u, v);
  }
}

}  // namespace

HermitianEigen eig_hermitian(const HMatrix& h) {
  if (!h.is_square()) throw Error(ErrorCode::NotHermitian, "matrix is not square");
  const double residual = hermitian_residual(h);
  if (!(residual <= 1e-10)) {
    throw Error(ErrorCode::NotHermitian, "hermitian residual " + std::to_string(residual));
  }
  const std::size_t n = h.rows();
  HermitianEigen out;
  if (n == 0) return out;

  const ComplexEmbedding emb = embed(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(emb.matrix);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver failed");
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Eigen::MatrixXcd& evecs = solver.eigenvectors();

  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  const double gap = 1e-8 * scale;
  const auto total = static_cast<std::size_t>(evals.size());

  std::vector<std::pair<double, HVector>> pairs;
  pairs.reserve(n);
  std::size_t start = 0;
  while (start < total) {
    std::size_t end = start + 1;
    while (end < total && evals(static_cast<Eigen::Index>(end)) - evals(static_cast<Eigen::Index>(end - 1)) < gap) {
      ++end;
    }
    // Each quaternionic eigenvector accounts for a pair of complex ones.
    const std::size_t wanted = (end - start + 1) / 2;
    std::vector<HVector> candidates;
    for (std::size_t k = start; k < end; ++k) {
      candidates.push_back(ket_from_complex(evecs.col(static_cast<Eigen::Index>(k)), n));
    }
    std::vector<HVector> accepted;
    for (std::size_t picked = 0; picked < wanted; ++picked) {
      double best_norm = -1.0;
      std::size_t best = 0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        HVector trial = candidates[c];
        orthogonalize(trial, accepted);
        const double nrm = norm(trial);
        if (nrm > best_norm) {
          best_norm = nrm;
          best = c;
        }
      }
      if (best_norm < 1e-6) throw Error(ErrorCode::NumericalFailure, "degenerate cluster lost rank");
      HVector v = candidates[best];
      orthogonalize(v, accepted);
      v = v * Quaternion(1.0 / norm(v));
      accepted.push_back(v);
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
    }
    for (auto& v : accepted) {
      const double rayleigh = inner(v, apply(h, v)).w;
      pairs.emplace_back(rayleigh, std::move(v));
    }
    start = end;
  }
  if (pairs.size() != n) {
    throw Error(ErrorCode::NumericalFailure,
                "recovered " + std::to_string(pairs.size()) + " eigenvectors, expected " + std::to_string(n));
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (auto& [value, vec] : pairs) {
    out.values.push_back(value);
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

HMatrix expm_antihermitian(const HMatrix& a) {
  if (!a.is_square()) throw Error(ErrorCode::NotAntiHermitian, "matrix is not square");
  const double residual = anti_hermitian_residual(a);
  if (!(residual <= 1e-10)) {
    throw Error(ErrorCode::NotAntiHermitian, "anti-hermitian residual " + std::to_string(residual));
  }
  if (a.rows() == 0) return {};
  const ComplexEmbedding emb = embed(a);
  // chi(A) = i K with K Hermitian, so exp(chi(A)) = V diag(exp(i mu)) V^H.
  const Eigen::MatrixXcd k = cd(0.0, -1.0) * emb.matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (k + k.adjoint()));
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver failed");
  const Eigen::VectorXcd phases =
      solver.eigenvalues().unaryExpr([](double mu) { return std::exp(cd(0.0, mu)); });
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  ComplexEmbedding result{v * phases.asDiagonal() * v.adjoint()};
  return lift(result, 1e-8);
}

HMatrix expm_general(const HMatrix& m) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "expm of a non-square matrix");
  if (m.rows() == 0) return {};
  const ComplexEmbedding emb = embed(m);
  ComplexEmbedding result{emb.matrix.exp()};
  return lift(result, 1e-8 * std::max(1.0, result.matrix.cwiseAbs().maxCoeff()));
}

double spectral_norm_hermitian(const HMatrix& h) {
  const ComplexEmbedding emb = embed(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(emb.matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace qqm

namespace qqm {

HMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  HMatrix m(rows, cols);
  for (auto& q : m.data()) q = random_quaternion(rng, false);
  return m;
}

HMatrix random_hermitian(std::size_t n, Rng& rng) {
  HMatrix m(n, n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = Quaternion(gauss(rng));
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = random_quaternion(rng, false);
      m(j, i) = conj(m(i, j));
    }
  }
  return m;
}

HMatrix random_antihermitian(std::size_t n, Rng& rng) {
  HMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = imag_part(random_quaternion(rng, false));
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = random_quaternion(rng, false);
      m(j, i) = -conj(m(i, j));
    }
  }
  return m;
}

HVector random_ket(std::size_t n, Rng& rng) {
  HVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = random_quaternion(rng, false);
  return v * Quaternion(1.0 / norm(v));
}

}  // namespace qqm
