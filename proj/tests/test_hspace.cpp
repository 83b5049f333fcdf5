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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "generators.hpp"
#include "qqm/error.hpp"
#include "qqm/hspace.hpp"

using namespace qqm;
using qqm::testing::for_all;
using qqm::testing::Gen;
using cd = std::complex<double>;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NumericalFailure;
}

// exp(A) by scaling and squaring with a Taylor series, in quaternion
// arithmetic only.
HMatrix taylor_exp(const HMatrix& a) {
  const double scale = std::max(1.0, frobenius_norm(a));
  const int squarings = static_cast<int>(std::ceil(std::log2(scale))) + 4;
  HMatrix x = a;
  x *= std::ldexp(1.0, -squarings);
  HMatrix result = HMatrix::identity(a.rows());
  HMatrix term = HMatrix::identity(a.rows());
  for (int k = 1; k <= 20; ++k) {
    term = term * x;
    term *= 1.0 / k;
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

HMatrix outer(const HVector& v, double lambda) {
  HMatrix m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * Quaternion(lambda) * conj(v[j]);
  return m;
}

}  // namespace

TEST_CASE("inner examples") {
  const double s = 1.0 / std::sqrt(2.0);
  const HVector x{Quaternion(s), s * kE1};
  CHECK(max_abs_diff(inner(x, x), kOne) <= 1e-15);
  CHECK(inner(HVector{kOne, Quaternion{}}, HVector{kE2, Quaternion{}}) == kE2);
  CHECK(code_of([] { (void)inner(HVector(2), HVector(3)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("inner: conjugate symmetry and scalar sides") {
  for_all(1000, 11, [](Gen& g, std::size_t) {
    const std::size_t n = g.dim(1, 6);
    const HVector a = g.ket(n), b = g.ket(n);
    const Quaternion q = g.quaternion();
    // Direct recomputation of sum conj(a_i) b_i.
    Quaternion direct;
    for (std::size_t i = 0; i < n; ++i) direct += conj(a[i]) * b[i];
    CHECK(max_abs_diff(inner(a, b), direct) <= 1e-12);
    CHECK(max_abs_diff(conj(inner(a, b)), inner(b, a)) <= 1e-12);
    CHECK(max_abs_diff(inner(a, b * q), inner(a, b) * q) <= 1e-12);
    CHECK(max_abs_diff(inner(a * q, b), conj(q) * inner(a, b)) <= 1e-12);
    CHECK(max_abs_diff(contract(q * bra(a), b), q * inner(a, b)) <= 1e-12);
  });
}

TEST_CASE("adjoint examples") {
  CHECK(max_abs_diff(adjoint(HMatrix{{kE1}}), HMatrix{{-kE1}}) == 0.0);
  const HMatrix h{{kOne, kE1}, {-kE1, kOne}};
  CHECK(max_abs_diff(adjoint(h), h) == 0.0);
  CHECK(hermitian_residual(h) == 0.0);
  Gen g(12);
  const HMatrix x = g.matrix(3), y = g.matrix(3);
  CHECK(max_abs_diff(adjoint(x * y), adjoint(y) * adjoint(x)) <= 1e-12);
  CHECK(max_abs_diff(adjoint(adjoint(x)), x) == 0.0);
}

TEST_CASE("matmul examples") {
  Gen g(13);
  const HMatrix m = g.matrix(4);
  CHECK(max_abs_diff(HMatrix::identity(4) * m, m) == 0.0);
  CHECK(max_abs_diff(HMatrix{{kE1}} * HMatrix{{kE2}}, HMatrix{{kE3}}) == 0.0);
  const HVector v = g.ket(4);
  CHECK(max_abs_diff(m * (v * kE2), (m * v) * kE2) <= 1e-12);
  CHECK(code_of([&] { (void)(m * g.matrix(3)); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { (void)(m * g.ket(3)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("embedding convention") {
  const ComplexEmbedding e = embed(HMatrix{{kE1}});
  CHECK(e.matrix(0, 0) == cd(0.0, 1.0));
  CHECK(e.matrix(0, 1) == cd(0.0, 0.0));
  CHECK(e.matrix(1, 0) == cd(0.0, 0.0));
  CHECK(e.matrix(1, 1) == cd(0.0, -1.0));
  // a + b e1 + c e2 + d e3 -> [[a+bi, c+di], [-c+di, a-bi]]
  const ComplexEmbedding q = embed(HMatrix{{Quaternion{1.0, 2.0, 3.0, 4.0}}});
  CHECK(q.matrix(0, 0) == cd(1.0, 2.0));
  CHECK(q.matrix(0, 1) == cd(3.0, 4.0));
  CHECK(q.matrix(1, 0) == cd(-3.0, 4.0));
  CHECK(q.matrix(1, 1) == cd(1.0, -2.0));
}

TEST_CASE("embedding round trip and symplectic check") {
  Gen g(14);
  const HMatrix m = g.matrix(5);
  CHECK(max_abs_diff(lift(embed(m)), m) <= 1e-12);
  CHECK(embed(m).symplectic_residual() <= 1e-12);
  ComplexEmbedding broken = embed(m);
  broken.matrix(0, 0) += cd(1e-3, 0.0);
  CHECK(code_of([&] { (void)lift(broken); }) == ErrorCode::NotSymplectic);
}

TEST_CASE("eig_hermitian: [[1, e1], [-e1, 1]] has spectrum {0, 2}") {
  const HMatrix h{{kOne, kE1}, {-kE1, kOne}};
  // K = H - I squares to the identity, so the spectrum is 1 +- 1.
  const HMatrix k = h - HMatrix::identity(2);
  CHECK(max_abs_diff(k * k, HMatrix::identity(2)) == 0.0);
  const HermitianEigen e = eig_hermitian(h);
  REQUIRE(e.values.size() == 2);
  CHECK(e.values[0] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-12));
  // Embedding oracle: each eigenvalue appears twice among the complex ones.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(embed(h).matrix);
  CHECK(s.eigenvalues()(0) == doctest::Approx(0.0).scale(1.0));
  CHECK(s.eigenvalues()(1) == doctest::Approx(0.0).scale(1.0));
  CHECK(s.eigenvalues()(2) == doctest::Approx(2.0));
  CHECK(s.eigenvalues()(3) == doctest::Approx(2.0));
}

TEST_CASE("eig_hermitian: diagonal and degenerate inputs") {
  const std::vector<double> d{3.0, -1.0};
  const HermitianEigen e = eig_hermitian(HMatrix::diagonal(d));
  CHECK(e.values[0] == doctest::Approx(-1.0));
  CHECK(e.values[1] == doctest::Approx(3.0));

  // Fully degenerate: compare the projector, not individual vectors.
  const HermitianEigen id = eig_hermitian(HMatrix::identity(3));
  HMatrix projector(3, 3);
  for (const auto& v : id.vectors) projector += outer(v, 1.0);
  CHECK(max_abs_diff(projector, HMatrix::identity(3)) <= 1e-12);
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  CHECK(code_of([] { (void)eig_hermitian(HMatrix{{kOne, kE1}, {kE1, kOne}}); }) == ErrorCode::NotHermitian);
}

TEST_CASE("eig_hermitian: eigenpairs, orthonormality, reconstruction") {
  for_all(100, 15, [](Gen& g, std::size_t) {
    const std::size_t n = g.dim(2, 6);
    const HMatrix h = g.hermitian(n);
    const HermitianEigen e = eig_hermitian(h);
    REQUIRE(e.values.size() == n);
    CHECK(std::is_sorted(e.values.begin(), e.values.end()));
    HMatrix rebuilt(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(max_abs_diff(h * e.vectors[k], e.vectors[k] * Quaternion(e.values[k])) <= 1e-9);
      for (std::size_t l = 0; l < n; ++l) {
        CHECK(max_abs_diff(inner(e.vectors[k], e.vectors[l]), Quaternion(k == l ? 1.0 : 0.0)) <= 1e-10);
      }
      rebuilt += outer(e.vectors[k], e.values[k]);
    }
    CHECK(frobenius_norm(rebuilt - h) / frobenius_norm(h) <= 1e-8);
  });
}

TEST_CASE("property: embedded eigenvalues are real and come in pairs") {
  double worst_imag = 0.0;
  for_all(100, 16, [&](Gen& g, std::size_t) {
    const std::size_t n = g.dim(2, 6);
    // General (non-Hermitian) complex solver as the oracle.
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> s(embed(g.hermitian(n)).matrix);
    std::vector<double> re;
    for (Eigen::Index k = 0; k < s.eigenvalues().size(); ++k) {
      worst_imag = std::max(worst_imag, std::fabs(s.eigenvalues()(k).imag()));
      re.push_back(s.eigenvalues()(k).real());
    }
    std::sort(re.begin(), re.end());
    for (std::size_t k = 0; k < re.size(); k += 2) CHECK(re[k] == doctest::Approx(re[k + 1]).epsilon(1e-8));
  });
  CHECK(worst_imag <= 1e-10);
}

TEST_CASE("expm_antihermitian examples") {
  CHECK(max_abs_diff(expm_antihermitian(HMatrix(3, 3)), HMatrix::identity(3)) <= 1e-15);
  const HMatrix a{{std::numbers::pi * kE1}};
  CHECK(max_abs_diff(expm_antihermitian(a), HMatrix{{Quaternion(-1.0)}}) <= 1e-12);
  CHECK(max_abs_diff(expm_antihermitian(a)(0, 0), exp_polar(1.0, UnitQuaternion(kE1), std::numbers::pi)) <= 1e-12);
  CHECK(code_of([] { (void)expm_antihermitian(HMatrix{{kOne}}); }) == ErrorCode::NotAntiHermitian);
}

TEST_CASE("expm_antihermitian: unitary and equal to the Taylor oracle") {
  for_all(50, 17, [](Gen& g, std::size_t) {
    const std::size_t n = g.dim(2, 5);
    const HMatrix a = g.antihermitian(n);
    const HMatrix u = expm_antihermitian(a);
    CHECK(max_abs_diff(adjoint(u) * u, HMatrix::identity(n)) <= 1e-9);
    CHECK(max_abs_diff(u, taylor_exp(a)) <= 1e-10);
  });
}

TEST_CASE("expm_general matches the Taylor oracle on a non-normal matrix") {
  Gen g(18);
  const HMatrix m = g.matrix(3);
  CHECK(max_abs_diff(expm_general(m), taylor_exp(m)) <= 1e-9 * max_abs(taylor_exp(m)));
}

TEST_CASE("property: right-module law") {
  double worst = 0.0;
  for_all(1000, 19, [&](Gen& g, std::size_t) {
    const HVector v = g.ket(g.dim(1, 6));
    const Quaternion p = g.quaternion(), q = g.quaternion();
    worst = std::max(worst, max_abs_diff((v * p) * q, v * (p * q)));
  });
  CHECK(worst <= 1e-12);
}

TEST_CASE("property: adjoint and embedding are (anti-)homomorphisms") {
  double adj = 0.0, prod = 0.0, dag = 0.0;
  for_all(1000, 20, [&](Gen& g, std::size_t) {
    const std::size_t n = g.dim(1, 5);
    const HMatrix x = g.matrix(n), y = g.matrix(n);
    adj = std::max(adj, max_abs_diff(adjoint(x * y), adjoint(y) * adjoint(x)));
    prod = std::max(prod, (embed(x * y).matrix - embed(x).matrix * embed(y).matrix).cwiseAbs().maxCoeff());
    dag = std::max(dag, (embed(adjoint(x)).matrix - embed(x).matrix.adjoint()).cwiseAbs().maxCoeff());
  });
  CHECK(adj <= 1e-12);
  CHECK(prod <= 1e-12);
  CHECK(dag <= 1e-12);
}

TEST_CASE("restrict_to compresses onto a subspace") {
  Gen g(21);
  const HMatrix m = g.matrix(4);
  HMatrix basis(4, 2);
  basis(1, 0) = kOne;
  basis(3, 1) = kOne;
  const HMatrix r = restrict_to(m, basis);
  CHECK(r(0, 0) == m(1, 1));
  CHECK(r(0, 1) == m(1, 3));
  CHECK(r(1, 0) == m(3, 1));
  CHECK(r(1, 1) == m(3, 3));
}
