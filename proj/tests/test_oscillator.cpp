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

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qqm/error.hpp"
#include "qqm/oscillator.hpp"

using namespace qqm;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NumericalFailure;
}

}  // namespace

TEST_CASE("build validates its inputs") {
  CHECK(code_of([] { (void)FockOscillator::build(1.0, 7, {0}); }) == ErrorCode::TruncationTooSmall);
  CHECK(code_of([] { (void)FockOscillator::build(0.0, 8, {0}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { (void)FockOscillator::build(1.0, 8, {}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { (void)FockOscillator::build(1.0, 8, {0, 0}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { (void)FockOscillator::build(1.0, 8, {4}); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { (void)FockOscillator::build(1.0, 8, {0, 1, 2}); }) == ErrorCode::ConfigInvalid);
  CHECK(FockOscillator::build(1.0, 8, {0, 1, 2}, IotaSpec(), true).dim() == 512);
}

TEST_CASE("ladder operator and product indexing") {
  const FockOscillator osc = FockOscillator::build(1.3, 8, {0, 2});
  CHECK(osc.dim() == 64);
  // Index i = n0 + 8 n1.
  CHECK(osc.occupations(8 * 3 + 5) == std::vector<std::size_t>{5, 3});
  const HMatrix& a1 = osc.lowering(1);
  for (std::size_t n = 1; n < 8; ++n) {
    // a |n0=2, n1=n> = sqrt(n) |2, n-1>
    CHECK(a1(2 + 8 * (n - 1), 2 + 8 * n).w == doctest::Approx(std::sqrt(static_cast<double>(n))));
  }
  CHECK(osc.interior_indices().size() == 49);
}

TEST_CASE("spectrum is omega (n + 1/2)") {
  for (std::size_t n : {8, 12, 16}) {
    const FockOscillator osc = FockOscillator::build(0.7, n, {1});
    const HermitianEigen e = eig_hermitian(osc.hamiltonian());
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::fabs(e.values[k] - 0.7 * (static_cast<double>(k) + 0.5)) <= 1e-9);
      CHECK(osc.analytic_spectrum()[k] == doctest::Approx(0.7 * (static_cast<double>(k) + 0.5)));
    }
    // The quadrature form agrees with the number form below the top level.
    const std::vector<std::size_t> inside = osc.interior_indices();
    const HMatrix basis = index_subspace(osc.dim(), inside);
    CHECK(max_abs_diff(restrict_to(osc.quadrature_hamiltonian(), basis), restrict_to(osc.hamiltonian(), basis)) <= 1e-12);
  }
}

TEST_CASE("oscillator commutation relations") {
  for (std::size_t n : {8, 12, 16}) {
    for (const std::vector<int>& modes : {std::vector<int>{0}, std::vector<int>{0, 1}}) {
      const FockOscillator osc = FockOscillator::build(1.0, n, modes);
      CHECK(check_oscillator_ccr(osc).max() <= 1e-10);
    }
  }
  // The truncation breaks the relation on the top level.
  CHECK(check_oscillator_ccr(FockOscillator::build(1.0, 12, {0}), true).max() > 1.0);
  const FockOscillator osc = FockOscillator::build(2.0, 12, {3});
  const HMatrix q = osc.holomorphic_coordinate(0);
  // Q = (q + q^dag) / sqrt 2
  HMatrix sum = q + adjoint(q);
  sum *= 1.0 / std::sqrt(2.0);
  CHECK(max_abs_diff(sum, osc.position()[0]) <= 1e-14);
  CHECK(hermitian_residual(osc.position()[0]) == 0.0);
  CHECK(hermitian_residual(osc.momentum()[0]) <= 1e-15);
  CHECK(superselection_residual(osc.momentum()[0], osc.iota()) <= 1e-15);
}

TEST_CASE("assembled quaternionic coordinate") {
  const FockOscillator osc = FockOscillator::build(1.0, 8, {1, 3});
  const QOperator x = osc.assemble();
  const HMatrix expected = right_scale(osc.position()[0], kE1) + right_scale(osc.position()[1], kE3);
  CHECK(max_abs_diff(x.position, expected) == 0.0);
}

TEST_CASE("coherent-state expectations follow the classical orbit") {
  const double omega = 1.5;
  const FockOscillator osc = FockOscillator::build(omega, 30, {0});
  const std::complex<double> z(0.8, -0.4);
  const HVector psi = osc.coherent_state(std::span(&z, 1));
  CHECK(norm(psi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(osc.edge_occupation(psi) <= kEdgeTolerance);
  std::vector<double> times;
  const double period = 2.0 * std::numbers::pi / omega;
  for (int k = 0; k <= 64; ++k) times.push_back(2.0 * period * k / 64.0);
  const OscillatorTrace tr = evolve_expectations(osc, psi, times);
  CHECK(tr.ehrenfest_residual <= 1e-6);
  CHECK(tr.energy_drift <= 1e-9);
  CHECK(tr.norm_drift <= 1e-9);
  REQUIRE(tr.trace.observable_names == std::vector<std::string>{"Q0", "P0"});
  // Independent check: the orbit closes after one period.
  const auto& first = tr.trace.rows.front();
  const auto& middle = tr.trace.rows[32];
  CHECK(middle.expectations[0] == doctest::Approx(first.expectations[0]).epsilon(1e-9));
  CHECK(middle.expectations[1] == doctest::Approx(first.expectations[1]).epsilon(1e-9));
  // <Q>(0) = sqrt(2/omega) Re z for a coherent state.
  CHECK(first.expectations[0] == doctest::Approx(std::sqrt(2.0 / omega) * 0.8).epsilon(1e-9));
}

TEST_CASE("evolve_expectations rejects edge support and bad states") {
  const FockOscillator osc = FockOscillator::build(1.0, 8, {0});
  const std::vector<double> times{0.0, 1.0};
  const HVector top = HVector::unit(8, 7);
  CHECK(code_of([&] { (void)evolve_expectations(osc, top, times); }) == ErrorCode::EdgeSupport);
  CHECK(code_of([&] { (void)evolve_expectations(osc, osc.ground_state() * Quaternion(2.0), times); }) ==
        ErrorCode::ConfigInvalid);
  const OscillatorTrace g = evolve_expectations(osc, osc.ground_state(), times);
  CHECK(g.trace.rows[1].energy == doctest::Approx(0.5));
}
