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
#include <numbers>
#include <thread>
#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "qqm/error.hpp"
#include "qqm/measurement.hpp"

using namespace qqm;
using qqm::testing::for_all;
using qqm::testing::Gen;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NumericalFailure;
}

const BasisLabel kA("A", 2);
const BasisLabel kB("B", 2);

// (1/sqrt 2) [[1, e1], [e1, 1]]
TransformationTable half_table() {
  const double s = 1.0 / std::sqrt(2.0);
  return {kA, kB, HMatrix{{Quaternion(s), s * kE1}, {s * kE1, Quaternion(s)}}};
}

// Explicit dyad |a> q <b| for kets given as matrix columns.
HMatrix dyad(const HMatrix& out, std::size_t a, const Quaternion& q, const HMatrix& in, std::size_t b) {
  HMatrix d(out.rows(), in.rows());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < in.rows(); ++j) d(i, j) = out(i, a) * q * conj(in(j, b));
  return d;
}

}  // namespace

TEST_CASE("same-basis products follow the Kronecker delta") {
  const BasisLabel c("C", 4);
  CHECK(norm(mul_symbols(make_symbol(c, 0, c, 1), make_symbol(c, 2, c, 3)).weight) == 0.0);
  const MeasurementSymbol p = mul_symbols(make_symbol(c, 0, c, 1), make_symbol(c, 1, c, 3));
  CHECK(p.out_state == 0);
  CHECK(p.in_state == 3);
  CHECK(p.weight == kOne);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t a2 = 0; a2 < 4; ++a2) {
      const MeasurementSymbol m = mul_symbols(selective(c, a), selective(c, a2));
      CHECK(m.weight == (a == a2 ? kOne : Quaternion{}));
    }
  }
}

TEST_CASE("weights compose as out-weight, transformation function, in-weight") {
  const BasisLabel a("A", 1), b("B", 1), c("C", 1), d("D", 1);
  const TransformationTable bc(b, c, HMatrix{{kE3}});
  const MeasurementSymbol m = mul_symbols(make_symbol(a, 0, b, 0, kE1), make_symbol(c, 0, d, 0, kE2), bc);
  // e1 e3 = -e2 and (-e2) e2 = 1
  CHECK(kE1 * kE3 == -kE2);
  CHECK(m.weight == kOne);
  CHECK(m.out_basis == a);
  CHECK(m.in_basis == d);
  CHECK(code_of([&] { (void)mul_symbols(make_symbol(a, 0, c, 0), make_symbol(c, 0, d, 0), bc); }) ==
        ErrorCode::BasisMismatch);
  TableRegistry empty;
  CHECK(code_of([&] { (void)mul_symbols(make_symbol(a, 0, b, 0), make_symbol(c, 0, d, 0), empty); }) ==
        ErrorCode::MissingTable);
}

TEST_CASE("symbol sums: identity, zero, distributivity") {
  const BasisLabel c("C", 3);
  SymbolSum full;
  for (std::size_t a = 0; a < 3; ++a) full.add(selective(c, a));
  CHECK(max_weight_diff(full, SymbolSum::identity(c)) == 0.0);

  const SymbolSum ma(selective(c, 1));
  CHECK(max_weight_diff(sum_symbols(ma, SymbolSum::zero()), ma) == 0.0);

  TableRegistry reg;
  CHECK(max_weight_diff(mul_sums(SymbolSum::identity(c), ma, reg), ma) == 0.0);
  CHECK(max_weight_diff(mul_sums(ma, SymbolSum::identity(c), reg), ma) == 0.0);
  CHECK(mul_sums(ma, SymbolSum::zero(), reg).empty());

  const SymbolSum lhs = mul_sums(ma, full, reg);
  SymbolSum rhs;
  for (std::size_t a = 0; a < 3; ++a) rhs = sum_symbols(rhs, SymbolSum(mul_symbols(selective(c, 1), selective(c, a))));
  CHECK(max_weight_diff(lhs, rhs) == 0.0);

  // Merging equal indices cancels to the empty sum.
  SymbolSum cancel(make_symbol(c, 0, c, 1, kE2));
  cancel.add(make_symbol(c, 0, c, 1, -kE2));
  CHECK(cancel.empty());
  SymbolSum other(make_symbol(BasisLabel("D", 3), 0, c, 0));
  CHECK(code_of([&] { other.add(selective(c, 0)); }) == ErrorCode::BasisMismatch);
}

TEST_CASE("adjoint examples") {
  const MeasurementSymbol m = adjoint_symbol(make_symbol(kA, 0, kA, 1, kE2));
  CHECK(m.out_state == 1);
  CHECK(m.in_state == 0);
  CHECK(m.weight == -kE2);
  const MeasurementSymbol s = adjoint_symbol(selective(kA, 1));
  CHECK(s.out_state == 1);
  CHECK(s.in_state == 1);
  CHECK(s.weight == kOne);
  const MeasurementSymbol cross = adjoint_symbol(make_symbol(kA, 0, kB, 1));
  CHECK(cross.out_basis == kB);
  CHECK(cross.in_basis == kA);
}

TEST_CASE("compose_tables examples") {
  const TransformationTable t = half_table();
  CHECK(max_abs_diff(compose_tables(t, TransformationTable::identity(kB)).entries, t.entries) == 0.0);
  const TransformationTable round = compose_tables(t, t.reciprocal());
  CHECK(round.to_basis == kA);
  CHECK(round.from_basis == kA);
  CHECK(max_abs_diff(round.entries, HMatrix::identity(2)) <= 1e-15);
  CHECK(code_of([&] { (void)compose_tables(t, t); }) == ErrorCode::BasisMismatch);

  Gen g(31);
  const TransformationTable u = random_unitary_table(kA, kB, g.rng());
  CHECK(max_abs_diff(compose_tables(u, u.reciprocal()).entries, HMatrix::identity(2)) <= 1e-12);
}

TEST_CASE("transition probabilities") {
  const TransformationTable id = TransformationTable::identity(kA);
  CHECK(transition_probability(id, 0, 0) == 1.0);
  CHECK(transition_probability(id, 0, 1) == 0.0);
  const TransformationTable t = half_table();
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) CHECK(transition_probability(t, a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(code_of([&] { (void)transition_probability(t, 2, 0); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("gauge transform examples") {
  const TransformationTable t = half_table();
  CHECK(max_abs_diff(gauge_transform(t, GaugePhase::trivial(kA), GaugePhase::trivial(kB)).entries, t.entries) == 0.0);

  const UnitQuaternion lam(exp_polar(1.0, UnitQuaternion(kE2), std::numbers::pi / 4));
  const GaugePhase to(kA, {lam, UnitQuaternion(kOne)});
  const GaugePhase from(kB, {UnitQuaternion(kOne), lam});
  const TransformationTable moved = gauge_transform(t, to, from);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      // Recompute |lambda_a <a|b> lambda_b^-1|^2 directly.
      const Quaternion e = to.lambdas[a].value() * t.at(a, b) * inverse(from.lambdas[b].value());
      CHECK(norm2(e) == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(transition_probability(moved, a, b) == doctest::Approx(0.5).epsilon(1e-14));
    }
  }
  const TransformationTable back = gauge_transform(moved, to.inverse(), from.inverse());
  CHECK(max_abs_diff(back.entries, t.entries) <= 1e-12);
  CHECK(code_of([&] { (void)gauge_transform(t, from, to); }) == ErrorCode::BasisMismatch);
}

TEST_CASE("gauge transform of symbols") {
  const MeasurementSymbol m = make_symbol(kA, 0, kB, 1, kE3);
  const MeasurementSymbol same = gauge_transform_symbol(m, GaugePhase::trivial(kA), GaugePhase::trivial(kB));
  CHECK(same.weight == m.weight);

  Gen g(32);
  const GaugePhase pa = random_phase(kA, g.rng()), pb = random_phase(kB, g.rng());
  const TransformationTable t = random_unitary_table(kA, kB, g.rng());
  // Sandwich recomputed after the gauge map keeps its value.
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const Quaternion before = sandwich(b, a, t);
      const Quaternion after = sandwich(b, a, gauge_transform(t, pa, pb));
      CHECK(max_abs_diff(before, after) <= 1e-12);
    }
  }
  // Unweighted symbol goes to M(lambda_a^-1 lambda_b).
  const MeasurementSymbol u = gauge_transform_symbol(make_symbol(kA, 1, kB, 0), pa, pb);
  CHECK(max_abs_diff(u.weight, inverse(pa.lambdas[1].value()) * pb.lambdas[0].value()) <= 1e-15);
  // Adjoint compatibility with swapped phases.
  const MeasurementSymbol lhs = adjoint_symbol(gauge_transform_symbol(m, pa, pb));
  const MeasurementSymbol rhs = gauge_transform_symbol(adjoint_symbol(m), pb, pa);
  CHECK(max_abs_diff(lhs.weight, rhs.weight) <= 1e-15);
}

TEST_CASE("sandwich examples") {
  CHECK(sandwich(0, 0, TransformationTable::identity(kA)) == kOne);
  const TransformationTable t = half_table();
  const Quaternion s = sandwich(1, 0, t);
  CHECK(s.w == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(imag_norm(s) <= 1e-16);
}

TEST_CASE("trace functionals") {
  const BasisLabel a("A", 1), b("B", 1);
  TableRegistry reg;
  reg.register_pair({b, a, HMatrix{{kE2}}});
  const MeasurementSymbol m = make_symbol(a, 0, b, 0, kE1);
  CHECK(trace(m, TraceKind::Left, reg) == kE3);
  CHECK(trace(m, TraceKind::Right, reg) == -kE3);
  CHECK(trace(selective(kA, 1), TraceKind::Left, reg) == kOne);
  const MeasurementSymbol unit = make_symbol(a, 0, b, 0);
  CHECK(trace(unit, TraceKind::Central, reg, a) == trace(unit, TraceKind::Right, reg));
  CHECK(code_of([&] { (void)trace(make_symbol(a, 0, BasisLabel("Z", 1), 0), TraceKind::Left, reg); }) ==
        ErrorCode::MissingTable);
}

TEST_CASE("degree constraint diagnostic") {
  const DegreeConstraint id = check_degree_constraint(TransformationTable::identity(BasisLabel("C", 3)));
  CHECK(id.lhs == Quaternion(3.0));
  CHECK(id.rhs == Quaternion(3.0));
  CHECK(id.holds);
  const DegreeConstraint h = check_degree_constraint(half_table());
  CHECK(max_abs_diff(h.lhs, Quaternion(2.0)) <= 1e-15);
  CHECK(max_abs_diff(h.rhs, Quaternion(2.0)) <= 1e-15);
  // A raw pair without the conjugate relation can break the balance.
  const BasisLabel c("C", 1), d("D", 1);
  const DegreeConstraint raw =
      check_degree_constraint({c, d, HMatrix{{kE1}}}, {d, c, HMatrix{{kE2}}});
  CHECK(max_abs_diff(raw.lhs, kE3) == 0.0);
  CHECK(max_abs_diff(raw.rhs, -kE3) == 0.0);
  CHECK_FALSE(raw.holds);
}

TEST_CASE("registry: reciprocal pairs, freezing, concurrent reads") {
  const BasisLabel c("C", 3), d("D", 3);
  TableRegistry reg;
  Gen g(33);
  const TransformationTable t = random_unitary_table(c, d, g.rng());
  reg.register_pair(t);
  CHECK(max_abs_diff(reg.table(d, c)->entries, adjoint(t.entries)) == 0.0);
  CHECK(code_of([&] { reg.register_pair(t); }) == ErrorCode::RegistryFrozen);
  CHECK(code_of([&] { reg.register_pair(TransformationTable::identity(c)); }) == ErrorCode::BasisMismatch);

  std::vector<std::thread> readers;
  std::vector<double> seen(8, -1.0);
  for (std::size_t k = 0; k < seen.size(); ++k) {
    readers.emplace_back([&, k] {
      double worst = 0.0;
      for (int r = 0; r < 200; ++r) worst = std::max(worst, max_abs_diff(reg.table(c, d)->entries, t.entries));
      seen[k] = worst;
    });
  }
  for (auto& th : readers) th.join();
  for (double s : seen) CHECK(s == 0.0);
}

TEST_CASE("property: symbol products agree with explicit dyads") {
  for_all(100, 34, [](Gen& g, std::size_t) {
    const std::size_t n = g.dim(2, 5);
    const BasisLabel a("A", n), b("B", n), c("C", n), d("D", n);
    std::vector<HMatrix> kets;
    for (int k = 0; k < 4; ++k) kets.push_back(expm_antihermitian(g.antihermitian(n)));
    TableRegistry reg;
    reg.register_pair({b, c, adjoint(kets[1]) * kets[2]});
    reg.register_pair({c, d, adjoint(kets[2]) * kets[3]});

    const MeasurementSymbol m1 = make_symbol(a, g.index(n), b, g.index(n), g.quaternion());
    const MeasurementSymbol m2 = make_symbol(c, g.index(n), d, g.index(n), g.quaternion());
    const MeasurementSymbol p = mul_symbols(m1, m2, reg);
    const HMatrix lhs = dyad(kets[0], p.out_state, p.weight, kets[3], p.in_state);
    const HMatrix rhs = dyad(kets[0], m1.out_state, m1.weight, kets[1], m1.in_state) *
                        dyad(kets[2], m2.out_state, m2.weight, kets[3], m2.in_state);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12);

    // Associativity across C -> D with a third symbol.
    const MeasurementSymbol m3 = make_symbol(d, g.index(n), a, g.index(n), g.quaternion());
    const MeasurementSymbol x = mul_symbols(mul_symbols(m1, m2, reg), m3, reg);
    const MeasurementSymbol y = mul_symbols(m1, mul_symbols(m2, m3, reg), reg);
    CHECK(max_abs_diff(x.weight, y.weight) <= 1e-12);

    // Adjoint reverses products.
    const MeasurementSymbol adj = adjoint_symbol(p);
    const MeasurementSymbol rev = mul_symbols(adjoint_symbol(m2), adjoint_symbol(m1), reg);
    CHECK(adj.out_state == rev.out_state);
    CHECK(adj.in_state == rev.in_state);
    CHECK(max_abs_diff(adj.weight, rev.weight) <= 1e-12);

    // (lambda Y)^dagger = Y^dagger conj(lambda)
    const Quaternion lam = g.quaternion();
    CHECK(max_abs_diff(adjoint_symbol(scale_left(lam, m1)).weight, adjoint_symbol(m1).weight * conj(lam)) <= 1e-12);
  });
}

TEST_CASE("property: probability axioms and gauge invariance") {
  double gauge = 0.0, neg = 0.0, sym = 0.0, normal = 0.0, imag = 0.0;
  for_all(1000, 35, [&](Gen& g, std::size_t) {
    const std::size_t n = g.dim(2, 4);
    const BasisLabel a("A", n), b("B", n);
    const TransformationTable t = random_unitary_table(a, b, g.rng());
    const TransformationTable r = t.reciprocal();
    const TransformationTable moved = gauge_transform(t, random_phase(a, g.rng()), random_phase(b, g.rng()));
    for (std::size_t y = 0; y < n; ++y) {
      double column = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        const double p = transition_probability(t, x, y);
        // Independent recomputation from the components.
        const Quaternion& e = t.at(x, y);
        const double direct = e.w * e.w + e.x * e.x + e.y * e.y + e.z * e.z;
        gauge = std::max(gauge, std::fabs(transition_probability(moved, x, y) - direct));
        neg = std::max(neg, -p);
        sym = std::max(sym, std::fabs(p - transition_probability(r, y, x)));
        const Quaternion s = sandwich(y, x, t);
        imag = std::max({imag, imag_norm(s), std::fabs(s.w - direct)});
        column += p;
      }
      normal = std::max(normal, std::fabs(column - 1.0));
    }
  });
  CHECK(gauge <= 1e-12);
  CHECK(neg <= 0.0);
  CHECK(sym <= 1e-12);
  CHECK(normal <= 1e-10);
  CHECK(imag <= 1e-12);
}

TEST_CASE("property: conjugate reciprocal tables satisfy the degree constraint") {
  for_all(1000, 36, [](Gen& g, std::size_t) {
    const std::size_t n = g.dim(1, 5);
    const BasisLabel a("A", n), b("B", n);
    HMatrix raw(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) raw(i, j) = g.quaternion();
    const DegreeConstraint dc = check_degree_constraint({a, b, raw});
    CHECK(dc.holds);
    CHECK(imag_norm(dc.lhs) <= 1e-12);
    CHECK(std::fabs(dc.lhs.w - dc.rhs.w) <= 1e-10 * std::max(1.0, dc.lhs.w));
  });
}
