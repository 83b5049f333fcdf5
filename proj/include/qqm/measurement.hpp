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
 * @file measurement.hpp
 * @brief Measurement symbols over the quaternions.
 *
 * A weighted symbol M_a^b(q) = |a> q <b| accepts state b of one complete set
 * and emits state a of another. Products follow
 *
 *   M_a^b(q1) M_c^d(q2) = M_a^d(q1 <b|c> q2)
 *
 * with the weights kept in that exact order. Transformation functions <a|b>
 * live in TransformationTable; tables are registered in reciprocal pairs
 * with <b|a> = conj(<a|b>).
 */

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "qqm/hspace.hpp"
#include "qqm/quat.hpp"

namespace qqm {

/// A complete set of compatible observables with `size` joint eigenstates.
struct BasisLabel {
  std::string id;
  std::size_t size = 1;

  BasisLabel() = default;
  BasisLabel(std::string id_, std::size_t size_);

  bool operator==(const BasisLabel&) const = default;
  auto operator<=>(const BasisLabel&) const = default;
};

struct MeasurementSymbol {
  BasisLabel out_basis;
  std::size_t out_state = 0;
  BasisLabel in_basis;
  std::size_t in_state = 0;
  Quaternion weight = kOne;
};

/// M_a^b(q); validates both indices.
MeasurementSymbol make_symbol(const BasisLabel& out_basis, std::size_t a, const BasisLabel& in_basis,
                              std::size_t b, const Quaternion& weight = kOne);

/// The elementary selective measurement M_a = M_a^a.
MeasurementSymbol selective(const BasisLabel& basis, std::size_t a);

inline constexpr double kCanonicalZero = 1e-14;

/// Sum of symbols that share (out_basis, in_basis). Terms with equal state
/// pairs are merged by adding weights; weights with |q| <= 1e-14 are dropped.
/// The empty sum is the zero symbol and is compatible with every basis pair.
class SymbolSum {
 public:
  SymbolSum() = default;
  explicit SymbolSum(const MeasurementSymbol& m);

  static SymbolSum zero() { return {}; }
  /// sum_a M_a over the whole basis.
  static SymbolSum identity(const BasisLabel& basis);

  void add(const MeasurementSymbol& m);

  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::optional<BasisLabel>& out_basis() const noexcept { return out_; }
  const std::optional<BasisLabel>& in_basis() const noexcept { return in_; }

  /// Weight of M_a^b in the sum (zero when absent).
  Quaternion weight(std::size_t a, std::size_t b) const;
  std::vector<MeasurementSymbol> terms() const;

 private:
  std::optional<BasisLabel> out_;
  std::optional<BasisLabel> in_;
  std::map<std::pair<std::size_t, std::size_t>, Quaternion> terms_;
};

/// Largest weight difference over the union of terms. Infinity when the
/// sums live on different basis pairs.
double max_weight_diff(const SymbolSum& a, const SymbolSum& b);

/// Table of <a|b> for a in `to_basis` (rows) and b in `from_basis` (columns).
struct TransformationTable {
  BasisLabel to_basis;
  BasisLabel from_basis;
  HMatrix entries;

  TransformationTable() = default;
  TransformationTable(BasisLabel to, BasisLabel from, HMatrix values);

  static TransformationTable identity(const BasisLabel& basis);

  const Quaternion& at(std::size_t a, std::size_t b) const { return entries(a, b); }

  /// Table of <b|a> = conj(<a|b>).
  TransformationTable reciprocal() const;
};

/// Unit quaternions lambda_a, one per state of `basis`.
struct GaugePhase {
  BasisLabel basis;
  std::vector<UnitQuaternion> lambdas;

  GaugePhase() = default;
  GaugePhase(BasisLabel b, std::vector<UnitQuaternion> l);

  static GaugePhase trivial(const BasisLabel& basis);
  GaugePhase inverse() const;
};

/// Registry of transformation tables keyed by (to_basis, from_basis).
///
/// Reads may run concurrently. Registering a key that has already been read
/// throws RegistryFrozen. Same-basis lookups return the identity table.
class TableRegistry {
 public:
  /// Stores T and its conjugate reciprocal.
  void register_pair(const TransformationTable& forward);
  /// Stores both directions as given, without the conjugate constraint.
  void register_raw(const TransformationTable& forward, const TransformationTable& backward);

  /// Throws MissingTable when no table connects the bases.
  std::shared_ptr<const TransformationTable> table(const BasisLabel& to, const BasisLabel& from) const;
  bool contains(const BasisLabel& to, const BasisLabel& from) const;
  bool is_raw(const BasisLabel& to, const BasisLabel& from) const;

 private:
  using Key = std::pair<std::string, std::string>;
  struct Entry {
    std::shared_ptr<const TransformationTable> table;
    bool raw = false;
  };

  void insert_locked(const TransformationTable& t, bool raw);

  mutable std::shared_mutex mutex_;
  std::map<Key, Entry> entries_;
  mutable std::mutex read_mutex_;
  mutable std::set<Key> read_keys_;
};

/// M1 M2 with <b|c> taken from `table`, which must map M1.in_basis (rows)
/// to M2.out_basis (columns). Throws BasisMismatch.
MeasurementSymbol mul_symbols(const MeasurementSymbol& m1, const MeasurementSymbol& m2,
                              const TransformationTable& table);
/// Same-basis product, <b|c> = delta. Throws BasisMismatch otherwise.
MeasurementSymbol mul_symbols(const MeasurementSymbol& m1, const MeasurementSymbol& m2);
MeasurementSymbol mul_symbols(const MeasurementSymbol& m1, const MeasurementSymbol& m2,
                              const TableRegistry& registry);

SymbolSum sum_symbols(const SymbolSum& s1, const SymbolSum& s2);
/// Distributes the product over both sums.
SymbolSum mul_sums(const SymbolSum& s1, const SymbolSum& s2, const TableRegistry& registry);

/// (|a> q <b|)^dagger = |b> conj(q) <a|.
MeasurementSymbol adjoint_symbol(const MeasurementSymbol& m);
SymbolSum adjoint(const SymbolSum& s);
/// lambda M_a^b(q) = M_a^b(lambda q).
MeasurementSymbol scale_left(const Quaternion& lambda, const MeasurementSymbol& m);

/// sum_b <a|b><b|c>. Throws BasisMismatch unless ab.from_basis == bc.to_basis.
TransformationTable compose_tables(const TransformationTable& ab, const TransformationTable& bc);

/// p(a|b) = <b|a><a|b> with <b|a> = conj(<a|b>).
double transition_probability(const TransformationTable& t, std::size_t a, std::size_t b);

/// <a|b> -> lambda_a <a|b> lambda_b^-1.
TransformationTable gauge_transform(const TransformationTable& t, const GaugePhase& to_phase,
                                    const GaugePhase& from_phase);

/// M_a^b(q) -> M_a^b(lambda_a^-1 q lambda_b). Products of transformed symbols
/// under the old tables equal the transform of products under the
/// gauge-transformed tables.
MeasurementSymbol gauge_transform_symbol(const MeasurementSymbol& m, const GaugePhase& out_phase,
                                         const GaugePhase& in_phase);

/// Weight of M_b M_a M_b, computed as two symbol products. b indexes the
/// table's from_basis and a its to_basis.
Quaternion sandwich(std::size_t b, std::size_t a, const TransformationTable& t);

enum class TraceKind { Left, Right, Central };

/// Tr_L = q<b|a>, Tr_R = <b|a>q, Tr_C = sum_e <e|a> q <b|e>. Throws
/// MissingTable, or ConfigInvalid when a central trace has no central basis.
Quaternion trace(const MeasurementSymbol& m, TraceKind kind, const TableRegistry& registry,
                 const std::optional<BasisLabel>& central_basis = std::nullopt);

struct DegreeConstraint {
  Quaternion lhs;  // sum_a sum_b <a|b><b|a>
  Quaternion rhs;  // sum_b sum_a <b|a><a|b>
  bool holds = false;
};

/// Diagnostic for the degree-of-freedom balance; `holds` uses 1e-10.
DegreeConstraint check_degree_constraint(const TransformationTable& forward,
                                         const TransformationTable& backward);
inline DegreeConstraint check_degree_constraint(const TransformationTable& t) {
  return check_degree_constraint(t, t.reciprocal());
}

/// exp of a random anti-Hermitian matrix; requires equal basis sizes.
TransformationTable random_unitary_table(const BasisLabel& to, const BasisLabel& from, Rng& rng);
GaugePhase random_phase(const BasisLabel& basis, Rng& rng);

}  // namespace qqm
