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

#include "qqm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qqm/error.hpp"

namespace qqm {

namespace {

void require_index(const BasisLabel& basis, std::size_t index) {
  if (index >= basis.size) {
    throw Error(ErrorCode::IndexOutOfRange,
                "state " + std::to_string(index) + " outside basis " + basis.id + " of size " +
                    std::to_string(basis.size));
  }
}

void require_basis(const BasisLabel& got, const BasisLabel& want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::BasisMismatch, std::string(what) + ": " + got.id + "(" + std::to_string(got.size) +
                                              ") vs " + want.id + "(" + std::to_string(want.size) + ")");
  }
}

}  // namespace

BasisLabel::BasisLabel(std::string id_, std::size_t size_) : id(std::move(id_)), size(size_) {
  if (size == 0) throw Error(ErrorCode::IndexOutOfRange, "basis " + id + " must have at least one state");
}

MeasurementSymbol make_symbol(const BasisLabel& out_basis, std::size_t a, const BasisLabel& in_basis,
                              std::size_t b, const Quaternion& weight) {
  require_index(out_basis, a);
  require_index(in_basis, b);
  return {out_basis, a, in_basis, b, weight};
}

MeasurementSymbol selective(const BasisLabel& basis, std::size_t a) { return make_symbol(basis, a, basis, a); }

// ---------------------------------------------------------------------------
// SymbolSum

SymbolSum::SymbolSum(const MeasurementSymbol& m) { add(m); }

SymbolSum SymbolSum::identity(const BasisLabel& basis) {
  SymbolSum s;
  for (std::size_t a = 0; a < basis.size; ++a) s.add(selective(basis, a));
  return s;
}

void SymbolSum::add(const MeasurementSymbol& m) {
  if (out_) {
    require_basis(m.out_basis, *out_, "SymbolSum out basis");
    require_basis(m.in_basis, *in_, "SymbolSum in basis");
  } else {
    out_ = m.out_basis;
    in_ = m.in_basis;
  }
  const auto key = std::make_pair(m.out_state, m.in_state);
  auto [it, inserted] = terms_.try_emplace(key, m.weight);
  if (!inserted) it->second += m.weight;
  if (norm(it->second) <= kCanonicalZero) terms_.erase(it);
  if (terms_.empty()) {
    out_.reset();
    in_.reset();
  }
}

Quaternion SymbolSum::weight(std::size_t a, std::size_t b) const {
  const auto it = terms_.find({a, b});
  return it == terms_.end() ? Quaternion{} : it->second;
}

std::vector<MeasurementSymbol> SymbolSum::terms() const {
  std::vector<MeasurementSymbol> out;
  out.reserve(terms_.size());
  for (const auto& [key, q] : terms_) out.push_back({*out_, key.first, *in_, key.second, q});
  return out;
}

double max_weight_diff(const SymbolSum& a, const SymbolSum& b) {
  if (!a.empty() && !b.empty() && (a.out_basis() != b.out_basis() || a.in_basis() != b.in_basis())) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (const auto& t : a.terms()) worst = std::max(worst, norm(t.weight - b.weight(t.out_state, t.in_state)));
  for (const auto& t : b.terms()) worst = std::max(worst, norm(t.weight - a.weight(t.out_state, t.in_state)));
  return worst;
}

// ---------------------------------------------------------------------------
// Tables and phases

TransformationTable::TransformationTable(BasisLabel to, BasisLabel from, HMatrix values)
    : to_basis(std::move(to)), from_basis(std::move(from)), entries(std::move(values)) {
  if (entries.rows() != to_basis.size || entries.cols() != from_basis.size) {
    throw Error(ErrorCode::DimensionMismatch, "table entries do not match basis sizes");
  }
}

TransformationTable TransformationTable::identity(const BasisLabel& basis) {
  return {basis, basis, HMatrix::identity(basis.size)};
}

TransformationTable TransformationTable::reciprocal() const {
  return {from_basis, to_basis, adjoint(entries)};
}

GaugePhase::GaugePhase(BasisLabel b, std::vector<UnitQuaternion> l) : basis(std::move(b)), lambdas(std::move(l)) {
  if (lambdas.size() != basis.size) {
    throw Error(ErrorCode::BasisMismatch, "gauge phase count does not match basis " + basis.id);
  }
}

GaugePhase GaugePhase::trivial(const BasisLabel& basis) {
  return {basis, std::vector<UnitQuaternion>(basis.size, UnitQuaternion(kOne))};
}

GaugePhase GaugePhase::inverse() const {
  std::vector<UnitQuaternion> inv;
  inv.reserve(lambdas.size());
  for (const auto& l : lambdas) inv.push_back(l.inverse());
  return {basis, std::move(inv)};
}

// ---------------------------------------------------------------------------
// Registry

void TableRegistry::insert_locked(const TransformationTable& t, bool raw) {
  const Key key{t.to_basis.id, t.from_basis.id};
  {
    std::lock_guard read_lock(read_mutex_);
    if (read_keys_.contains(key)) {
      throw Error(ErrorCode::RegistryFrozen, "table " + key.first + "<-" + key.second + " was already read");
    }
  }
  entries_[key] = Entry{std::make_shared<const TransformationTable>(t), raw};
}

void TableRegistry::register_pair(const TransformationTable& forward) {
  if (forward.to_basis.id == forward.from_basis.id) {
    throw Error(ErrorCode::BasisMismatch, "same-basis tables are fixed to the identity");
  }
  std::unique_lock lock(mutex_);
  insert_locked(forward, false);
  insert_locked(forward.reciprocal(), false);
}

void TableRegistry::register_raw(const TransformationTable& forward, const TransformationTable& backward) {
  require_basis(backward.to_basis, forward.from_basis, "raw reciprocal to_basis");
  require_basis(backward.from_basis, forward.to_basis, "raw reciprocal from_basis");
  std::unique_lock lock(mutex_);
  insert_locked(forward, true);
  insert_locked(backward, true);
}

std::shared_ptr<const TransformationTable> TableRegistry::table(const BasisLabel& to, const BasisLabel& from) const {
  if (to == from) return std::make_shared<const TransformationTable>(TransformationTable::identity(to));
  const Key key{to.id, from.id};
  {
    std::lock_guard read_lock(read_mutex_);
    read_keys_.insert(key);
  }
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw Error(ErrorCode::MissingTable, "no table " + to.id + "<-" + from.id);
  require_basis(it->second.table->to_basis, to, "registered table to_basis");
  require_basis(it->second.table->from_basis, from, "registered table from_basis");
  return it->second.table;
}

bool TableRegistry::contains(const BasisLabel& to, const BasisLabel& from) const {
  if (to == from) return true;
  std::shared_lock lock(mutex_);
  return entries_.contains({to.id, from.id});
}

bool TableRegistry::is_raw(const BasisLabel& to, const BasisLabel& from) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find({to.id, from.id});
  return it != entries_.end() && it->second.raw;
}

// ---------------------------------------------------------------------------
// Symbol arithmetic

MeasurementSymbol mul_symbols(const MeasurementSymbol& m1, const MeasurementSymbol& m2,
                              const TransformationTable& table) {
  require_basis(table.to_basis, m1.in_basis, "product table rows");
  require_basis(table.from_basis, m2.out_basis, "product table columns");
  const Quaternion w = m1.weight * table.at(m1.in_state, m2.out_state) * m2.weight;
  return {m1.out_basis, m1.out_state, m2.in_basis, m2.in_state, w};
}

MeasurementSymbol mul_symbols(const MeasurementSymbol& m1, const MeasurementSymbol& m2) {
  require_basis(m2.out_basis, m1.in_basis, "same-basis product");
  const Quaternion w = m1.in_state == m2.out_state ? m1.weight * m2.weight : Quaternion{};
  return {m1.out_basis, m1.out_state, m2.in_basis, m2.in_state, w};
}

MeasurementSymbol mul_symbols(const MeasurementSymbol& m1, const MeasurementSymbol& m2,
                              const TableRegistry& registry) {
  if (m1.in_basis == m2.out_basis) return mul_symbols(m1, m2);
  return mul_symbols(m1, m2, *registry.table(m1.in_basis, m2.out_basis));
}

SymbolSum sum_symbols(const SymbolSum& s1, const SymbolSum& s2) {
  SymbolSum out = s1;
  for (const auto& t : s2.terms()) out.add(t);
  return out;
}

SymbolSum mul_sums(const SymbolSum& s1, const SymbolSum& s2, const TableRegistry& registry) {
  SymbolSum out;
  if (s1.empty() || s2.empty()) return out;
  std::shared_ptr<const TransformationTable> table;
  if (*s1.in_basis() != *s2.out_basis()) table = registry.table(*s1.in_basis(), *s2.out_basis());
  for (const auto& a : s1.terms()) {
    for (const auto& b : s2.terms()) out.add(table ? mul_symbols(a, b, *table) : mul_symbols(a, b));
  }
  return out;
}

MeasurementSymbol adjoint_symbol(const MeasurementSymbol& m) {
  return {m.in_basis, m.in_state, m.out_basis, m.out_state, conj(m.weight)};
}

SymbolSum adjoint(const SymbolSum& s) {
  SymbolSum out;
  for (const auto& t : s.terms()) out.add(adjoint_symbol(t));
  return out;
}

MeasurementSymbol scale_left(const Quaternion& lambda, const MeasurementSymbol& m) {
  MeasurementSymbol out = m;
  out.weight = lambda * m.weight;
  return out;
}

TransformationTable compose_tables(const TransformationTable& ab, const TransformationTable& bc) {
  require_basis(ab.from_basis, bc.to_basis, "compose_tables");
  return {ab.to_basis, bc.from_basis, matmul(ab.entries, bc.entries)};
}

double transition_probability(const TransformationTable& t, std::size_t a, std::size_t b) {
  require_index(t.to_basis, a);
  require_index(t.from_basis, b);
  const Quaternion& ab = t.at(a, b);
  return (conj(ab) * ab).w;
}

TransformationTable gauge_transform(const TransformationTable& t, const GaugePhase& to_phase,
                                    const GaugePhase& from_phase) {
  require_basis(to_phase.basis, t.to_basis, "gauge phase (to)");
  require_basis(from_phase.basis, t.from_basis, "gauge phase (from)");
  HMatrix out(t.entries.rows(), t.entries.cols());
  for (std::size_t a = 0; a < out.rows(); ++a) {
    for (std::size_t b = 0; b < out.cols(); ++b) {
      out(a, b) = to_phase.lambdas[a].value() * t.at(a, b) * from_phase.lambdas[b].inverse().value();
    }
  }
  return {t.to_basis, t.from_basis, std::move(out)};
}

MeasurementSymbol gauge_transform_symbol(const MeasurementSymbol& m, const GaugePhase& out_phase,
                                         const GaugePhase& in_phase) {
  require_basis(out_phase.basis, m.out_basis, "gauge phase (out)");
  require_basis(in_phase.basis, m.in_basis, "gauge phase (in)");
  MeasurementSymbol out = m;
  out.weight = out_phase.lambdas[m.out_state].inverse().value() * m.weight * in_phase.lambdas[m.in_state].value();
  return out;
}

Quaternion sandwich(std::size_t b, std::size_t a, const TransformationTable& t) {
  const MeasurementSymbol mb = selective(t.from_basis, b);
  const MeasurementSymbol ma = selective(t.to_basis, a);
  if (t.to_basis == t.from_basis) return mul_symbols(mul_symbols(mb, ma), mb).weight;
  const MeasurementSymbol left = mul_symbols(mb, ma, t.reciprocal());
  return mul_symbols(left, mb, t).weight;
}

Quaternion trace(const MeasurementSymbol& m, TraceKind kind, const TableRegistry& registry,
                 const std::optional<BasisLabel>& central_basis) {
  switch (kind) {
    case TraceKind::Left: {
      const auto t = registry.table(m.in_basis, m.out_basis);
      return m.weight * t->at(m.in_state, m.out_state);
    }
    case TraceKind::Right: {
      const auto t = registry.table(m.in_basis, m.out_basis);
      return t->at(m.in_state, m.out_state) * m.weight;
    }
    case TraceKind::Central: {
      if (!central_basis) throw Error(ErrorCode::ConfigInvalid, "central trace needs a central basis");
      const auto ea = registry.table(*central_basis, m.out_basis);
      const auto be = registry.table(m.in_basis, *central_basis);
      Quaternion acc;
      for (std::size_t e = 0; e < central_basis->size; ++e) {
        acc += ea->at(e, m.out_state) * m.weight * be->at(m.in_state, e);
      }
      return acc;
    }
  }
  return {};
}

DegreeConstraint check_degree_constraint(const TransformationTable& forward, const TransformationTable& backward) {
  require_basis(backward.to_basis, forward.from_basis, "degree constraint reciprocal");
  require_basis(backward.from_basis, forward.to_basis, "degree constraint reciprocal");
  DegreeConstraint out;
  for (std::size_t a = 0; a < forward.to_basis.size; ++a) {
    for (std::size_t b = 0; b < forward.from_basis.size; ++b) {
      out.lhs += forward.at(a, b) * backward.at(b, a);
    }
  }
  for (std::size_t b = 0; b < forward.from_basis.size; ++b) {
    for (std::size_t a = 0; a < forward.to_basis.size; ++a) {
      out.rhs += backward.at(b, a) * forward.at(a, b);
    }
  }
  out.holds = max_abs_diff(out.lhs, out.rhs) <= 1e-10;
  return out;
}

TransformationTable random_unitary_table(const BasisLabel& to, const BasisLabel& from, Rng& rng) {
  if (to.size != from.size) throw Error(ErrorCode::DimensionMismatch, "unitary tables need equal basis sizes");
  return {to, from, expm_antihermitian(random_antihermitian(to.size, rng))};
}

GaugePhase random_phase(const BasisLabel& basis, Rng& rng) {
  std::vector<UnitQuaternion> lambdas;
  lambdas.reserve(basis.size);
  for (std::size_t a = 0; a < basis.size; ++a) lambdas.push_back(UnitQuaternion(random_quaternion(rng, true)));
  return {basis, std::move(lambdas)};
}

}  // namespace qqm
