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

#include "qqm/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <numbers>
#include <set>
#include <unsupported/Eigen/MatrixFunctions>

#include "qqm/dynamics.hpp"
#include "qqm/error.hpp"
#include "qqm/hspace.hpp"
#include "qqm/measurement.hpp"
#include "qqm/oscillator.hpp"
#include "qqm/serialization.hpp"

namespace qqm {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kNames[] = {
    {ExperimentKind::AlgebraLaws, "algebra_laws"},
    {ExperimentKind::MeasurementInvariants, "measurement_invariants"},
    {ExperimentKind::GaugeSweep, "gauge_sweep"},
    {ExperimentKind::DegreeConstraint, "degree_constraint"},
    {ExperimentKind::Evolution, "evolution"},
    {ExperimentKind::Oscillator, "oscillator"},
    {ExperimentKind::GridMomentum, "grid_momentum"},
};

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, path + ": " + what);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t positive_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) invalid(path, "expected a positive integer");
  return v.get<std::size_t>();
}

double finite_number(const json& v, const std::string& path) {
  if (!v.is_number()) invalid(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(path, "expected a finite number");
  return d;
}

// Collects check records; tolerances may be overridden by name from the config.
class Recorder {
 public:
  explicit Recorder(const ExperimentConfig& c) : config_(c) {}

  void at_most(const std::string& name, double deviation, double tolerance, std::string note = "") {
    CheckRecord r{name, deviation, resolve(name, tolerance), Comparison::AtMost, false, false, std::move(note)};
    r.pass = r.max_deviation <= r.tolerance;
    records_.push_back(std::move(r));
  }

  void exceeds(const std::string& name, double value, double threshold, std::string note = "") {
    CheckRecord r{name, value, resolve(name, threshold), Comparison::Exceeds, false, false, std::move(note)};
    r.pass = r.max_deviation > r.tolerance;
    records_.push_back(std::move(r));
  }

  void diagnostic(const std::string& name, double value, std::string note = "") {
    records_.push_back({name, value, 0.0, Comparison::AtMost, true, true, std::move(note)});
  }

  void artifact(std::string file) { artifacts_.push_back(std::move(file)); }

  std::vector<CheckRecord> take_records() { return std::move(records_); }
  std::vector<std::string> take_artifacts() { return std::move(artifacts_); }

 private:
  double resolve(const std::string& name, double fallback) const {
    const auto it = config_.tolerances.find(name);
    return it == config_.tolerances.end() ? fallback : it->second;
  }

  const ExperimentConfig& config_;
  std::vector<CheckRecord> records_;
  std::vector<std::string> artifacts_;
};

Rng stream(const ExperimentConfig& c, std::uint64_t k) { return Rng(derive_seed(c.seed, k)); }

std::vector<std::size_t> dims_or(const ExperimentConfig& c, std::vector<std::size_t> fallback) {
  return c.dims.empty() ? fallback : c.dims;
}

std::size_t trials_or(const ExperimentConfig& c, std::size_t fallback) { return c.trials ? c.trials : fallback; }

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

std::filesystem::path artifact_path(const ExperimentConfig& c, const std::string& file) {
  return std::filesystem::path(c.output_dir) / file;
}

HMatrix random_unitary(std::size_t n, Rng& rng) { return expm_antihermitian(random_antihermitian(n, rng)); }

// ---------------------------------------------------------------- algebra_laws

void algebra_laws(const ExperimentConfig& c, Recorder& rec) {
  const std::size_t trials = trials_or(c, 1000);
  const auto dims = dims_or(c, {2, 3, 4, 5});

  {
    Rng rng = stream(c, 1);
    double assoc = 0.0, normmul = 0.0, anti = 0.0, polar_dev = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Quaternion p = random_quaternion(rng, false);
      const Quaternion q = random_quaternion(rng, false);
      const Quaternion r = random_quaternion(rng, false);
      assoc = std::max(assoc, max_abs_diff((p * q) * r, p * (q * r)));
      normmul = std::max(normmul, std::fabs(norm(p * q) - norm(p) * norm(q)) / (norm(p) * norm(q)));
      anti = std::max(anti, max_abs_diff(conj(p * q), conj(q) * conj(p)));
      if (imag_norm(p) > 1e-6) polar_dev = std::max(polar_dev, max_abs_diff(reconstruct(polar(p)), p));
    }
    double basis_assoc = 0.0;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        for (int k = 0; k < 8; ++k) {
          const Quaternion p = (i < 4 ? 1.0 : -1.0) * Quaternion::basis(i % 4);
          const Quaternion q = (j < 4 ? 1.0 : -1.0) * Quaternion::basis(j % 4);
          const Quaternion r = (k < 4 ? 1.0 : -1.0) * Quaternion::basis(k % 4);
          basis_assoc = std::max(basis_assoc, max_abs_diff((p * q) * r, p * (q * r)));
        }
      }
    }
    rec.at_most("quat_associativity_basis", basis_assoc, 0.0);
    rec.at_most("quat_associativity", assoc, 1e-12);
    rec.at_most("quat_norm_multiplicative", normmul, 1e-10, "relative");
    rec.at_most("quat_conj_antihomomorphism", anti, 1e-12);
    rec.at_most("quat_polar_round_trip", polar_dev, 1e-10);
    rec.exceeds("quat_noncommutativity_witness", norm(kE1 * kE2 - kE2 * kE1), 1.0);
  }

  {
    Rng rng = stream(c, 2);
    double module = 0.0, adj_prod = 0.0, adj_scalar = 0.0, involution = 0.0, emb_prod = 0.0, emb_adj = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t n = dims[t % dims.size()];
      const HVector v = random_ket(n, rng);
      const Quaternion p = random_quaternion(rng, false);
      const Quaternion q = random_quaternion(rng, false);
      module = std::max(module, max_abs_diff((v * p) * q, v * (p * q)));

      const HMatrix x = random_matrix(n, n, rng);
      const HMatrix y = random_matrix(n, n, rng);
      adj_prod = std::max(adj_prod, max_abs_diff(adjoint(x * y), adjoint(y) * adjoint(x)));
      adj_scalar = std::max(adj_scalar, max_abs_diff(adjoint(left_scale(p, y)), right_scale(adjoint(y), conj(p))));
      involution = std::max(involution, max_abs_diff(adjoint(adjoint(x)), x));
      const Eigen::MatrixXcd ex = embed(x).matrix;
      const Eigen::MatrixXcd ey = embed(y).matrix;
      emb_prod = std::max(emb_prod, (embed(x * y).matrix - ex * ey).cwiseAbs().maxCoeff());
      emb_adj = std::max(emb_adj, (embed(adjoint(x)).matrix - ex.adjoint()).cwiseAbs().maxCoeff());
    }
    rec.at_most("hspace_right_module", module, 1e-12);
    rec.at_most("adjoint_product", adj_prod, 1e-12);
    rec.at_most("adjoint_scalar", adj_scalar, 1e-12);
    rec.at_most("adjoint_involution", involution, 0.0);
    rec.at_most("embedding_product", emb_prod, 1e-12);
    rec.at_most("embedding_adjoint", emb_adj, 1e-12);
  }

  {
    Rng rng = stream(c, 3);
    double selective_dev = 0.0, weighted_dev = 0.0;
    for (std::size_t n : dims) {
      const BasisLabel basis("A", n);
      for (std::size_t a = 0; a < n; ++a) {
        const MeasurementSymbol m = selective(basis, a);
        const MeasurementSymbol d = adjoint_symbol(m);
        const bool same = d.out_state == m.out_state && d.in_state == m.in_state && d.out_basis == m.out_basis &&
                          d.in_basis == m.in_basis;
        selective_dev = std::max(selective_dev, (same ? 0.0 : 1.0) + max_abs_diff(d.weight, m.weight));
      }
    }
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t n = dims[t % dims.size()];
      const BasisLabel a("A", n), b("B", n);
      const MeasurementSymbol m = make_symbol(a, pick(rng, n), b, pick(rng, n), random_quaternion(rng, false));
      const MeasurementSymbol d = adjoint_symbol(m);
      const bool swapped = d.out_basis == m.in_basis && d.in_basis == m.out_basis && d.out_state == m.in_state &&
                           d.in_state == m.out_state;
      weighted_dev = std::max(weighted_dev, (swapped ? 0.0 : 1.0) + max_abs_diff(d.weight, conj(m.weight)));
    }
    rec.at_most("symbol_selective_self_adjoint", selective_dev, 0.0);
    rec.at_most("symbol_adjoint_definition", weighted_dev, 0.0);
  }

  {
    // iota = eta I: exact up to the rounding of |eta|^2.
    Rng rng = stream(c, 4);
    const std::size_t n = *std::max_element(dims.begin(), dims.end());
    double anti = 0.0, unit = 0.0;
    std::vector<IotaSpec> etas{IotaSpec(c.eta)};
    for (std::size_t t = 0; t < std::min<std::size_t>(trials, 100); ++t) etas.emplace_back(random_pure_unit(rng).value());
    for (const IotaSpec& iota : etas) {
      const HMatrix i = iota.operator_form(n);
      anti = std::max(anti, max_abs(adjoint(i) + i));
      unit = std::max(unit, max_abs_diff(adjoint(i) * i, HMatrix::identity(n)));
    }
    rec.at_most("iota_anti_hermitian", anti, 0.0);
    rec.at_most("iota_unitary", unit, 1e-15, "rounding of |eta|^2 only");
  }

  {
    Rng rng = stream(c, 5);
    double g_anti = 0.0, first_order = 0.0, commuting = 0.0;
    const std::size_t samples = std::max<std::size_t>(1, trials / 10);
    for (std::size_t t = 0; t < samples; ++t) {
      const std::size_t n = dims[t % dims.size()];
      const IotaSpec iota = t == 0 ? IotaSpec(c.eta) : IotaSpec(random_pure_unit(rng).value());
      const HMatrix dw = random_commutant_hermitian(n, iota, rng);
      const Generator g(dw, iota);
      g_anti = std::max(g_anti, anti_hermitian_residual(g.matrix()));
      const HMatrix x = dw * dw + 2.0 * dw;
      commuting = std::max(commuting, max_abs(induced_variation(x, g)));

      HMatrix small = dw;
      small *= 1e-4 / spectral_norm_hermitian(dw);
      const Generator gs(small, iota);
      const HMatrix u = HMatrix::identity(n) + gs.matrix();
      first_order = std::max(first_order, max_abs_diff(adjoint(u) * u, HMatrix::identity(n)));
    }
    rec.at_most("generator_anti_hermitian", g_anti, 1e-12);
    rec.at_most("induced_variation_commuting", commuting, 1e-12);
    rec.at_most("first_order_unitarity", first_order, 1e-7, "|dW| = 1e-4");
  }
}

// ---------------------------------------------------------- measurement_invariants

// Bases realized as orthonormal columns of random unitaries in a common
// space; a symbol |a>q<b| becomes an explicit matrix. Products of these
// matrices are an oracle independent of the symbol product law.
struct Realization {
  std::vector<BasisLabel> bases;
  std::vector<HMatrix> kets;
  TableRegistry registry;

  Realization(std::size_t n, Rng& rng) {
    for (const char* id : {"A", "B", "C", "D"}) {
      bases.emplace_back(id, n);
      kets.push_back(random_unitary(n, rng));
    }
    for (std::size_t x = 0; x < bases.size(); ++x) {
      for (std::size_t y = x + 1; y < bases.size(); ++y) {
        registry.register_pair({bases[x], bases[y], adjoint(kets[x]) * kets[y]});
      }
    }
  }

  std::size_t index_of(const BasisLabel& b) const {
    return static_cast<std::size_t>(std::find(bases.begin(), bases.end(), b) - bases.begin());
  }

  HMatrix dyad(const MeasurementSymbol& m) const {
    const HMatrix& uo = kets[index_of(m.out_basis)];
    const HMatrix& ui = kets[index_of(m.in_basis)];
    const std::size_t n = uo.rows();
    HMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d(i, j) = uo(i, m.out_state) * m.weight * conj(ui(j, m.in_state));
    }
    return d;
  }

  MeasurementSymbol random_symbol(Rng& rng, std::size_t out, std::size_t in) const {
    const std::size_t n = bases[0].size;
    return make_symbol(bases[out], pick(rng, n), bases[in], pick(rng, n), random_quaternion(rng, false));
  }
};

bool same_indices(const MeasurementSymbol& a, const MeasurementSymbol& b) {
  return a.out_basis == b.out_basis && a.in_basis == b.in_basis && a.out_state == b.out_state &&
         a.in_state == b.in_state;
}

void measurement_invariants(const ExperimentConfig& c, Recorder& rec) {
  const std::size_t trials = trials_or(c, 1000);
  const auto dims = dims_or(c, {2, 3, 4, 5});
  Rng rng = stream(c, 1);

  double idem = 0.0, ortho = 0.0, index_errors = 0.0, delta = 0.0, law = 0.0, complete = 0.0, assoc = 0.0,
         adj = 0.0, distrib = 0.0, trace_gap = 0.0;

  for (std::size_t n : dims) {
    const BasisLabel basis("A", n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t a2 = 0; a2 < n; ++a2) {
        const MeasurementSymbol p = mul_symbols(selective(basis, a), selective(basis, a2));
        if (p.out_state != a || p.in_state != a2) index_errors += 1.0;
        if (a == a2) {
          idem = std::max(idem, max_abs_diff(p.weight, kOne));
        } else {
          ortho = std::max(ortho, norm(p.weight));
        }
      }
    }
  }

  std::deque<Realization> worlds;  // the registry is not movable
  for (std::size_t n : dims) worlds.emplace_back(n, rng);

  for (std::size_t t = 0; t < trials; ++t) {
    const Realization& w = worlds[t % worlds.size()];
    const std::size_t n = w.bases[0].size;

    // Same-basis delta composition.
    const MeasurementSymbol s1 = w.random_symbol(rng, 0, 0);
    const MeasurementSymbol s2 = w.random_symbol(rng, 0, 0);
    const MeasurementSymbol sp = mul_symbols(s1, s2);
    const Quaternion expected = s1.in_state == s2.out_state ? s1.weight * s2.weight : Quaternion{};
    if (sp.out_state != s1.out_state || sp.in_state != s2.in_state) index_errors += 1.0;
    delta = std::max(delta, max_abs_diff(sp.weight, expected));

    // General law against explicit dyads, across random bases.
    const std::size_t b0 = pick(rng, 4), b1 = pick(rng, 4), b2 = pick(rng, 4);
    const MeasurementSymbol m1 = w.random_symbol(rng, b0, b1);
    const MeasurementSymbol m2 = w.random_symbol(rng, pick(rng, 4), b2);
    const MeasurementSymbol m12 = mul_symbols(m1, m2, w.registry);
    law = std::max(law, max_abs_diff(w.dyad(m1) * w.dyad(m2), w.dyad(m12)));

    // Completeness on both sides.
    const SymbolSum one_out = SymbolSum::identity(m1.out_basis);
    const SymbolSum one_in = SymbolSum::identity(m1.in_basis);
    const SymbolSum single(m1);
    complete = std::max(complete, max_weight_diff(mul_sums(one_out, single, w.registry), single));
    complete = std::max(complete, max_weight_diff(mul_sums(single, one_in, w.registry), single));

    // Associativity across A -> B -> C -> D.
    const MeasurementSymbol x = w.random_symbol(rng, 0, 1);
    const MeasurementSymbol y = w.random_symbol(rng, 1, 2);
    const MeasurementSymbol z = w.random_symbol(rng, 2, 3);
    const MeasurementSymbol left = mul_symbols(mul_symbols(x, y, w.registry), z, w.registry);
    const MeasurementSymbol right = mul_symbols(x, mul_symbols(y, z, w.registry), w.registry);
    if (!same_indices(left, right)) index_errors += 1.0;
    assoc = std::max(assoc, max_abs_diff(left.weight, right.weight));

    // Adjoint of a product.
    const MeasurementSymbol ad = adjoint_symbol(m12);
    const MeasurementSymbol da = mul_symbols(adjoint_symbol(m2), adjoint_symbol(m1), w.registry);
    if (!same_indices(ad, da)) index_errors += 1.0;
    adj = std::max(adj, max_abs_diff(ad.weight, da.weight));

    // Distributivity of a selective symbol over the completeness sum.
    const BasisLabel& basis = w.bases[0];
    const MeasurementSymbol sel = selective(basis, pick(rng, n));
    const SymbolSum lhs = mul_sums(SymbolSum(sel), SymbolSum::identity(basis), w.registry);
    SymbolSum rhs;
    for (std::size_t a = 0; a < n; ++a) rhs.add(mul_symbols(sel, selective(basis, a)));
    distrib = std::max(distrib, max_weight_diff(lhs, rhs));

    // Left and right traces differ for noncommuting weights.
    const MeasurementSymbol tr = w.random_symbol(rng, 0, 1);
    trace_gap = std::max(trace_gap, norm(trace(tr, TraceKind::Left, w.registry) -
                                         trace(tr, TraceKind::Right, w.registry)));
  }

  double resolution = 0.0;
  for (const Realization& w : worlds) {
    const std::size_t n = w.bases[0].size;
    HMatrix sum(n, n);
    for (std::size_t a = 0; a < n; ++a) sum += w.dyad(selective(w.bases[1], a));
    resolution = std::max(resolution, max_abs_diff(sum, HMatrix::identity(n)));
  }

  rec.at_most("symbol_index_structure", index_errors, 0.0, "count of wrong state or basis indices");
  rec.at_most("symbol_idempotence", idem, 0.0);
  rec.at_most("symbol_orthogonality", ortho, 0.0);
  rec.at_most("symbol_delta_composition", delta, 1e-12);
  rec.at_most("symbol_product_law", law, 1e-12, "explicit dyad oracle");
  rec.at_most("symbol_completeness", complete, 1e-12);
  rec.at_most("symbol_resolution_of_identity", resolution, 1e-12, "explicit dyad oracle");
  rec.at_most("symbol_associativity", assoc, 1e-12);
  rec.at_most("symbol_adjoint_product", adj, 1e-12);
  rec.at_most("symbol_distributivity", distrib, 1e-12);
  rec.diagnostic("trace_left_right_gap", trace_gap, "left and right traces are not equivalent");
}

// ----------------------------------------------------------------- gauge_sweep

void gauge_sweep(const ExperimentConfig& c, Recorder& rec) {
  const std::size_t trials = trials_or(c, 1000);
  const auto dims = dims_or(c, {2, 3, 4});
  Rng rng = stream(c, 1);

  double invariance = 0.0, sand_real = 0.0, sand_imag = 0.0, sand_gauge = 0.0, negative = 0.0, symmetry = 0.0,
         normalization = 0.0, covariance = 0.0, adj_compat = 0.0, round_trip = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = dims[t % dims.size()];
    const BasisLabel a_basis("A", n), b_basis("B", n);
    const TransformationTable table = random_unitary_table(a_basis, b_basis, rng);
    const TransformationTable back = table.reciprocal();
    const GaugePhase ga = random_phase(a_basis, rng);
    const GaugePhase gb = random_phase(b_basis, rng);
    const TransformationTable moved = gauge_transform(table, ga, gb);
    round_trip = std::max(round_trip,
                          max_abs_diff(gauge_transform(moved, ga.inverse(), gb.inverse()).entries, table.entries));

    for (std::size_t b = 0; b < n; ++b) {
      double column = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        const double p = transition_probability(table, a, b);
        column += p;
        negative = std::max(negative, -p);
        invariance = std::max(invariance, std::fabs(transition_probability(moved, a, b) - p));
        symmetry = std::max(symmetry, std::fabs(transition_probability(back, b, a) - p));
        const Quaternion s = sandwich(b, a, table);
        sand_real = std::max(sand_real, std::fabs(s.w - p));
        sand_imag = std::max(sand_imag, imag_norm(s));
        sand_gauge = std::max(sand_gauge, max_abs_diff(sandwich(b, a, moved), Quaternion(p)));
      }
      normalization = std::max(normalization, std::fabs(column - 1.0));
    }

    // Transformed symbols multiplied with the original tables reproduce the
    // transform of the product taken with the transformed tables.
    const MeasurementSymbol m1 = make_symbol(a_basis, pick(rng, n), b_basis, pick(rng, n), random_quaternion(rng, false));
    const MeasurementSymbol m2 = make_symbol(a_basis, pick(rng, n), b_basis, pick(rng, n), random_quaternion(rng, false));
    const MeasurementSymbol moved_product = mul_symbols(m1, m2, moved.reciprocal());
    const MeasurementSymbol product_of_moved =
        mul_symbols(gauge_transform_symbol(m1, ga, gb), gauge_transform_symbol(m2, ga, gb), back);
    covariance = std::max(covariance, max_abs_diff(gauge_transform_symbol(moved_product, ga, gb).weight,
                                                   product_of_moved.weight));
    adj_compat = std::max(adj_compat, max_abs_diff(adjoint_symbol(gauge_transform_symbol(m1, ga, gb)).weight,
                                                   gauge_transform_symbol(adjoint_symbol(m1), gb, ga).weight));
  }
  rec.at_most("gauge_invariance_probability", invariance, 1e-12);
  rec.at_most("gauge_round_trip", round_trip, 1e-12);
  rec.at_most("sandwich_real_part", sand_real, 1e-12);
  rec.at_most("sandwich_imaginary_norm", sand_imag, 1e-12);
  rec.at_most("sandwich_gauge_invariance", sand_gauge, 1e-12);
  rec.at_most("probability_nonnegative", negative <= 0.0 ? 0.0 : negative, 0.0);
  rec.at_most("probability_symmetry", symmetry, 1e-12);
  rec.at_most("probability_normalization", normalization, 1e-10);
  rec.at_most("gauge_symbol_covariance", covariance, 1e-12);
  rec.at_most("gauge_adjoint_compatibility", adj_compat, 1e-12);
}

// ----------------------------------------------------------- degree_constraint

void degree_constraint(const ExperimentConfig& c, Recorder& rec) {
  const std::size_t trials = trials_or(c, 1000);
  const auto dims = dims_or(c, {2, 3, 4});
  Rng rng = stream(c, 1);

  const DegreeConstraint id3 = check_degree_constraint(TransformationTable::identity(BasisLabel("A", 3)));
  rec.at_most("degree_identity_value", std::max(max_abs_diff(id3.lhs, Quaternion(3.0)),
                                                max_abs_diff(id3.rhs, Quaternion(3.0))), 1e-12);

  double gap = 0.0, imag = 0.0, value = 0.0, raw_gap = 0.0;
  std::size_t raw_holds = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = dims[t % dims.size()];
    const BasisLabel a("A", n), b("B", n);
    const DegreeConstraint d = check_degree_constraint(random_unitary_table(a, b, rng));
    gap = std::max(gap, norm(d.lhs - d.rhs));
    imag = std::max({imag, imag_norm(d.lhs), imag_norm(d.rhs)});
    value = std::max(value, std::fabs(d.lhs.w - static_cast<double>(n)));

    const TransformationTable forward(a, b, random_matrix(n, n, rng));
    const TransformationTable backward(b, a, random_matrix(n, n, rng));
    const DegreeConstraint raw = check_degree_constraint(forward, backward);
    raw_gap = std::max(raw_gap, norm(raw.lhs - raw.rhs));
    if (raw.holds) ++raw_holds;
  }
  rec.at_most("degree_reciprocal_gap", gap, 1e-10);
  rec.at_most("degree_reciprocal_real", imag, 1e-10);
  rec.at_most("degree_unitary_value", value, 1e-10, "sum equals the number of states");
  rec.diagnostic("degree_raw_gap", raw_gap, "tables without the reciprocal constraint");
  rec.diagnostic("degree_raw_fraction_holding", static_cast<double>(raw_holds) / static_cast<double>(trials));
}

// ------------------------------------------------------------------- evolution

HMatrix unit_norm(HMatrix h) {
  h *= 1.0 / spectral_norm_hermitian(h);
  return h;
}

// The non-commuting witness: H = [[0, e2], [-e2, 0]] with iota = e1 I.
HMatrix witness_hamiltonian() { return HMatrix{{Quaternion{}, kE2}, {-kE2, Quaternion{}}}; }

void evolution(const ExperimentConfig& c, Recorder& rec) {
  const std::size_t trials = trials_or(c, 100);
  const auto dims = dims_or(c, {4});
  const IotaSpec configured(c.eta);

  if (c.violate_superselection) {
    // Deliberately evolve a Hamiltonian outside the iota commutant.
    const HMatrix h = witness_hamiltonian();
    double residual = superselection_residual(h, IotaSpec(kE1));
    std::string note = "evolution rejected";
    try {
      evolve({HVector{kOne, Quaternion{}}, 0.0, h, IotaSpec(kE1)}, 1.0);
      note = "evolution accepted";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SuperselectionViolated) throw;
    }
    rec.at_most("superselection_respected", residual, kSuperselectionTolerance, note);
  }

  {
    Rng rng = stream(c, 1);
    double norm_drift = 0.0, energy_drift = 0.0, group = 0.0, reverse = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t n = dims[t % dims.size()];
      const IotaSpec iota = t == 0 ? configured : IotaSpec(random_pure_unit(rng).value());
      const HMatrix h = random_commutant_hermitian(n, iota, rng);
      HVector psi = random_ket(n, rng);
      psi = psi * Quaternion(1.0 / norm(psi));
      const double horizon = 100.0 / spectral_norm_hermitian(h);
      const EvolutionState s0{psi, 0.0, h, iota};
      const double e0 = expectation(psi, h);
      for (double frac : {0.25, 0.5, 1.0}) {
        const EvolutionState s = evolve(s0, frac * horizon);
        const Quaternion nn = inner(s.psi, s.psi);
        norm_drift = std::max({norm_drift, std::fabs(nn.w - 1.0), imag_norm(nn)});
        energy_drift = std::max(energy_drift, std::fabs(expectation(s.psi, h) - e0));
      }
      const double t1 = 0.37 * horizon, t2 = 0.63 * horizon;
      const EvolutionState two = evolve(evolve(s0, t1), t1 + t2);
      const EvolutionState one = evolve(s0, t1 + t2);
      group = std::max(group, max_abs_diff(two.psi, one.psi));
      reverse = std::max(reverse, max_abs_diff(evolve(one, 0.0).psi, psi));
    }
    rec.at_most("evolution_norm_drift", norm_drift, 1e-9, "t |H| up to 100");
    rec.at_most("evolution_energy_drift", energy_drift, 1e-9);
    rec.at_most("evolution_group_law", group, 1e-9);
    rec.at_most("evolution_reversibility", reverse, 1e-9);
  }

  {
    // Complex subring against Eigen's complex matrix exponential.
    Rng rng = stream(c, 2);
    double subring = 0.0;
    std::normal_distribution<double> normal;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t n = dims[t % dims.size()];
      const HMatrix h = random_commutant_hermitian(n, configured, rng);
      Eigen::VectorXcd z(static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        z(i) = {re, im};
      }
      z.normalize();
      const double time = 10.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const EvolutionState s = evolve({from_complex(z, configured), 0.0, h, configured}, time);
      const Eigen::MatrixXcd hc = to_complex(h, configured);
      const Eigen::VectorXcd ref = (std::complex<double>(0.0, -time) * hc).exp() * z;
      subring = std::max(subring, max_abs_diff(s.psi, from_complex(ref, configured)));
    }
    rec.at_most("evolution_complex_subring", subring, 1e-10, "reference: complex matrix exponential");
  }

  {
    // Generator consistency: exp(-iota H t) psi - (psi - iota H psi t) = O(t^2).
    Rng rng = stream(c, 3);
    const std::size_t n = dims[0];
    const HMatrix h = random_commutant_hermitian(n, configured, rng);
    HVector psi = random_ket(n, rng);
    psi = psi * Quaternion(1.0 / norm(psi));
    const HVector hpsi = configured.apply_left(apply(h, psi));
    auto err = [&](double t) {
      const HVector exact = evolve({psi, 0.0, h, configured}, t).psi;
      return norm(exact - (psi - hpsi * Quaternion(t)));
    };
    const double t0 = 1e-2 / spectral_norm_hermitian(h);
    const double ratio = err(t0) / err(t0 / 2.0);
    rec.at_most("generator_quadratic_convergence", std::fabs(ratio - 4.0) / 4.0, 0.1,
                "ratio " + format_double(ratio));
  }

  {
    // Heisenberg right-hand side against the operator flow
    // A(s) = V(s)^dag A V(s), V(s) = exp(+iota H s), by central differences.
    Rng rng = stream(c, 4);
    double fd = 0.0, conserved = 0.0;
    const double dt = 1e-5;
    for (std::size_t t = 0; t < 10; ++t) {
      // Unit spectral norms keep the O(dt^2) term near |[H,[H,[H,A]]]| dt^2 / 6 ~ 1e-10.
      const HMatrix h = unit_norm(random_commutant_hermitian(4, configured, rng));
      const HMatrix a = 0.5 * unit_norm(random_commutant_hermitian(4, configured, rng)) +
                        configured.apply_left(0.5 * unit_norm(random_commutant_hermitian(4, configured, rng)));
      const HMatrix vp = propagator(h, configured, -dt);
      const HMatrix vm = propagator(h, configured, dt);
      HMatrix diff = adjoint(vp) * a * vp - adjoint(vm) * a * vm;
      diff *= 1.0 / (2.0 * dt);
      fd = std::max(fd, max_abs_diff(diff, heisenberg_rhs(a, h, configured)));
      conserved = std::max(conserved, max_abs(heisenberg_rhs(h, h, configured)));
    }
    rec.at_most("heisenberg_finite_difference", fd, 1e-8, "central difference, dt = 1e-5");
    rec.at_most("heisenberg_energy_conservation", conserved, 1e-12);
  }

  {
    // Superselection necessity witness.
    const HMatrix h = witness_hamiltonian();
    const IotaSpec e1(kE1);
    const HVector psi{kOne, Quaternion{}};
    rec.exceeds("superselection_witness_norm_drift", unchecked_norm_drift(h, e1, psi, 1.0), 1e-6);
    double accepted = 0.0;
    try {
      evolve({psi, 0.0, h, e1}, 1.0);
      accepted += 1.0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SuperselectionViolated) accepted += 1.0;
    }
    try {
      heisenberg_rhs(h, h, e1);
      accepted += 1.0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SuperselectionViolated) accepted += 1.0;
    }
    rec.at_most("superselection_rejected", accepted, 0.0, "count of calls that did not reject");
  }

  if (!c.output_dir.empty()) {
    Rng rng = stream(c, 5);
    const std::size_t n = dims[0];
    const HMatrix h = random_commutant_hermitian(n, configured, rng);
    HVector psi = random_ket(n, rng);
    psi = psi * Quaternion(1.0 / norm(psi));
    const std::vector<NamedObservable> obs{{"X", random_commutant_hermitian(n, configured, rng)}};
    std::vector<double> times(101);
    const double horizon = 10.0 / spectral_norm_hermitian(h);
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = horizon * static_cast<double>(k) / 100.0;
    write_trace_csv(artifact_path(c, "evolution_trace.csv").string(),
                    evolve_trace({psi, 0.0, h, configured}, times, obs));
    rec.artifact("evolution_trace.csv");
  }
}

// ------------------------------------------------------------------ oscillator

std::vector<std::vector<int>> mode_sets(const ExperimentConfig& c) {
  if (!c.modes.empty()) return {c.modes};
  return {{0}, {0, 1}};
}

std::string mode_tag(const std::vector<int>& modes) {
  std::string tag;
  for (int m : modes) tag += std::to_string(m);
  return tag;
}

void oscillator(const ExperimentConfig& c, Recorder& rec) {
  const IotaSpec iota(c.eta);

  for (std::size_t n : {std::size_t{12}, std::size_t{40}}) {
    const CcrReport r = check_ccr(fock_pair(n, c.omega, iota));
    rec.at_most("fock_pair_ccr_n" + std::to_string(n), std::max({r.qq, r.pp, r.qp_deviation}), 1e-10,
                "interior n < N - 2");
  }

  for (const auto& modes : mode_sets(c)) {
    const std::string tag = "_modes" + mode_tag(modes);
    double interior = 0.0, first = 0.0, last = 0.0, full = 0.0;
    for (std::size_t n : {std::size_t{8}, std::size_t{12}, std::size_t{16}}) {
      const FockOscillator osc = FockOscillator::build(c.omega, n, modes, iota);
      const double dev = check_oscillator_ccr(osc).max();
      interior = std::max(interior, dev);
      if (n == 8) first = dev;
      if (n == 16) last = dev;
      if (n == c.truncation) full = check_oscillator_ccr(osc, true).max();
    }
    rec.at_most("oscillator_ccr_interior" + tag, interior, 1e-10, "N in {8, 12, 16}");
    rec.at_most("oscillator_ccr_monotone" + tag, std::max(0.0, last - first), 1e-12,
                "growth of the interior deviation from N = 8 to 16, rounding floor");
    if (full > 0.0) rec.diagnostic("oscillator_ccr_full_space" + tag, full, "truncation edge artifact");

    const FockOscillator osc = FockOscillator::build(c.omega, c.truncation, modes, iota);
    double herm = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      herm = std::max({herm, hermitian_residual(osc.position()[k]), hermitian_residual(osc.momentum()[k])});
    }
    herm = std::max(herm, hermitian_residual(osc.hamiltonian()));
    rec.at_most("oscillator_hermitian" + tag, herm, 1e-12);

    const HermitianEigen spec = eig_hermitian(osc.hamiltonian());
    const std::vector<double> analytic = osc.analytic_spectrum();
    double spectrum = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) spectrum = std::max(spectrum, std::fabs(spec.values[i] - analytic[i]));
    rec.at_most("oscillator_spectrum" + tag, spectrum, 1e-9);

    const HMatrix basis = index_subspace(osc.dim(), osc.interior_indices());
    rec.at_most("oscillator_quadrature_form" + tag,
                max_abs(restrict_to(osc.quadrature_hamiltonian() - osc.hamiltonian(), basis)), 1e-10,
                "1/2 (P^2 + omega^2 Q^2) on the interior");

    const QOperator qop = osc.assemble();
    HMatrix qdag(osc.dim(), osc.dim());
    for (std::size_t k = 0; k < modes.size(); ++k) qdag += right_scale(osc.position()[k], conj(Quaternion::basis(modes[k])));
    rec.at_most("oscillator_position_adjoint" + tag, max_abs_diff(adjoint(qop.position), qdag), 1e-12);

    // Two periods.
    const double period = 2.0 * std::numbers::pi / c.omega;
    std::vector<double> times(201);
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = 2.0 * period * static_cast<double>(k) / 200.0;
    const OscillatorTrace ground = evolve_expectations(osc, osc.ground_state(), times);
    double ground_q = 0.0;
    for (const TraceRow& row : ground.trace.rows) {
      for (std::size_t k = 0; k < modes.size(); ++k) ground_q = std::max(ground_q, std::fabs(row.expectations[k]));
    }
    rec.at_most("oscillator_ground_state_position" + tag, ground_q, 1e-12);

    std::vector<std::complex<double>> amps;
    for (std::size_t k = 0; k < modes.size(); ++k) amps.emplace_back(0.5 - 0.2 * static_cast<double>(k), 0.3);
    const OscillatorTrace coherent = evolve_expectations(osc, osc.coherent_state(amps), times);
    rec.at_most("oscillator_ehrenfest" + tag, coherent.ehrenfest_residual, 1e-6, "two periods");
    rec.at_most("oscillator_energy_drift" + tag, coherent.energy_drift, 1e-8);
    double periodic = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      periodic = std::max(periodic, std::fabs(coherent.trace.rows[100].expectations[k] - coherent.trace.rows[0].expectations[k]));
    }
    rec.at_most("oscillator_period" + tag, periodic, 1e-6, "<Q>(2 pi / omega) = <Q>(0)");

    if (!c.output_dir.empty()) {
      const std::string file = "oscillator_trace" + tag + ".csv";
      write_trace_csv(artifact_path(c, file).string(), coherent.trace);
      rec.artifact(file);
    }
  }
}

// --------------------------------------------------------------- grid_momentum

struct GridSample {
  Grid grid;
  HVector psi;
  HVector derivative;
};

// psi(x) = exp(-x^2 / (2 s^2)) exp(eta k x) on [-half, half].
GridSample wave_packet(std::size_t points, double half, double sigma, double k, const Quaternion& eta) {
  GridSample s;
  s.grid = {points, 2.0 * half / static_cast<double>(points - 1), -half};
  s.psi = HVector(points);
  s.derivative = HVector(points);
  const UnitQuaternion axis(eta);
  for (std::size_t j = 0; j < points; ++j) {
    const double x = s.grid.x(j);
    const double env = std::exp(-x * x / (2.0 * sigma * sigma));
    const Quaternion phase = exp_polar(1.0, axis, k * x);
    s.psi[j] = env * phase;
    s.derivative[j] = (-x / (sigma * sigma)) * env * phase + env * (k * eta) * phase;
  }
  return s;
}

void grid_momentum(const ExperimentConfig& c, Recorder& rec) {
  const IotaSpec iota(c.eta);
  const std::size_t points = c.grid_points;

  {
    const CanonicalPair pair = dvr_grid_pair(points, iota);
    const CcrReport r = check_ccr(pair);
    rec.at_most("grid_pair_ccr", std::max({r.qq, r.pp, r.qp_deviation}), 1e-8,
                std::to_string(points) + " Gauss-Hermite nodes, interior = levels below N - 1");

    // iota [Q, P^2 / 2m] = -P / m on the interior.
    const double mass = 2.0;
    HMatrix h = pair.p[0] * pair.p[0];
    h *= 1.0 / (2.0 * mass);
    HMatrix expected = pair.p[0];
    expected *= -1.0 / mass;
    rec.at_most("heisenberg_grid_kinetic", max_abs(restrict_to(heisenberg_rhs(pair.q[0], h, iota) - expected, pair.interior)),
                1e-6, "iota [Q, P^2/2m] = -P/m");
  }

  {
    const GridSample coarse = wave_packet(points, 12.0, 1.0, 0.0, iota.eta().value());
    const GridSample fine = wave_packet(2 * points - 1, 12.0, 1.0, 0.0, iota.eta().value());
    const GridMomentumReport rc = momentum_grid_check(coarse.grid, iota, coarse.psi, coarse.derivative);
    const GridMomentumReport rf = momentum_grid_check(fine.grid, iota, fine.psi, fine.derivative);
    const double ratio = rc.deviation / rf.deviation;
    rec.at_most("grid_momentum_consistency", std::max(rc.consistency, rf.consistency), 1e-12, "D psi = iota P psi");
    rec.at_most("grid_momentum_convergence", std::fabs(ratio - 4.0) / 4.0, 0.1,
                "Gaussian, ratio " + format_double(ratio) + " under h -> h/2");
    rec.diagnostic("grid_momentum_deviation_coarse", rc.deviation);
    rec.diagnostic("grid_momentum_deviation_fine", rf.deviation);
    const GridMomentumReport stencil = momentum_grid_check(coarse.grid, iota, coarse.psi);
    rec.diagnostic("grid_momentum_deviation_high_order_reference", stencil.deviation);
  }

  {
    const GridSample coarse = wave_packet(points, 12.0, 1.5, 3.0, iota.eta().value());
    const GridSample fine = wave_packet(2 * points - 1, 12.0, 1.5, 3.0, iota.eta().value());
    const double dc = momentum_grid_check(coarse.grid, iota, coarse.psi, coarse.derivative).deviation;
    const double df = momentum_grid_check(fine.grid, iota, fine.psi, fine.derivative).deviation;
    const double ratio = dc / df;
    rec.at_most("grid_plane_wave_convergence", std::fabs(ratio - 4.0) / 4.0, 0.1,
                "quaternionic phase, ratio " + format_double(ratio));
  }

  {
    Grid grid{points, 0.1, 0.0};
    HVector psi(points);
    for (std::size_t j = 2; j + 2 < points; ++j) psi[j] = kOne;
    const GridMomentumReport r = momentum_grid_check(grid, iota, psi, HVector(points));
    rec.at_most("grid_momentum_constant", r.deviation, 1e-10);
  }
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& entry : kNames) v.push_back(entry.first);
    return v;
  }();
  return kinds;
}

ExperimentConfig parse_config(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  static const std::set<std::string> known = {"experiment", "seed",      "dims",        "trials",
                                              "eta",        "omega",     "truncation",  "modes",
                                              "grid_points", "violate_superselection", "tolerances",
                                              "output_dir"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) invalid(path + "." + item.key(), "unknown field");
  }
  ExperimentConfig c;
  if (!j.contains("experiment") || !j["experiment"].is_string()) invalid(path + ".experiment", "missing experiment name");
  const auto kind = parse_experiment_kind(j["experiment"].get<std::string>());
  if (!kind) invalid(path + ".experiment", "unknown experiment '" + j["experiment"].get<std::string>() + "'");
  c.experiment = *kind;

  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      invalid(path + ".seed", "expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("dims")) {
    if (!j["dims"].is_array() || j["dims"].empty()) invalid(path + ".dims", "expected a non-empty array");
    for (std::size_t k = 0; k < j["dims"].size(); ++k) {
      c.dims.push_back(positive_integer(j["dims"][k], path + ".dims[" + std::to_string(k) + "]"));
    }
  }
  if (j.contains("trials")) c.trials = positive_integer(j["trials"], path + ".trials");
  if (j.contains("eta")) {
    const json& e = j["eta"];
    if (!e.is_array() || e.size() != 3) invalid(path + ".eta", "expected [x, y, z]");
    Quaternion q;
    for (int k = 0; k < 3; ++k) q[k + 1] = finite_number(e[static_cast<std::size_t>(k)], path + ".eta[" + std::to_string(k) + "]");
    if (std::fabs(norm(q) - 1.0) > UnitQuaternion::kTolerance) invalid(path + ".eta", "not a unit vector");
    c.eta = q;
  }
  if (j.contains("omega")) {
    c.omega = finite_number(j["omega"], path + ".omega");
    if (!(c.omega > 0.0)) invalid(path + ".omega", "must be positive");
  }
  if (j.contains("truncation")) c.truncation = positive_integer(j["truncation"], path + ".truncation");
  if (j.contains("modes")) {
    if (!j["modes"].is_array() || j["modes"].empty()) invalid(path + ".modes", "expected a non-empty array");
    for (std::size_t k = 0; k < j["modes"].size(); ++k) {
      const json& m = j["modes"][k];
      if (!m.is_number_integer() || m.get<int>() < 0 || m.get<int>() > 3) {
        invalid(path + ".modes[" + std::to_string(k) + "]", "expected a component in 0..3");
      }
      c.modes.push_back(m.get<int>());
    }
  }
  if (j.contains("grid_points")) {
    c.grid_points = positive_integer(j["grid_points"], path + ".grid_points");
    if (c.grid_points < 16) invalid(path + ".grid_points", "at least 16 points required");
  }
  if (j.contains("violate_superselection")) {
    if (!j["violate_superselection"].is_boolean()) invalid(path + ".violate_superselection", "expected a boolean");
    c.violate_superselection = j["violate_superselection"].get<bool>();
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) invalid(path + ".tolerances", "expected an object");
    for (const auto& item : j["tolerances"].items()) {
      const double t = finite_number(item.value(), path + ".tolerances." + item.key());
      if (t < 0.0) invalid(path + ".tolerances." + item.key(), "must be non-negative");
      c.tolerances[item.key()] = t;
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) invalid(path + ".output_dir", "expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["seed"] = c.seed;
  // Defaults stay implicit so the echo parses back to the same config.
  if (!c.dims.empty()) j["dims"] = c.dims;
  if (c.trials > 0) j["trials"] = c.trials;
  j["eta"] = {c.eta.x, c.eta.y, c.eta.z};
  j["omega"] = c.omega;
  j["truncation"] = c.truncation;
  if (!c.modes.empty()) j["modes"] = c.modes;
  j["grid_points"] = c.grid_points;
  j["violate_superselection"] = c.violate_superselection;
  j["tolerances"] = c.tolerances;
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
  return j;
}

const CheckRecord* Report::find(std::string_view name) const {
  for (const auto& r : records) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

json report_to_json(const Report& report) {
  json records = json::array();
  for (const CheckRecord& r : report.records) {
    json jr{{"name", r.name},
            {"max_deviation", r.max_deviation},
            {"tolerance", r.tolerance},
            {"comparison", r.comparison == Comparison::AtMost ? "at_most" : "exceeds"},
            {"pass", r.pass}};
    if (r.diagnostic) jr["diagnostic"] = true;
    if (!r.note.empty()) jr["note"] = r.note;
    records.push_back(std::move(jr));
  }
  json j{{"experiment", report.experiment},
         {"version", std::string(kVersion)},
         {"config", report.config},
         {"records", std::move(records)},
         {"artifacts", report.artifacts},
         {"pass", report.pass},
         {"timestamp", {{"utc", report.timestamp_utc}, {"wall_time_ms", report.wall_time_ms}}}};
  if (!report.error.empty()) j["error"] = report.error;
  return j;
}

json deterministic_view(const json& report) {
  json j = report;
  j.erase("timestamp");
  if (j.contains("reports")) {
    for (auto& r : j["reports"]) r.erase("timestamp");
  }
  return j;
}

Report run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.experiment = std::string(to_string(config.experiment));
  report.config = config_to_json(config);
  report.timestamp_utc = utc_now();

  if (!config.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + config.output_dir + ": " + ec.message());
  }

  Recorder rec(config);
  try {
    switch (config.experiment) {
      case ExperimentKind::AlgebraLaws: algebra_laws(config, rec); break;
      case ExperimentKind::MeasurementInvariants: measurement_invariants(config, rec); break;
      case ExperimentKind::GaugeSweep: gauge_sweep(config, rec); break;
      case ExperimentKind::DegreeConstraint: degree_constraint(config, rec); break;
      case ExperimentKind::Evolution: evolution(config, rec); break;
      case ExperimentKind::Oscillator: oscillator(config, rec); break;
      case ExperimentKind::GridMomentum: grid_momentum(config, rec); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    report.error = e.what();
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  report.records = rec.take_records();
  report.artifacts = rec.take_artifacts();
  report.pass = report.error.empty() &&
                std::all_of(report.records.begin(), report.records.end(), [](const CheckRecord& r) { return r.pass; });
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!config.output_dir.empty()) {
    write_json_file(std::filesystem::path(config.output_dir) / "report.json", report_to_json(report));
  }
  return report;
}

std::uint64_t derive_seed(std::uint64_t suite_seed, std::uint64_t index) noexcept {
  return splitmix64(suite_seed ^ splitmix64(index));
}

int suite_threads() {
  if (const char* env = std::getenv("QQM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return omp_get_max_threads();
}

SuiteResult run_suite(const json& suite, const std::string& output_override) {
  if (!suite.is_object()) invalid("suite", "expected an object");
  for (const auto& item : suite.items()) {
    if (item.key() != "seed" && item.key() != "experiments" && item.key() != "output_dir") {
      invalid("suite." + item.key(), "unknown field");
    }
  }
  std::uint64_t seed = 0;
  if (suite.contains("seed")) {
    const json& s = suite["seed"];
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      invalid("suite.seed", "expected a non-negative integer");
    }
    seed = suite["seed"].get<std::uint64_t>();
  }
  std::string out_dir = output_override;
  if (out_dir.empty() && suite.contains("output_dir")) {
    if (!suite["output_dir"].is_string()) invalid("suite.output_dir", "expected a string");
    out_dir = suite["output_dir"].get<std::string>();
  }
  const json experiments = suite.value("experiments", json::array());
  if (!experiments.is_array()) invalid("suite.experiments", "expected an array");

  // Validate everything before running anything.
  std::vector<ExperimentConfig> configs;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    const std::string path = "suite.experiments[" + std::to_string(i) + "]";
    ExperimentConfig c = parse_config(experiments[i], path);
    if (!experiments[i].contains("seed")) c.seed = derive_seed(seed, i);
    if (!out_dir.empty()) {
      const std::string sub = std::to_string(i) + "_" + std::string(to_string(c.experiment));
      c.output_dir = (std::filesystem::path(out_dir) / sub).string();
    }
    configs.push_back(std::move(c));
  }

  SuiteResult result;
  result.reports.resize(configs.size());
  std::vector<std::string> failures(configs.size());
  const int threads = std::max(1, std::min<int>(suite_threads(), static_cast<int>(configs.size())));
  const auto count = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      result.reports[k] = run(configs[k]);
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  }
  for (const std::string& f : failures) {
    if (!f.empty()) throw Error(ErrorCode::IoError, f);
  }

  json summary_reports = json::array();
  for (const Report& r : result.reports) {
    result.pass = result.pass && r.pass;
    summary_reports.push_back(report_to_json(r));
  }
  result.summary = {{"version", std::string(kVersion)},
                    {"seed", seed},
                    {"experiments", configs.size()},
                    {"reports", std::move(summary_reports)},
                    {"pass", result.pass}};
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir + ": " + ec.message());
    write_json_file(std::filesystem::path(out_dir) / "summary.json", result.summary);
  }
  return result;
}

SuiteResult run_suite_file(const std::filesystem::path& path, const std::string& output_override) {
  return run_suite(read_json_file(path), output_override);
}

}  // namespace qqm
