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

#include "qqm/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qqm/error.hpp"

namespace qqm {

namespace {

using cd = std::complex<double>;

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

// Lowering operator of digit k on the product space; real entries.
HMatrix mode_lowering(std::size_t n, std::size_t k, std::size_t dim) {
  HMatrix a(dim, dim);
  const std::size_t stride = ipow(n, k);
  for (std::size_t j = 0; j < dim; ++j) {
    const std::size_t occ = (j / stride) % n;
    if (occ == 0) continue;
    a(j - stride, j) = Quaternion(std::sqrt(static_cast<double>(occ)));
  }
  return a;
}

double max_restricted(const HMatrix& m, const HMatrix* basis) {
  return max_abs(basis ? restrict_to(m, *basis) : m);
}

}  // namespace

FockOscillator FockOscillator::build(double omega, std::size_t truncation, std::vector<int> modes,
                                     IotaSpec iota, bool allow_large) {
  if (truncation < kMinTruncation) {
    throw Error(ErrorCode::TruncationTooSmall,
                "truncation " + std::to_string(truncation) + " below " + std::to_string(kMinTruncation));
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) throw Error(ErrorCode::ConfigInvalid, "omega must be positive");
  if (modes.empty()) throw Error(ErrorCode::ConfigInvalid, "mode subset is empty");
  std::set<int> seen;
  for (int m : modes) {
    if (m < 0 || m > 3) throw Error(ErrorCode::ConfigInvalid, "mode component outside 0..3");
    if (!seen.insert(m).second) throw Error(ErrorCode::ConfigInvalid, "mode listed twice");
  }
  if (modes.size() > 2 && !allow_large) {
    throw Error(ErrorCode::ConfigInvalid, "more than two modes requires allow_large");
  }

  FockOscillator osc;
  osc.omega_ = omega;
  osc.truncation_ = truncation;
  osc.modes_ = std::move(modes);
  osc.iota_ = iota;
  osc.dim_ = ipow(truncation, osc.modes_.size());

  const double qs = 1.0 / std::sqrt(2.0 * omega);
  const double ps = std::sqrt(omega / 2.0);
  for (std::size_t k = 0; k < osc.modes_.size(); ++k) {
    HMatrix a = mode_lowering(truncation, k, osc.dim_);
    const HMatrix ad = adjoint(a);
    osc.q_.push_back(qs * (a + ad));
    osc.p_.push_back(iota.apply_left(ps * (ad - a)));
    osc.a_.push_back(std::move(a));
  }
  std::vector<double> energies(osc.dim_);
  for (std::size_t i = 0; i < osc.dim_; ++i) {
    double e = 0.0;
    for (std::size_t n : osc.occupations(i)) e += omega * (static_cast<double>(n) + 0.5);
    energies[i] = e;
  }
  osc.h_ = HMatrix::diagonal(energies);
  return osc;
}

HMatrix FockOscillator::holomorphic_coordinate(std::size_t k) const {
  return (1.0 / std::sqrt(omega_)) * lowering(k);
}

HMatrix FockOscillator::holomorphic_velocity(std::size_t k) const {
  return iota_.apply_left(-std::sqrt(omega_) * lowering(k));
}

HMatrix FockOscillator::quadrature_hamiltonian() const {
  HMatrix h(dim_, dim_);
  for (std::size_t k = 0; k < q_.size(); ++k) {
    h += 0.5 * (p_[k] * p_[k]);
    h += (0.5 * omega_ * omega_) * (q_[k] * q_[k]);
  }
  return h;
}

QOperator FockOscillator::assemble() const {
  QOperator out{HMatrix(dim_, dim_), HMatrix(dim_, dim_)};
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const Quaternion unit = Quaternion::basis(modes_[k]);
    out.position += right_scale(q_[k], unit);
    out.velocity += right_scale(p_[k], unit);
  }
  return out;
}

std::vector<std::size_t> FockOscillator::occupations(std::size_t index) const {
  std::vector<std::size_t> occ(modes_.size());
  for (auto& n : occ) {
    n = index % truncation_;
    index /= truncation_;
  }
  return occ;
}

std::vector<std::size_t> FockOscillator::interior_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto occ = occupations(i);
    if (std::all_of(occ.begin(), occ.end(), [&](std::size_t n) { return n + 1 < truncation_; })) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<double> FockOscillator::analytic_spectrum() const {
  std::vector<double> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    std::size_t total = 0;
    for (std::size_t n : occupations(i)) total += n;
    out[i] = omega_ * (static_cast<double>(total) + 0.5 * static_cast<double>(modes_.size()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

HVector FockOscillator::ground_state() const { return HVector::unit(dim_, 0); }

HVector FockOscillator::coherent_state(std::span<const cd> amplitudes) const {
  if (amplitudes.size() != modes_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one amplitude per mode required");
  }
  std::vector<std::vector<cd>> factors;
  for (const cd& alpha : amplitudes) {
    std::vector<cd> c(truncation_);
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (std::size_t n = 1; n < truncation_; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    factors.push_back(std::move(c));
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto occ = occupations(i);
    cd z = 1.0;
    for (std::size_t k = 0; k < occ.size(); ++k) z *= factors[k][occ[k]];
    v(static_cast<Eigen::Index>(i)) = z;
  }
  v /= v.norm();
  return from_complex(v, iota_);
}

double FockOscillator::edge_occupation(const HVector& psi) const {
  if (psi.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "state dimension differs");
  double w = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto occ = occupations(i);
    if (std::any_of(occ.begin(), occ.end(), [&](std::size_t n) { return n + 2 >= truncation_; })) {
      w += norm2(psi[i]);
    }
  }
  return w;
}

double OscillatorCcrReport::max() const {
  return std::max({q_qdot, qdag_qdotdag, qdag_qdot, q_qdotdag, hermitian_pair});
}

OscillatorCcrReport check_oscillator_ccr(const FockOscillator& osc, bool full_space) {
  HMatrix basis;
  if (!full_space) basis = index_subspace(osc.dim(), osc.interior_indices());
  const HMatrix* b = full_space ? nullptr : &basis;
  const HMatrix iota = osc.iota().operator_form(osc.dim());

  const std::size_t k = osc.modes().size();
  std::vector<HMatrix> q, qd, v, vd;
  for (std::size_t m = 0; m < k; ++m) {
    q.push_back(osc.holomorphic_coordinate(m));
    qd.push_back(adjoint(q.back()));
    v.push_back(osc.holomorphic_velocity(m));
    vd.push_back(adjoint(v.back()));
  }

  OscillatorCcrReport r;
  for (std::size_t beta = 0; beta < k; ++beta) {
    for (std::size_t alpha = 0; alpha < k; ++alpha) {
      r.q_qdot = std::max(r.q_qdot, max_restricted(commutator(q[beta], v[alpha]), b));
      r.qdag_qdotdag = std::max(r.qdag_qdotdag, max_restricted(commutator(qd[beta], vd[alpha]), b));
      HMatrix c1 = commutator(qd[beta], v[alpha]);
      HMatrix c2 = commutator(q[beta], vd[alpha]);
      HMatrix c3 = commutator(osc.position()[beta], osc.momentum()[alpha]);
      if (alpha == beta) {
        c1 -= iota;
        c2 -= iota;
        c3 -= iota;
      }
      r.qdag_qdot = std::max(r.qdag_qdot, max_restricted(c1, b));
      r.q_qdotdag = std::max(r.q_qdotdag, max_restricted(c2, b));
      r.hermitian_pair = std::max(r.hermitian_pair, max_restricted(c3, b));
    }
  }
  return r;
}

OscillatorTrace evolve_expectations(const FockOscillator& osc, const HVector& psi0,
                                    std::span<const double> t_grid) {
  if (psi0.size() != osc.dim()) throw Error(ErrorCode::DimensionMismatch, "state dimension differs");
  if (std::fabs(norm(psi0) - 1.0) > 1e-10) throw Error(ErrorCode::ConfigInvalid, "initial state not normalized");
  const double edge = osc.edge_occupation(psi0);
  if (edge > kEdgeTolerance) {
    throw Error(ErrorCode::EdgeSupport, "occupation of the top two levels " + std::to_string(edge));
  }

  std::vector<NamedObservable> observables;
  const std::size_t k = osc.modes().size();
  for (std::size_t m = 0; m < k; ++m) observables.emplace_back("Q" + std::to_string(osc.modes()[m]), osc.position()[m]);
  for (std::size_t m = 0; m < k; ++m) observables.emplace_back("P" + std::to_string(osc.modes()[m]), osc.momentum()[m]);

  const EvolutionState initial{psi0, 0.0, osc.hamiltonian(), osc.iota()};
  OscillatorTrace out;
  out.trace = evolve_trace(initial, t_grid, observables);

  std::vector<double> q0(k), p0(k);
  for (std::size_t m = 0; m < k; ++m) {
    q0[m] = expectation(psi0, osc.position()[m]);
    p0[m] = expectation(psi0, osc.momentum()[m]);
  }
  const double e0 = expectation(psi0, osc.hamiltonian());
  const double w = osc.omega();
  for (const TraceRow& row : out.trace.rows) {
    for (std::size_t m = 0; m < k; ++m) {
      const double classical = q0[m] * std::cos(w * row.t) + p0[m] * std::sin(w * row.t) / w;
      out.ehrenfest_residual = std::max(out.ehrenfest_residual, std::fabs(row.expectations[m] - classical));
    }
    out.energy_drift = std::max(out.energy_drift, std::fabs(row.energy - e0));
    out.norm_drift = std::max(out.norm_drift, std::fabs(row.norm * row.norm - 1.0));
  }
  return out;
}

}  // namespace qqm
