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

#include "qqm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>

#include "qqm/error.hpp"
#include "qqm/serialization.hpp"

namespace qqm {

namespace {

using cd = std::complex<double>;

void require_square(const HMatrix& m, const char* what) {
  if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is not square");
}

void require_same_dim(const HMatrix& a, const HMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "operator dimensions differ");
  }
}

void require_hermitian(const HMatrix& h, double tol) {
  require_square(h, "hamiltonian");
  const double r = hermitian_residual(h);
  if (!(r <= tol)) throw Error(ErrorCode::NotHermitian, "hermitian residual " + std::to_string(r));
}

void require_commutant(const HMatrix& h, const IotaSpec& iota, double tol) {
  const double r = superselection_residual(h, iota);
  if (!(r <= tol)) {
    throw Error(ErrorCode::SuperselectionViolated, "[iota, H] residual " + std::to_string(r));
  }
}

double dot_imag(const Quaternion& q, const Quaternion& eta) {
  return q.x * eta.x + q.y * eta.y + q.z * eta.z;
}

// Tridiagonal ladder matrices of one truncated mode, real entries.
Eigen::MatrixXd lowering(std::size_t n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    a(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = std::sqrt(static_cast<double>(k));
  }
  return a;
}

HMatrix real_to_h(const Eigen::MatrixXd& m) {
  HMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Quaternion(m(i, j));
    }
  }
  return out;
}

}  // namespace

IotaSpec::IotaSpec(const Quaternion& eta) : eta_(eta) {
  if (!eta_.is_pure()) throw Error(ErrorCode::NotPureImaginary, "eta must have zero real part");
}

HMatrix IotaSpec::operator_form(std::size_t n) const {
  HMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = eta_.value();
  return out;
}

HVector IotaSpec::apply_left(const HVector& v) const {
  HVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = eta_.value() * v[i];
  return out;
}

double superselection_residual(const HMatrix& m, const IotaSpec& iota) {
  // (iota M - M iota)_ij = eta m_ij - m_ij eta.
  double r = 0.0;
  const Quaternion eta = iota.eta().value();
  for (const Quaternion& q : m.data()) r = std::max(r, norm(eta * q - q * eta));
  return r;
}

Generator::Generator(HMatrix dw, IotaSpec iota) : dw_(std::move(dw)), iota_(iota) {
  require_hermitian(dw_, 1e-12);
  const double c = superselection_residual(dw_, iota_);
  if (!(c <= 1e-12)) {
    throw Error(ErrorCode::SuperselectionViolated, "[iota, dW] residual " + std::to_string(c));
  }
  g_ = iota_.apply_left(dw_);
}

HMatrix induced_variation(const HMatrix& x, const Generator& g) {
  require_same_dim(x, g.matrix());
  return commutator(g.matrix(), x);
}

void CanonicalPair::validate() const {
  for (const auto* list : {&q, &p}) {
    for (const HMatrix& m : *list) {
      const double r = superselection_residual(m, iota);
      if (!(r <= kSuperselectionTolerance)) {
        throw Error(ErrorCode::SuperselectionViolated,
                    "canonical variable leaves the iota commutant: " + std::to_string(r));
      }
    }
  }
}

CcrReport check_ccr(const CanonicalPair& pair) {
  CcrReport report;
  const bool restricted = pair.interior.rows() > 0;
  auto measure = [&](const HMatrix& m) { return max_abs(restricted ? restrict_to(m, pair.interior) : m); };
  for (std::size_t s = 0; s < pair.q.size(); ++s) {
    for (std::size_t r = s + 1; r < pair.q.size(); ++r) {
      report.qq = std::max(report.qq, measure(commutator(pair.q[s], pair.q[r])));
    }
  }
  for (std::size_t s = 0; s < pair.p.size(); ++s) {
    for (std::size_t r = s + 1; r < pair.p.size(); ++r) {
      report.pp = std::max(report.pp, measure(commutator(pair.p[s], pair.p[r])));
    }
  }
  for (std::size_t s = 0; s < pair.q.size(); ++s) {
    for (std::size_t r = 0; r < pair.p.size(); ++r) {
      require_same_dim(pair.q[s], pair.p[r]);
      HMatrix c = commutator(pair.q[s], pair.p[r]);
      if (s == r) c -= pair.iota.operator_form(c.rows());
      report.qp_deviation = std::max(report.qp_deviation, measure(c));
    }
  }
  return report;
}

HMatrix index_subspace(std::size_t n, std::span<const std::size_t> indices) {
  HMatrix b(n, indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= n) throw Error(ErrorCode::IndexOutOfRange, "subspace index out of range");
    b(indices[k], k) = kOne;
  }
  return b;
}

CanonicalPair fock_pair(std::size_t truncation, double omega, const IotaSpec& iota) {
  if (truncation < 3) throw Error(ErrorCode::TruncationTooSmall, "Fock pair needs at least 3 levels");
  if (!(omega > 0.0)) throw Error(ErrorCode::ConfigInvalid, "omega must be positive");
  const Eigen::MatrixXd a = lowering(truncation);
  const Eigen::MatrixXd ad = a.transpose();
  CanonicalPair pair;
  pair.iota = iota;
  pair.q.push_back(real_to_h((a + ad) / std::sqrt(2.0 * omega)));
  pair.p.push_back(iota.apply_left(real_to_h((ad - a) * std::sqrt(omega / 2.0))));
  std::vector<std::size_t> interior(truncation - 2);
  for (std::size_t k = 0; k < interior.size(); ++k) interior[k] = k;
  pair.interior = index_subspace(truncation, interior);
  return pair;
}

CanonicalPair dvr_grid_pair(std::size_t points, const IotaSpec& iota) {
  if (points < 3) throw Error(ErrorCode::TruncationTooSmall, "grid pair needs at least 3 points");
  const Eigen::MatrixXd a = lowering(points);
  const Eigen::MatrixXd ad = a.transpose();
  const Eigen::MatrixXd x = (a + ad) / std::sqrt(2.0);
  const Eigen::MatrixXd k = (ad - a) / std::sqrt(2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "node eigensolver failed");
  const Eigen::MatrixXd& u = solver.eigenvectors();
  const Eigen::VectorXd nodes = solver.eigenvalues();

  CanonicalPair pair;
  pair.iota = iota;
  pair.q.push_back(HMatrix::diagonal(std::span<const double>(nodes.data(), points)));
  pair.p.push_back(iota.apply_left(real_to_h(u.transpose() * k * u)));
  // Fock levels 0..N-2 expressed on the nodes.
  pair.interior = real_to_h(u.transpose().leftCols(static_cast<Eigen::Index>(points - 1)));
  return pair;
}

HMatrix heisenberg_rhs(const HMatrix& a, const HMatrix& h, const IotaSpec& iota,
                       const std::optional<HMatrix>& explicit_derivative) {
  require_square(h, "hamiltonian");
  require_same_dim(a, h);
  require_commutant(h, iota, kSuperselectionTolerance);
  HMatrix out = iota.apply_left(commutator(a, h));
  if (explicit_derivative) {
    require_same_dim(*explicit_derivative, a);
    out += *explicit_derivative;
  }
  return out;
}

HMatrix propagator(const HMatrix& h, const IotaSpec& iota, double dt) {
  require_hermitian(h, kSuperselectionTolerance);
  require_commutant(h, iota, kSuperselectionTolerance);
  HMatrix gen = left_scale(-iota.eta().value(), h);
  gen *= dt;
  return expm_antihermitian(gen);
}

EvolutionState evolve(const EvolutionState& state, double t_final) {
  if (state.psi.size() != state.hamiltonian.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "state and hamiltonian dimensions differ");
  }
  EvolutionState out = state;
  out.psi = apply(propagator(state.hamiltonian, state.iota, t_final - state.t), state.psi);
  out.t = t_final;
  return out;
}

SpectralPropagator::SpectralPropagator(const HMatrix& h, const IotaSpec& iota) : n_(h.rows()) {
  require_hermitian(h, kSuperselectionTolerance);
  require_commutant(h, iota, kSuperselectionTolerance);
  // chi(-iota H) = -i K with K Hermitian; exp(-iota H t) = V diag(exp(-i mu t)) V^H.
  const Eigen::MatrixXcd gen = embed(left_scale(-iota.eta().value(), h)).matrix;
  const Eigen::MatrixXcd k = cd(0.0, 1.0) * gen;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (k + k.adjoint()));
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver failed");
  vectors_ = solver.eigenvectors();
  frequencies_ = solver.eigenvalues();
}

HMatrix SpectralPropagator::matrix(double t) const {
  const Eigen::VectorXcd phases = (-t * frequencies_).unaryExpr([](double a) { return std::exp(cd(0.0, a)); });
  return lift(ComplexEmbedding{vectors_ * phases.asDiagonal() * vectors_.adjoint()}, 1e-8);
}

HVector SpectralPropagator::apply(double t, const HVector& psi) const {
  if (psi.size() != n_) throw Error(ErrorCode::DimensionMismatch, "state dimension differs");
  HMatrix col(n_, 1);
  for (std::size_t i = 0; i < n_; ++i) col(i, 0) = psi[i];
  const Eigen::VectorXcd phases = (-t * frequencies_).unaryExpr([](double a) { return std::exp(cd(0.0, a)); });
  const Eigen::MatrixXcd c = embed(col).matrix;
  const Eigen::MatrixXcd evolved = vectors_ * (phases.asDiagonal() * (vectors_.adjoint() * c));
  return lift(ComplexEmbedding{evolved}, 1e-8).column(0);
}

double expectation(const HVector& psi, const HMatrix& op) { return inner(psi, apply(op, psi)).w; }

EvolutionTrace evolve_trace(const EvolutionState& initial, std::span<const double> times,
                            std::span<const NamedObservable> observables) {
  const SpectralPropagator prop(initial.hamiltonian, initial.iota);
  EvolutionTrace trace;
  for (const auto& [name, op] : observables) {
    require_same_dim(op, initial.hamiltonian);
    trace.observable_names.push_back(name);
  }
  trace.rows.reserve(times.size());
  for (double t : times) {
    const HVector psi = prop.apply(t - initial.t, initial.psi);
    TraceRow row;
    row.t = t;
    row.norm = norm(psi);
    row.energy = expectation(psi, initial.hamiltonian);
    for (const auto& obs : observables) row.expectations.push_back(expectation(psi, obs.second));
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

void write_trace_csv(const std::string& path, const EvolutionTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  out << "t,norm,energy";
  for (const auto& name : trace.observable_names) out << ',' << name;
  out << '\n';
  for (const TraceRow& row : trace.rows) {
    out << format_double(row.t) << ',' << format_double(row.norm) << ',' << format_double(row.energy);
    for (double e : row.expectations) out << ',' << format_double(e);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

double unchecked_norm_drift(const HMatrix& h, const IotaSpec& iota, const HVector& psi, double t) {
  require_square(h, "hamiltonian");
  HMatrix gen = left_scale(-iota.eta().value(), h);
  gen *= t;
  const HVector out = apply(expm_general(gen), psi);
  const double n0 = norm(psi);
  const double n1 = norm(out);
  return std::fabs(n1 * n1 - n0 * n0);
}

HMatrix central_difference(const Grid& grid) {
  const std::size_t n = grid.n_points;
  HMatrix d(n, n);
  const double c = 0.5 / grid.spacing;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) d(i, i + 1) = Quaternion(c);
    if (i > 0) d(i, i - 1) = Quaternion(-c);
  }
  return d;
}

HMatrix grid_position(const Grid& grid) {
  std::vector<double> xs(grid.n_points);
  for (std::size_t j = 0; j < grid.n_points; ++j) xs[j] = grid.x(j);
  return HMatrix::diagonal(xs);
}

HMatrix grid_momentum(const Grid& grid, const IotaSpec& iota) {
  return left_scale(-iota.eta().value(), central_difference(grid));
}

GridMomentumReport momentum_grid_check(const Grid& grid, const IotaSpec& iota, const HVector& psi,
                                       const std::optional<HVector>& exact_derivative) {
  const std::size_t n = grid.n_points;
  if (n < 8) throw Error(ErrorCode::ConfigInvalid, "grid needs at least 8 points");
  if (!(grid.spacing > 0.0)) throw Error(ErrorCode::ConfigInvalid, "grid spacing must be positive");
  if (psi.size() != n) throw Error(ErrorCode::DimensionMismatch, "state length differs from grid");
  if (exact_derivative && exact_derivative->size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "derivative length differs from grid");
  }
  for (std::size_t k : {std::size_t{0}, std::size_t{1}, n - 2, n - 1}) {
    if (norm(psi[k]) > 1e-10) {
      throw Error(ErrorCode::BoundarySupport, "state has support on boundary point " + std::to_string(k));
    }
  }
  const HMatrix d = central_difference(grid);
  const HVector dpsi = apply(d, psi);
  const HVector ipsi = iota.apply_left(apply(grid_momentum(grid, iota), psi));

  // Eighth-order central stencil.
  static constexpr double kStencil[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  GridMomentumReport report;
  report.interior_begin = 4;
  report.interior_end = n - 4;
  for (std::size_t j = report.interior_begin; j < report.interior_end; ++j) {
    Quaternion ref;
    if (exact_derivative) {
      ref = (*exact_derivative)[j];
    } else {
      for (std::size_t m = 1; m <= 4; ++m) ref += kStencil[m - 1] * (psi[j + m] - psi[j - m]);
      ref = ref * (1.0 / grid.spacing);
    }
    report.consistency = std::max(report.consistency, norm(dpsi[j] - ipsi[j]));
    report.deviation = std::max(report.deviation, norm(ipsi[j] - ref));
  }
  return report;
}

Eigen::MatrixXcd to_complex(const HMatrix& m, const IotaSpec& iota) {
  const Quaternion eta = iota.eta().value();
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cd(m(i, j).w, dot_imag(m(i, j), eta));
    }
  }
  return out;
}

Eigen::VectorXcd to_complex(const HVector& v, const IotaSpec& iota) {
  const Quaternion eta = iota.eta().value();
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = cd(v[i].w, dot_imag(v[i], eta));
  return out;
}

HVector from_complex(const Eigen::VectorXcd& v, const IotaSpec& iota) {
  const Quaternion eta = iota.eta().value();
  HVector out(static_cast<std::size_t>(v.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cd z = v(static_cast<Eigen::Index>(i));
    out[i] = Quaternion(z.real()) + z.imag() * eta;
  }
  return out;
}

HMatrix from_complex(const Eigen::MatrixXcd& m, const IotaSpec& iota) {
  const Quaternion eta = iota.eta().value();
  HMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const cd z = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out(i, j) = Quaternion(z.real()) + z.imag() * eta;
    }
  }
  return out;
}

HMatrix random_commutant_hermitian(std::size_t n, const IotaSpec& iota, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cd(re, im);
    }
  }
  const Eigen::MatrixXcd h = 0.5 * (z + z.adjoint());
  HMatrix out = from_complex(h, iota);
  // Exact hermiticity after the round trip through eta.
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = Quaternion(out(i, i).w);
    for (std::size_t j = i + 1; j < n; ++j) out(j, i) = conj(out(i, j));
  }
  return out;
}

}  // namespace qqm
