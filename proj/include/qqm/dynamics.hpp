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
 * @file dynamics.hpp
 * @brief The imaginary-unit operator, generators, canonical pairs and
 *        Schrodinger evolution d|psi>/dt = -iota H |psi>.
 *
 * iota = eta * I for a constant unit pure-imaginary quaternion eta. It acts by
 * left multiplication on every entry, so an operator commutes with iota
 * exactly when its entries lie in the complex subring span{1, eta}.
 */

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qqm/hspace.hpp"
#include "qqm/quat.hpp"

namespace qqm {

class IotaSpec {
 public:
  /// eta = e1.
  IotaSpec() = default;
  /// Throws NotPureImaginary or NotUnit.
  explicit IotaSpec(const Quaternion& eta);

  const UnitQuaternion& eta() const noexcept { return eta_; }

  /// eta * I_n.
  HMatrix operator_form(std::size_t n) const;
  /// Left multiplication of every entry by eta, i.e. iota * M.
  HMatrix apply_left(const HMatrix& m) const { return left_scale(eta_.value(), m); }
  HVector apply_left(const HVector& v) const;

 private:
  UnitQuaternion eta_{kE1};
};

/// max |iota M - M iota|.
double superselection_residual(const HMatrix& m, const IotaSpec& iota);

inline constexpr double kSuperselectionTolerance = 1e-10;

/// An infinitesimal unitary generator G = iota dW with dW Hermitian and
/// [iota, dW] = 0 (both to 1e-12).
class Generator {
 public:
  /// Throws NotHermitian or SuperselectionViolated.
  Generator(HMatrix dw, IotaSpec iota);

  const HMatrix& dw() const noexcept { return dw_; }
  const IotaSpec& iota() const noexcept { return iota_; }
  const HMatrix& matrix() const noexcept { return g_; }

 private:
  HMatrix dw_;
  IotaSpec iota_;
  HMatrix g_;
};

/// delta X = [G, X].
HMatrix induced_variation(const HMatrix& x, const Generator& g);

/// Lists of canonical coordinates and momenta sharing one iota. `interior`
/// holds orthonormal columns spanning the subspace on which a truncated
/// representation is expected to be exact; an empty matrix means the whole
/// space.
struct CanonicalPair {
  std::vector<HMatrix> q;
  std::vector<HMatrix> p;
  IotaSpec iota;
  HMatrix interior;

  /// Throws SuperselectionViolated if any q or p fails [X, iota] = 0 to 1e-10.
  void validate() const;
};

struct CcrReport {
  double qq = 0.0;            // max |[Q_s, Q_r]|
  double pp = 0.0;            // max |[P_s, P_r]|
  double qp_deviation = 0.0;  // max |[Q_s, P_r] - iota delta_sr|
};

CcrReport check_ccr(const CanonicalPair& pair);

/// Columns e_k of the identity for the listed indices.
HMatrix index_subspace(std::size_t n, std::span<const std::size_t> indices);

/// Single-mode Fock pair Q = (a + a^dag)/sqrt(2 omega),
/// P = iota (a^dag - a) sqrt(omega/2); interior = levels below N - 2.
CanonicalPair fock_pair(std::size_t truncation, double omega, const IotaSpec& iota);

/// Grid pair on the nodes of the truncated oscillator position operator
/// (Gauss-Hermite points): Q is diagonal with the nodes, P is the Fock
/// momentum carried to the node basis, interior = image of levels < N - 1.
CanonicalPair dvr_grid_pair(std::size_t points, const IotaSpec& iota);

/// dA/dt = iota [A, H] + dA/dt|explicit. Throws SuperselectionViolated when
/// [iota, H] exceeds 1e-10.
HMatrix heisenberg_rhs(const HMatrix& a, const HMatrix& h, const IotaSpec& iota,
                       const std::optional<HMatrix>& explicit_derivative = std::nullopt);

struct EvolutionState {
  HVector psi;
  double t = 0.0;
  HMatrix hamiltonian;
  IotaSpec iota;
};

/// exp(-iota H dt). Throws NotHermitian, SuperselectionViolated.
HMatrix propagator(const HMatrix& h, const IotaSpec& iota, double dt);

/// psi(t_final) = exp(-iota H (t_final - t)) psi(t).
EvolutionState evolve(const EvolutionState& state, double t_final);

/// Diagonalizes the generator once and applies exp(-iota H t) for many t.
class SpectralPropagator {
 public:
  SpectralPropagator(const HMatrix& h, const IotaSpec& iota);

  HMatrix matrix(double t) const;
  HVector apply(double t, const HVector& psi) const;

 private:
  std::size_t n_ = 0;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd frequencies_;
};

/// Re <psi|O|psi>.
double expectation(const HVector& psi, const HMatrix& op);

struct TraceRow {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  std::vector<double> expectations;
};

struct EvolutionTrace {
  std::vector<std::string> observable_names;
  std::vector<TraceRow> rows;
};

using NamedObservable = std::pair<std::string, HMatrix>;

EvolutionTrace evolve_trace(const EvolutionState& initial, std::span<const double> times,
                            std::span<const NamedObservable> observables);

/// Columns t, norm, energy, then one per observable; 17 significant digits.
void write_trace_csv(const std::string& path, const EvolutionTrace& trace);

/// Diagnostic: evolves with the plain exponential of -iota H t, without the
/// superselection check, and returns | ||psi(t)||^2 - 1 |.
double unchecked_norm_drift(const HMatrix& h, const IotaSpec& iota, const HVector& psi, double t);

struct Grid {
  std::size_t n_points = 0;
  double spacing = 0.0;
  double origin = 0.0;

  double x(std::size_t j) const { return origin + spacing * static_cast<double>(j); }
};

/// Central-difference first derivative, open boundary.
HMatrix central_difference(const Grid& grid);
HMatrix grid_position(const Grid& grid);
/// P = -iota D.
HMatrix grid_momentum(const Grid& grid, const IotaSpec& iota);

struct GridMomentumReport {
  double consistency = 0.0;  // max |D psi - iota P psi| over interior points
  double deviation = 0.0;    // max |iota P psi - reference derivative|
  std::size_t interior_begin = 0;
  std::size_t interior_end = 0;
};

/// Interior points are [4, n - 4). Without `exact_derivative` the reference
/// is an eighth-order central stencil. Throws ConfigInvalid (n < 8) or
/// BoundarySupport when the outer two points on either side exceed 1e-10.
GridMomentumReport momentum_grid_check(const Grid& grid, const IotaSpec& iota, const HVector& psi,
                                       const std::optional<HVector>& exact_derivative = std::nullopt);

/// Entries a + b eta <-> a + b i for matrices in the iota commutant.
Eigen::MatrixXcd to_complex(const HMatrix& m, const IotaSpec& iota);
Eigen::VectorXcd to_complex(const HVector& v, const IotaSpec& iota);
HVector from_complex(const Eigen::VectorXcd& v, const IotaSpec& iota);
HMatrix from_complex(const Eigen::MatrixXcd& m, const IotaSpec& iota);

/// Random Hermitian matrix with entries in span{1, eta}.
HMatrix random_commutant_hermitian(std::size_t n, const IotaSpec& iota, Rng& rng);

}  // namespace qqm
