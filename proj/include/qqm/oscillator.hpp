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
 * @file oscillator.hpp
 * @brief Quaternionic harmonic oscillator on a truncated Fock space.
 *
 * The coordinate q = sum_alpha q^alpha e_alpha is carried by independent
 * bosonic modes, one per selected component alpha. Mode k of the selection
 * occupies digit k of the product index i = sum_k n_k N^k.
 *
 * Per mode, with unit mass:
 *   Q = (a + a^dag)/sqrt(2 omega),  P = iota (a^dag - a) sqrt(omega/2),
 *   H = sum omega (n + 1/2).
 * The holomorphic coordinate q = a/sqrt(omega) and velocity
 * qdot = -iota sqrt(omega) a give Q = (q + q^dag)/sqrt(2) and
 * P = (qdot + qdot^dag)/sqrt(2).
 */

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qqm/dynamics.hpp"
#include "qqm/hspace.hpp"

namespace qqm {

struct QOperator {
  HMatrix position;  // sum_alpha Q^alpha e_alpha
  HMatrix velocity;  // sum_alpha P^alpha e_alpha
};

class FockOscillator {
 public:
  static constexpr std::size_t kMinTruncation = 8;

  /// Throws TruncationTooSmall (N < 8) or ConfigInvalid (bad omega, empty or
  /// repeated modes, components outside 0..3, or more than two modes without
  /// `allow_large`).
  static FockOscillator build(double omega, std::size_t truncation, std::vector<int> modes,
                              IotaSpec iota = IotaSpec(), bool allow_large = false);

  double omega() const noexcept { return omega_; }
  std::size_t truncation() const noexcept { return truncation_; }
  std::size_t interior_cutoff() const noexcept { return truncation_ - 2; }
  const std::vector<int>& modes() const noexcept { return modes_; }
  const IotaSpec& iota() const noexcept { return iota_; }
  std::size_t dim() const noexcept { return dim_; }

  const std::vector<HMatrix>& position() const noexcept { return q_; }
  const std::vector<HMatrix>& momentum() const noexcept { return p_; }
  const HMatrix& hamiltonian() const noexcept { return h_; }

  /// Lowering operator of the k-th selected mode on the product space.
  const HMatrix& lowering(std::size_t k) const { return a_.at(k); }
  HMatrix holomorphic_coordinate(std::size_t k) const;
  HMatrix holomorphic_velocity(std::size_t k) const;

  /// 1/2 sum (P^2 + omega^2 Q^2); equals hamiltonian() away from the top level.
  HMatrix quadrature_hamiltonian() const;

  QOperator assemble() const;

  std::vector<std::size_t> occupations(std::size_t index) const;
  /// Product states with every occupation below N - 1.
  std::vector<std::size_t> interior_indices() const;
  /// omega (sum n + k/2) over all product states, ascending.
  std::vector<double> analytic_spectrum() const;

  HVector ground_state() const;
  /// Product of truncated coherent states, amplitude z = a + b i mapped to
  /// a + b eta, renormalized on the truncated space.
  HVector coherent_state(std::span<const std::complex<double>> amplitudes) const;
  /// Probability weight on product states with some occupation >= N - 2.
  double edge_occupation(const HVector& psi) const;

 private:
  FockOscillator() = default;

  double omega_ = 1.0;
  std::size_t truncation_ = 0;
  std::vector<int> modes_;
  IotaSpec iota_;
  std::size_t dim_ = 0;
  std::vector<HMatrix> a_;
  std::vector<HMatrix> q_;
  std::vector<HMatrix> p_;
  HMatrix h_;
};

struct OscillatorCcrReport {
  double q_qdot = 0.0;           // max |[q^b, qdot_a]|
  double qdag_qdotdag = 0.0;     // max |[q^b dag, qdot_a dag]|
  double qdag_qdot = 0.0;        // max |[q^b dag, qdot_a] - iota delta|
  double q_qdotdag = 0.0;        // max |[q^b, qdot_a dag] - iota delta|
  double hermitian_pair = 0.0;   // max |[Q^b, P^a] - iota delta|

  double max() const;
};

/// Evaluates on the interior subspace unless `full_space` is set.
OscillatorCcrReport check_oscillator_ccr(const FockOscillator& osc, bool full_space = false);

struct OscillatorTrace {
  EvolutionTrace trace;  // observables Q<alpha> then P<alpha>, one per mode
  double ehrenfest_residual = 0.0;
  double energy_drift = 0.0;
  double norm_drift = 0.0;
};

inline constexpr double kEdgeTolerance = 1e-8;

/// Throws EdgeSupport when more than 1e-8 of the weight sits on the top two
/// levels, ConfigInvalid when psi0 is not normalized to 1e-10.
OscillatorTrace evolve_expectations(const FockOscillator& osc, const HVector& psi0,
                                    std::span<const double> t_grid);

}  // namespace qqm
