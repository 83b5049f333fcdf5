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

#include "qqm/quat.hpp"

#include <limits>
#include <numbers>
#include <string>

namespace qqm {

Quaternion inverse(const Quaternion& q) {
  const double n2 = norm2(q);
  if (!(std::sqrt(n2) > kInverseGuard)) {
    throw Error(ErrorCode::ZeroDivisor, "inverse of a quaternion with modulus below guard");
  }
  return conj(q) / n2;
}

UnitQuaternion::UnitQuaternion(const Quaternion& q) {
  const double n = norm(q);
  if (!(std::fabs(n - 1.0) <= kTolerance)) {
    throw Error(ErrorCode::NotUnit, "modulus deviates from 1 by " + std::to_string(n - 1.0));
  }
  // Already-normalized values are kept bit-for-bit so serialized phases
  // round-trip exactly.
  q_ = std::fabs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? q : q / n;
}

UnitQuaternion UnitQuaternion::normalized(const Quaternion& q) {
  const double n = norm(q);
  if (!(n > kInverseGuard)) throw Error(ErrorCode::ZeroDivisor, "cannot normalize zero quaternion");
  return UnitQuaternion(q / n, Unchecked{});
}

Quaternion exp_polar(double magnitude, const UnitQuaternion& axis, double angle) {
  if (!axis.is_pure()) {
    throw Error(ErrorCode::NotPureImaginary, "polar axis must have zero real part");
  }
  return magnitude * (Quaternion(std::cos(angle)) + std::sin(angle) * axis.value());
}

PolarForm polar(const Quaternion& q) {
  const double magnitude = norm(q);
  if (!(magnitude > kInverseGuard)) throw Error(ErrorCode::ZeroDivisor, "polar form of zero");

  PolarForm out;
  out.magnitude = magnitude;
  const double v = imag_norm(q);
  if (v < kDegenerateAxisTolerance) {
    out.degenerate_axis = true;
    out.axis = UnitQuaternion(kE1);
    out.angle = q.w >= 0.0 ? 0.0 : std::numbers::pi;
    return out;
  }
  out.axis = UnitQuaternion::normalized(imag_part(q));
  out.angle = std::atan2(v, q.w);
  return out;
}

Quaternion random_quaternion(Rng& rng, bool unit) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Quaternion q{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    if (!unit) return q;
    const double n = norm(q);
    if (n > 1e-8) return q / n;
  }
}

Quaternion random_quaternion(std::uint64_t seed, bool unit) {
  Rng rng(seed);
  return random_quaternion(rng, unit);
}

UnitQuaternion random_pure_unit(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Quaternion v{0.0, gauss(rng), gauss(rng), gauss(rng)};
    if (norm(v) > 1e-8) return UnitQuaternion::normalized(v);
  }
}

}  // namespace qqm
