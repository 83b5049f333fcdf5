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

#include <algorithm>
#include <cstdint>

#include "qqm/kernels.hpp"

namespace qqm::kernels::parallel {

void matmul(std::span<const Quaternion> a, std::span<const Quaternion> b, std::span<Quaternion> c,
            std::size_t m, std::size_t k, std::size_t n) {
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Quaternion* row = c.data() + i * n;
    std::fill(row, row + n, Quaternion{});
    for (std::size_t l = 0; l < k; ++l) {
      const Quaternion ail = a[i * k + l];
      if (ail == Quaternion{}) continue;  // ladder and grid operators are mostly zeros
      const Quaternion* brow = b.data() + l * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += ail * brow[j];
    }
  }
}

void matvec(std::span<const Quaternion> a, std::span<const Quaternion> v, std::span<Quaternion> out,
            std::size_t m, std::size_t n) {
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Quaternion acc;
    for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * v[j];
    out[i] = acc;
  }
}

void adjoint(std::span<const Quaternion> a, std::span<Quaternion> out, std::size_t m, std::size_t n) {
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = conj(a[i * n + j]);
  }
}

double max_abs_diff(std::span<const Quaternion> a, std::span<const Quaternion> b) {
  double worst = 0.0;
  const auto count = static_cast<std::int64_t>(a.size());
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    worst = std::max(worst, qqm::max_abs_diff(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)]));
  }
  return worst;
}

}  // namespace qqm::kernels::parallel
