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

// Dense quaternion kernels. `serial` is the reference implementation;
// `parallel` splits the outer loop across OpenMP threads and keeps the
// per-entry summation order, so both produce bit-identical results.

#include <cstddef>
#include <span>

#include "qqm/quat.hpp"

namespace qqm::kernels {

namespace serial {

/// c(m x n) = a(m x k) * b(k x n), row-major, products in the order a*b.
/// Zero entries of a are skipped, so inf/nan in b behind a zero of a do not
/// propagate.
void matmul(std::span<const Quaternion> a, std::span<const Quaternion> b, std::span<Quaternion> c,
            std::size_t m, std::size_t k, std::size_t n);

/// out(m) = a(m x n) * v(n).
void matvec(std::span<const Quaternion> a, std::span<const Quaternion> v, std::span<Quaternion> out,
            std::size_t m, std::size_t n);

/// out(n x m) = conjugate transpose of a(m x n).
void adjoint(std::span<const Quaternion> a, std::span<Quaternion> out, std::size_t m, std::size_t n);

double max_abs_diff(std::span<const Quaternion> a, std::span<const Quaternion> b);

}  // namespace serial

namespace parallel {

void matmul(std::span<const Quaternion> a, std::span<const Quaternion> b, std::span<Quaternion> c,
            std::size_t m, std::size_t k, std::size_t n);

void matvec(std::span<const Quaternion> a, std::span<const Quaternion> v, std::span<Quaternion> out,
            std::size_t m, std::size_t n);

void adjoint(std::span<const Quaternion> a, std::span<Quaternion> out, std::size_t m, std::size_t n);

double max_abs_diff(std::span<const Quaternion> a, std::span<const Quaternion> b);

}  // namespace parallel

/// Work (in quaternion multiply-adds) above which the dispatching helpers
/// switch to the OpenMP kernels.
inline constexpr std::size_t kParallelThreshold = 1u << 15;

inline bool prefer_parallel(std::size_t work) { return work >= kParallelThreshold; }

}  // namespace qqm::kernels
