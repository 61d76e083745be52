// Copyright 2026 The RoLin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Data-parallel inner loops shared by the SVD, the solvers and the loss
// evaluation. Each instruction set provides a full Table; the scalar table is
// the reference that the vectorized ones are tested against.
//
// The active table is chosen once per process (CPU detection, overridable via
// the ROLIN_KERNELS environment variable: "scalar", "avx2", "neon"), so
// results are bitwise reproducible within one environment.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rolin/losses.hpp"

namespace rolin::kernels {

struct Table {
  const char* name;
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// Fused ||x||^2, ||y||^2 and x.y (one pass, used by Jacobi sweeps).
  void (*dot3)(const double* x, const double* y, std::size_t n, double* xx, double* yy,
               double* xy);
  /// Plane rotation: x <- c x - s y, y <- s x + c y.
  void (*rotate)(double* x, double* y, std::size_t n, double c, double s);
  /// Sum of losses over the margins; when `derivative` is non-null it also
  /// receives the per-margin derivative. zero_one must not request derivatives.
  double (*loss_eval)(LossKind kind, const double* margins, double* derivative, std::size_t n);
};

const Table& scalar_table() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks support.
const Table* avx2_table() noexcept;
const Table* neon_table() noexcept;

/// Table selected for this process.
const Table& active() noexcept;

/// All tables usable on this machine, scalar first.
std::vector<const Table*> available_tables();

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double squared_norm(std::span<const double> x);
double norm(std::span<const double> x);

/// y = A x for a row-major rows x cols matrix.
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
/// y = A^T x for a row-major rows x cols matrix.
void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

double loss_sum(LossKind kind, std::span<const double> margins);
double loss_sum_with_derivative(LossKind kind, std::span<const double> margins,
                                std::span<double> derivative);

}  // namespace rolin::kernels
