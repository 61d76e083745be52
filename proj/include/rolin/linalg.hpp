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

#include <cstddef>
#include <span>

#include "rolin/data.hpp"
#include "rolin/matrix.hpp"

namespace rolin {

/// `count` orthonormal vectors of length `dim`, stored contiguously one per
/// row. Stands for the dim x count matrix whose columns are those vectors.
struct BasisView {
  std::span<const double> values;
  std::size_t count = 0;
  std::size_t dim = 0;

  std::span<const double> vector(std::size_t j) const noexcept {
    return values.subspan(j * dim, dim);
  }
};

/// Thin SVD Z = U diag(D) V^T restricted to the numerical rank r, with the
/// split of the right singular vectors into S0 (first split_k) and the
/// complement S1 u S2 (remaining r - split_k).
struct SubspaceDecomposition {
  /// r x p; row j is the j-th right singular vector.
  Matrix right_vectors;
  /// r singular values, descending, all positive.
  Vector singular_values;
  /// n x r; column j is the j-th left singular vector.
  Matrix left_vectors;
  std::size_t split_k = 0;

  std::size_t rank() const noexcept { return singular_values.size(); }
  std::size_t dimension() const noexcept { return right_vectors.cols(); }

  BasisView basis() const noexcept;
  BasisView s0() const noexcept;
  BasisView complement() const noexcept;
  std::span<const double> complement_values() const noexcept;

  /// Copy with a new split; throws InvalidArgument when k exceeds the rank.
  SubspaceDecomposition with_split(std::size_t k) const;
};

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

/// Rows y_i * x_i.
Matrix signed_matrix(const LabeledDataset& data);
Matrix signed_matrix(const Matrix& features, std::span<const double> labels);

/// One-sided Jacobi SVD. Each right singular vector is oriented so that its
/// largest-magnitude entry is positive. An all-zero matrix yields rank 0.
SubspaceDecomposition thin_svd(const Matrix& z);

/// Coordinates V^T x of x in the basis.
Vector project(const BasisView& basis, std::span<const double> x);
/// V c: the vector with coordinates c in the basis.
Vector lift(const BasisView& basis, std::span<const double> coords);

}  // namespace rolin
