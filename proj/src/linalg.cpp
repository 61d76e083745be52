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

#include "rolin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rolin/error.hpp"
#include "rolin/kernels.hpp"

namespace rolin {
namespace {

constexpr double kJacobiTolerance = 1e-15;
constexpr int kMaxSweeps = 80;

// Orthogonalizes the rows of `w` by plane rotations, accumulating the same
// rotations into the rows of `q` (square, starts as identity).
void jacobi_orthogonalize(Matrix& w, Matrix& q) {
  const kernels::Table& k = kernels::active();
  const std::size_t m = w.rows();
  const std::size_t len = w.cols();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t a = 0; a + 1 < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        double alpha, beta, gamma;
        k.dot3(w.row(a).data(), w.row(b).data(), len, &alpha, &beta, &gamma);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        k.rotate(w.row(a).data(), w.row(b).data(), len, c, s);
        k.rotate(q.row(a).data(), q.row(b).data(), q.cols(), c, s);
        rotated = true;
      }
    }
    if (!rotated) return;
  }
}

// Two passes of modified Gram-Schmidt over the rows, in order.
void reorthonormalize(Matrix& rows) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < rows.rows(); ++j) {
      auto vj = rows.row(j);
      for (std::size_t i = 0; i < j; ++i) {
        const double proj = kernels::dot(rows.row(i), vj);
        kernels::axpy(-proj, rows.row(i), vj);
      }
      const double nrm = kernels::norm(vj);
      for (double& v : vj) v /= nrm;
    }
  }
}

}  // namespace

BasisView SubspaceDecomposition::basis() const noexcept {
  return {right_vectors.data(), rank(), dimension()};
}

BasisView SubspaceDecomposition::s0() const noexcept {
  return {right_vectors.row_block(0, split_k), split_k, dimension()};
}

BasisView SubspaceDecomposition::complement() const noexcept {
  const std::size_t count = rank() - split_k;
  return {right_vectors.row_block(split_k, count), count, dimension()};
}

std::span<const double> SubspaceDecomposition::complement_values() const noexcept {
  return std::span<const double>(singular_values).subspan(split_k);
}

SubspaceDecomposition SubspaceDecomposition::with_split(std::size_t k) const {
  if (k > rank()) {
    throw InvalidArgument("subspace split k=" + std::to_string(k) + " exceeds numerical rank " +
                          std::to_string(rank()));
  }
  SubspaceDecomposition out = *this;
  out.split_k = k;
  return out;
}

Matrix signed_matrix(const Matrix& features, std::span<const double> labels) {
  if (labels.size() != features.rows()) {
    throw InvalidArgument("signed_matrix: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(features.rows()) + " rows");
  }
  Matrix z = features;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const double y = labels[i];
    if (y != 1.0 && y != -1.0) throw InvalidArgument("signed_matrix: labels must be +1 or -1");
    if (y < 0.0) {
      for (double& v : z.row(i)) v = -v;
    }
  }
  return z;
}

Matrix signed_matrix(const LabeledDataset& data) {
  return signed_matrix(data.features, data.labels);
}

SubspaceDecomposition thin_svd(const Matrix& z) {
  const std::size_t n = z.rows();
  const std::size_t p = z.cols();
  for (double v : z.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("thin_svd: matrix has non-finite entries");
  }

  // Orthogonalize whichever side is shorter: the columns of Z when n >= p,
  // otherwise the rows of Z (the columns of Z^T).
  const bool tall = n >= p;
  Matrix w = tall ? z.transposed() : z;
  Matrix q = Matrix::identity(w.rows());
  jacobi_orthogonalize(w, q);

  const std::size_t m = w.rows();
  Vector sigma(m);
  for (std::size_t j = 0; j < m; ++j) sigma[j] = kernels::norm(w.row(j));

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  const double largest = m > 0 ? sigma[order.front()] : 0.0;
  std::size_t rank = 0;
  if (largest > 0.0) {
    while (rank < m && sigma[order[rank]] >= kRankCutoff * largest) ++rank;
  }

  SubspaceDecomposition out;
  out.singular_values.resize(rank);
  out.right_vectors = Matrix(rank, p);
  out.left_vectors = Matrix(n, rank);
  Matrix left_rows(rank, n);
  for (std::size_t r = 0; r < rank; ++r) {
    const std::size_t j = order[r];
    const double s = sigma[j];
    out.singular_values[r] = s;
    auto v = out.right_vectors.row(r);
    auto u = left_rows.row(r);
    if (tall) {
      for (std::size_t c = 0; c < p; ++c) v[c] = q(j, c);
      for (std::size_t c = 0; c < n; ++c) u[c] = w(j, c) / s;
    } else {
      for (std::size_t c = 0; c < p; ++c) v[c] = w(j, c) / s;
      for (std::size_t c = 0; c < n; ++c) u[c] = q(j, c);
    }
  }
  if (!tall) reorthonormalize(out.right_vectors);

  for (std::size_t r = 0; r < rank; ++r) {
    auto v = out.right_vectors.row(r);
    std::size_t lead = 0;
    for (std::size_t c = 1; c < p; ++c) {
      if (std::abs(v[c]) > std::abs(v[lead])) lead = c;
    }
    if (v[lead] < 0.0) {
      for (double& x : v) x = -x;
      for (double& x : left_rows.row(r)) x = -x;
    }
  }
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t i = 0; i < n; ++i) out.left_vectors(i, r) = left_rows(r, i);
  return out;
}

Vector project(const BasisView& basis, std::span<const double> x) {
  if (x.size() != basis.dim) {
    throw InvalidArgument("project: vector length " + std::to_string(x.size()) +
                          " does not match basis dimension " + std::to_string(basis.dim));
  }
  Vector out(basis.count);
  if (basis.count > 0) kernels::gemv(basis.values, basis.count, basis.dim, x, out);
  return out;
}

Vector lift(const BasisView& basis, std::span<const double> coords) {
  if (coords.size() != basis.count) {
    throw InvalidArgument("lift: " + std::to_string(coords.size()) + " coordinates for a basis of " +
                          std::to_string(basis.count) + " vectors");
  }
  Vector out(basis.dim, 0.0);
  if (basis.count > 0) kernels::gemv_t(basis.values, basis.count, basis.dim, coords, out);
  return out;
}

}  // namespace rolin
