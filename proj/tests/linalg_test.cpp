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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rolin/error.hpp"
#include "rolin/linalg.hpp"
#include "support.hpp"

using namespace rolin;
using rolin::testing::random_matrix;
using rolin::testing::to_eigen;

namespace {

double reconstruction_error(const Matrix& z, const SubspaceDecomposition& s) {
  const Eigen::MatrixXd u = to_eigen(s.left_vectors);
  const Eigen::MatrixXd vt = to_eigen(s.right_vectors);
  const Eigen::VectorXd d = to_eigen(s.singular_values);
  const Eigen::MatrixXd zz = to_eigen(z);
  return (u * d.asDiagonal() * vt - zz).norm() / zz.norm();
}

}  // namespace

TEST_CASE("signed_matrix multiplies each row by its label") {
  CHECK(signed_matrix(Matrix::from_rows({{1, 2}}), std::vector<double>{-1}) ==
        Matrix::from_rows({{-1, -2}}));
  CHECK(signed_matrix(Matrix::from_rows({{1, 0}, {0, 1}}), std::vector<double>{1, 1}) ==
        Matrix::identity(2));
  CHECK(signed_matrix(Matrix::from_rows({{3, 4}}), std::vector<double>{1}) ==
        Matrix::from_rows({{3, 4}}));
}

TEST_CASE("thin_svd on small fixed matrices") {
  const auto eye = thin_svd(Matrix::identity(2));
  REQUIRE(eye.rank() == 2);
  CHECK(eye.singular_values[0] == doctest::Approx(1.0));
  CHECK(eye.singular_values[1] == doctest::Approx(1.0));
  CHECK(eye.split_k == 0);

  const auto one = thin_svd(Matrix::from_rows({{3, 0}, {0, 0}}));
  REQUIRE(one.rank() == 1);
  CHECK(one.singular_values[0] == doctest::Approx(3.0));
  CHECK(one.right_vectors(0, 0) == doctest::Approx(1.0));

  const auto zero = thin_svd(Matrix(3, 2, 0.0));
  CHECK(zero.rank() == 0);
  CHECK(zero.basis().count == 0);
}

TEST_CASE("thin_svd reconstructs random matrices") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix z = random_matrix(6, 4, seed);
    const auto s = thin_svd(z);
    CHECK(s.rank() == 4);
    CHECK(reconstruction_error(z, s) <= 1e-8);
  }
  // Wide and rank-deficient shapes.
  const Matrix wide = random_matrix(5, 12, 99);
  CHECK(reconstruction_error(wide, thin_svd(wide)) <= 1e-8);
  CHECK(thin_svd(wide).rank() == 5);

  Matrix low(8, 4);
  const Matrix a = random_matrix(8, 1, 3), b = random_matrix(1, 4, 4);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 4; ++j) low(i, j) = a(i, 0) * b(0, j);
  }
  const auto s = thin_svd(low);
  CHECK(s.rank() == 1);
  CHECK(reconstruction_error(low, s) <= 1e-8);
}

TEST_CASE("thin_svd invariants: orthonormal, sorted, oriented") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix z = random_matrix(9, 6, 1000 + seed);
    const auto s = thin_svd(z);
    const Eigen::MatrixXd v = to_eigen(s.right_vectors);
    CHECK((v * v.transpose() - Eigen::MatrixXd::Identity(s.rank(), s.rank())).cwiseAbs().maxCoeff() <=
          1e-10);
    CHECK(std::is_sorted(s.singular_values.rbegin(), s.singular_values.rend()));
    for (std::size_t j = 0; j < s.rank(); ++j) {
      CHECK(s.singular_values[j] > 0.0);
      const auto row = s.right_vectors.row(j);
      const auto it = std::max_element(row.begin(), row.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
      CHECK(*it > 0.0);
    }
  }
}

TEST_CASE("singular values match the square roots of eig(Z^T Z)") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t p = 2 + seed % 5;
    const Matrix z = random_matrix(p + 3, p, 500 + seed);
    const auto s = thin_svd(z);
    const Eigen::MatrixXd zz = to_eigen(z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(zz.transpose() * zz);
    Eigen::VectorXd ev = eig.eigenvalues().reverse();
    REQUIRE(s.rank() == p);
    for (std::size_t j = 0; j < p; ++j) {
      CHECK(std::abs(s.singular_values[j] - std::sqrt(ev(j))) <= 1e-8);
    }
  }
}

TEST_CASE("signing the rows keeps the singular values and vectors up to sign") {
  const Matrix x = random_matrix(10, 5, 77);
  std::vector<double> y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = i % 3 == 0 ? -1.0 : 1.0;
  const auto sx = thin_svd(x);
  const auto sz = thin_svd(signed_matrix(x, y));
  REQUIRE(sx.rank() == sz.rank());
  for (std::size_t j = 0; j < sx.rank(); ++j) {
    CHECK(std::abs(sx.singular_values[j] - sz.singular_values[j]) <= 1e-10);
    double dot = 0.0;
    for (std::size_t c = 0; c < 5; ++c) dot += sx.right_vectors(j, c) * sz.right_vectors(j, c);
    CHECK(std::abs(std::abs(dot) - 1.0) <= 1e-10);
  }
}

TEST_CASE("project and lift") {
  const std::vector<double> e1{1.0, 0.0};
  const BasisView v1{e1, 1, 2};
  const std::vector<double> x{5.0, 7.0};
  CHECK(project(v1, x) == std::vector<double>{5.0});

  const BasisView empty{{}, 0, 2};
  CHECK(project(empty, x).empty());
  CHECK(lift(empty, {}) == std::vector<double>{0.0, 0.0});

  // Columns (0,1) and (1,0): coordinates come out swapped.
  const std::vector<double> swapped{0.0, 1.0, 1.0, 0.0};
  const BasisView v2{swapped, 2, 2};
  CHECK(project(v2, std::vector<double>{2.0, 3.0}) == std::vector<double>{3.0, 2.0});
  CHECK(lift(v2, std::vector<double>{3.0, 2.0}) == std::vector<double>{2.0, 3.0});
}

TEST_CASE("projection onto a block preserves the norm of vectors inside it") {
  const auto s = thin_svd(random_matrix(12, 8, 5));
  for (std::size_t k = 0; k <= s.rank(); ++k) {
    const auto split = s.with_split(k);
    for (const BasisView& block : {split.s0(), split.complement()}) {
      const Matrix coords = random_matrix(1, block.count, 40 + k);
      const Vector w = lift(block, coords.row(0));
      const Vector back = lift(block, project(block, w));
      double nw = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        nw += w[i] * w[i];
        nb += back[i] * back[i];
      }
      CHECK(std::abs(std::sqrt(nb) - std::sqrt(nw)) <= 1e-10);
    }
  }
}

TEST_CASE("with_split partitions the basis") {
  const auto s = thin_svd(random_matrix(7, 5, 8));
  const auto split = s.with_split(2);
  CHECK(split.split_k == 2);
  CHECK(split.s0().count == 2);
  CHECK(split.complement().count == 3);
  CHECK(split.complement_values().size() == 3);
  CHECK(split.complement_values()[0] == s.singular_values[2]);
  CHECK(split.complement().vector(0)[0] == s.right_vectors(2, 0));
  CHECK_THROWS_AS(s.with_split(6), InvalidArgument);
}

TEST_CASE("tiny singular values are dropped by the rank cutoff") {
  Matrix z = random_matrix(6, 3, 21);
  // Third column = first + 1e-14 noise: numerically rank 2.
  for (std::size_t i = 0; i < 6; ++i) z(i, 2) = z(i, 0) + 1e-14 * double(i % 2);
  CHECK(thin_svd(z).rank() == 2);
}
