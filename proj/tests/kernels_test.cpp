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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rolin/kernels.hpp"

using namespace rolin;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

// Lengths straddling the vector widths and their tails.
constexpr std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 101};

}  // namespace

TEST_CASE("scalar table is always available and first") {
  const auto tables = kernels::available_tables();
  REQUIRE_FALSE(tables.empty());
  CHECK(std::string(tables.front()->name) == "scalar");
  bool active_listed = false;
  for (const auto* t : tables) active_listed |= t == &kernels::active();
  CHECK(active_listed);
}

TEST_CASE("every kernel variant agrees with the scalar reference") {
  const kernels::Table& ref = kernels::scalar_table();
  for (const kernels::Table* t : kernels::available_tables()) {
    CAPTURE(t->name);
    for (std::size_t n : kLengths) {
      CAPTURE(n);
      const auto x = random_values(n, 100 + n);
      const auto y = random_values(n, 200 + n);
      const double scale = 1.0 + std::sqrt(double(n));

      CHECK(std::abs(t->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <=
            1e-13 * scale);

      auto y1 = y, y2 = y;
      t->axpy(0.37, x.data(), y1.data(), n);
      ref.axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * scale);

      double a[3], b[3];
      t->dot3(x.data(), y.data(), n, &a[0], &a[1], &a[2]);
      ref.dot3(x.data(), y.data(), n, &b[0], &b[1], &b[2]);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-13 * scale);

      auto rx1 = x, ry1 = y, rx2 = x, ry2 = y;
      t->rotate(rx1.data(), ry1.data(), n, 0.8, 0.6);
      ref.rotate(rx2.data(), ry2.data(), n, 0.8, 0.6);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(rx1[i] - rx2[i]) <= 1e-14);
        CHECK(std::abs(ry1[i] - ry2[i]) <= 1e-14);
      }

      const auto m = random_values(n, 300 + n, 2.0);
      for (LossKind k : {LossKind::logistic, LossKind::hinge, LossKind::squared_hinge,
                         LossKind::modified_huber}) {
        std::vector<double> d1(n), d2(n);
        const double s1 = t->loss_eval(k, m.data(), d1.data(), n);
        const double s2 = ref.loss_eval(k, m.data(), d2.data(), n);
        CHECK(std::abs(s1 - s2) <= 1e-12 * scale);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(d1[i] - d2[i]) <= 1e-14);
        CHECK(std::abs(t->loss_eval(k, m.data(), nullptr, n) - s2) <= 1e-12 * scale);
      }
      CHECK(t->loss_eval(LossKind::zero_one, m.data(), nullptr, n) ==
            ref.loss_eval(LossKind::zero_one, m.data(), nullptr, n));
    }
  }
}

TEST_CASE("loss_sum matches per-margin loss values") {
  const auto m = random_values(37, 5, 3.0);
  for (LossKind k : {LossKind::logistic, LossKind::hinge, LossKind::squared_hinge,
                     LossKind::modified_huber, LossKind::zero_one}) {
    double expected = 0.0;
    for (double v : m) expected += loss_value(k, v);
    CHECK(kernels::loss_sum(k, m) == doctest::Approx(expected).epsilon(1e-13));
  }
  std::vector<double> d(m.size());
  kernels::loss_sum_with_derivative(LossKind::squared_hinge, m, d);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(d[i] == doctest::Approx(loss_derivative(LossKind::squared_hinge, m[i])));
  }
}

TEST_CASE("gemv and gemv_t against a direct loop") {
  const std::size_t rows = 7, cols = 5;
  const auto a = random_values(rows * cols, 1);
  const auto x = random_values(cols, 2);
  const auto z = random_values(rows, 3);
  std::vector<double> y(rows), w(cols);
  kernels::gemv(a, rows, cols, x, y);
  kernels::gemv_t(a, rows, cols, z, w);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += a[i * cols + j] * x[j];
    CHECK(y[i] == doctest::Approx(s).epsilon(1e-14));
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a[i * cols + j] * z[i];
    CHECK(w[j] == doctest::Approx(s).epsilon(1e-14));
  }
  CHECK(kernels::norm(x) == doctest::Approx(std::sqrt(kernels::squared_norm(x))));
}
