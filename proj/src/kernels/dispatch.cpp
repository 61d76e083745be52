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
#include <cstdlib>
#include <string>
#include <string_view>

#include "rolin/error.hpp"
#include "variants.hpp"

namespace rolin::kernels {
namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

const Table& select_table() noexcept {
  const Table* preferred = nullptr;
  if (const Table* t = avx2_table()) preferred = t;
  if (const Table* t = neon_table()) preferred = t;

  if (const char* env = std::getenv("ROLIN_KERNELS")) {
    const std::string_view name(env);
    if (name == "scalar") return scalar_table();
    for (const Table* t : {avx2_table(), neon_table()}) {
      if (t != nullptr && name == t->name) return *t;
    }
  }
  return preferred != nullptr ? *preferred : scalar_table();
}

}  // namespace

const Table& scalar_table() noexcept { return detail::kScalarTable; }

const Table* avx2_table() noexcept {
#if defined(ROLIN_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const Table* neon_table() noexcept {
#if defined(ROLIN_HAVE_NEON)
  return &detail::kNeonTable;
#else
  return nullptr;
#endif
}

const Table& active() noexcept {
  static const Table& table = select_table();
  return table;
}

std::vector<const Table*> available_tables() {
  std::vector<const Table*> out{&scalar_table()};
  if (const Table* t = avx2_table()) out.push_back(t);
  if (const Table* t = neon_table()) out.push_back(t);
  return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_size(x.size(), y.size(), "dot");
  return active().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

double squared_norm(std::span<const double> x) {
  return active().dot(x.data(), x.data(), x.size());
}

double norm(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y) {
  require_same_size(a.size(), rows * cols, "gemv");
  require_same_size(x.size(), cols, "gemv");
  require_same_size(y.size(), rows, "gemv");
  const Table& t = active();
  for (std::size_t i = 0; i < rows; ++i) y[i] = t.dot(a.data() + i * cols, x.data(), cols);
}

void gemv_t(std::span<const double> a, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  require_same_size(a.size(), rows * cols, "gemv_t");
  require_same_size(x.size(), rows, "gemv_t");
  require_same_size(y.size(), cols, "gemv_t");
  const Table& t = active();
  for (double& v : y) v = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (x[i] != 0.0) t.axpy(x[i], a.data() + i * cols, y.data(), cols);
  }
}

double loss_sum(LossKind kind, std::span<const double> margins) {
  return active().loss_eval(kind, margins.data(), nullptr, margins.size());
}

double loss_sum_with_derivative(LossKind kind, std::span<const double> margins,
                                std::span<double> derivative) {
  require_fittable(kind);
  require_same_size(margins.size(), derivative.size(), "loss_sum_with_derivative");
  return active().loss_eval(kind, margins.data(), derivative.data(), margins.size());
}

}  // namespace rolin::kernels
