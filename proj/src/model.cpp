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

#include "rolin/model.hpp"

#include <cmath>
#include <string>
#include <tuple>

#include "rolin/error.hpp"
#include "rolin/kernels.hpp"

namespace rolin {

void HyperParams::validate() const {
  if (!std::isfinite(sigma_ratio) || sigma_ratio < 0.0)
    throw InvalidArgument("sigma_ratio must be finite and >= 0");
  if (!std::isfinite(b_max) || b_max < 0.0) throw InvalidArgument("b_max must be finite and >= 0");
}

bool canonical_less(const HyperParams& a, const HyperParams& b) noexcept {
  return std::tie(a.k, a.sigma_ratio, a.b_max, a.normalize) <
         std::tie(b.k, b.sigma_ratio, b.b_max, b.normalize);
}

FeatureScaling FeatureScaling::fit(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0) throw InvalidArgument("FeatureScaling::fit: no rows");
  FeatureScaling s;
  s.mean.assign(p, 0.0);
  s.scale.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) s.mean[j] += x(i, j);
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double d = x(i, j) - s.mean[j];
      s.scale[j] += d * d;
    }
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 0.0)) v = 1.0;
  }
  return s;
}

void FeatureScaling::apply_in_place(std::span<double> row) const {
  if (row.size() != mean.size()) throw InvalidArgument("FeatureScaling: dimension mismatch");
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) / scale[j];
}

Matrix FeatureScaling::apply(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) apply_in_place(out.row(i));
  return out;
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::rolin: return "rolin";
    case Method::l1: return "l1";
    case Method::l2: return "l2";
    case Method::top_pcs: return "top_pcs";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (auto m : {Method::rolin, Method::l1, Method::l2, Method::top_pcs}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected rolin, l1, l2 or top_pcs)");
}

double LinearModel::score(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw InvalidArgument("model expects " + std::to_string(weights.size()) + " features, got " +
                          std::to_string(x.size()));
  }
  if (!normalization) return intercept + kernels::dot(weights, x);
  Vector scaled(x.begin(), x.end());
  normalization->apply_in_place(scaled);
  return intercept + kernels::dot(weights, scaled);
}

Vector LinearModel::scores(const Matrix& x) const {
  Vector out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = score(x.row(i));
  return out;
}

}  // namespace rolin
