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

#include <optional>
#include <string>
#include <string_view>

namespace rolin {

/// Margin-based losses. All of them are functions of the margin y * g(x).
enum class LossKind {
  logistic,
  hinge,
  squared_hinge,
  modified_huber,
  zero_one,
};

/// Loss value at the given margin.
///
/// logistic       log2(1 + exp(-m))
/// hinge          max(0, 1 - m)
/// squared_hinge  max(0, 1 - m)^2
/// modified_huber max(0, 1 - m)^2 for m >= -1, -4m otherwise
/// zero_one       1 if m <= 0 else 0
double loss_value(LossKind kind, double margin) noexcept;

/// Derivative of the loss with respect to the margin. Kinks take the
/// right-derivative. Throws InvalidArgument for zero_one.
double loss_derivative(LossKind kind, double margin);

/// Second derivative (right-sided at the joins); 0 for hinge. Throws
/// InvalidArgument for zero_one.
double loss_second_derivative(LossKind kind, double margin);

/// Evaluation-only losses cannot be handed to a fitting routine.
constexpr bool is_fittable(LossKind kind) noexcept { return kind != LossKind::zero_one; }

/// Smooth losses can be fitted with gradient methods; hinge needs subgradients.
constexpr bool is_differentiable(LossKind kind) noexcept {
  return kind == LossKind::logistic || kind == LossKind::squared_hinge ||
         kind == LossKind::modified_huber;
}

/// Throws InvalidArgument unless the loss can be used for fitting.
void require_fittable(LossKind kind);

std::string_view to_string(LossKind kind) noexcept;
std::optional<LossKind> parse_loss(std::string_view name) noexcept;
/// Like parse_loss but throws InvalidArgument with the offending name.
LossKind loss_from_string(std::string_view name);

}  // namespace rolin
