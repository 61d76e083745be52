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

#include "rolin/losses.hpp"

#include <cmath>
#include <string>

#include "rolin/error.hpp"

namespace rolin {
namespace {

constexpr double kInvLn2 = 1.4426950408889634074;

// log(1 + exp(-m)) without overflow for either sign of m.
double softplus_neg(double m) noexcept {
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

}  // namespace

double loss_value(LossKind kind, double margin) noexcept {
  switch (kind) {
    case LossKind::logistic:
      return softplus_neg(margin) * kInvLn2;
    case LossKind::hinge:
      return margin < 1.0 ? 1.0 - margin : 0.0;
    case LossKind::squared_hinge: {
      const double slack = margin < 1.0 ? 1.0 - margin : 0.0;
      return slack * slack;
    }
    case LossKind::modified_huber: {
      if (margin < -1.0) return -4.0 * margin;
      const double slack = margin < 1.0 ? 1.0 - margin : 0.0;
      return slack * slack;
    }
    case LossKind::zero_one:
      return margin <= 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double loss_derivative(LossKind kind, double margin) {
  switch (kind) {
    case LossKind::logistic: {
      // -sigmoid(-m) / ln 2
      if (margin >= 0.0) {
        const double e = std::exp(-margin);
        return -e / (1.0 + e) * kInvLn2;
      }
      return -kInvLn2 / (1.0 + std::exp(margin));
    }
    case LossKind::hinge:
      return margin < 1.0 ? -1.0 : 0.0;
    case LossKind::squared_hinge:
      return margin < 1.0 ? -2.0 * (1.0 - margin) : 0.0;
    case LossKind::modified_huber:
      if (margin < -1.0) return -4.0;
      return margin < 1.0 ? -2.0 * (1.0 - margin) : 0.0;
    case LossKind::zero_one:
      break;
  }
  throw InvalidArgument("loss_derivative: zero_one loss has no usable derivative");
}

double loss_second_derivative(LossKind kind, double margin) {
  switch (kind) {
    case LossKind::logistic: {
      // sigmoid(m) * sigmoid(-m) / ln 2
      const double e = std::exp(-std::abs(margin));
      return e / ((1.0 + e) * (1.0 + e)) * kInvLn2;
    }
    case LossKind::hinge:
      return 0.0;
    case LossKind::squared_hinge:
      return margin < 1.0 ? 2.0 : 0.0;
    case LossKind::modified_huber:
      return margin >= -1.0 && margin < 1.0 ? 2.0 : 0.0;
    case LossKind::zero_one:
      break;
  }
  throw InvalidArgument("loss_second_derivative: zero_one loss has no usable derivative");
}

void require_fittable(LossKind kind) {
  if (!is_fittable(kind)) {
    throw InvalidArgument("loss '" + std::string(to_string(kind)) +
                          "' is evaluation-only and cannot be used for fitting");
  }
}

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::logistic: return "logistic";
    case LossKind::hinge: return "hinge";
    case LossKind::squared_hinge: return "squared_hinge";
    case LossKind::modified_huber: return "modified_huber";
    case LossKind::zero_one: return "zero_one";
  }
  return "unknown";
}

std::optional<LossKind> parse_loss(std::string_view name) noexcept {
  for (auto kind : {LossKind::logistic, LossKind::hinge, LossKind::squared_hinge,
                    LossKind::modified_huber, LossKind::zero_one}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

LossKind loss_from_string(std::string_view name) {
  if (auto kind = parse_loss(name)) return *kind;
  throw InvalidArgument("unknown loss '" + std::string(name) +
                        "' (expected logistic, hinge, squared_hinge, modified_huber or zero_one)");
}

}  // namespace rolin
