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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rolin/losses.hpp"
#include "rolin/matrix.hpp"
#include "rolin/model.hpp"

namespace rolin {

/// Feature matrix with +-1 labels.
struct LabeledDataset {
  Matrix features;
  Vector labels;
  std::vector<std::string> feature_names;
  /// Free-form provenance (file name, label mapping).
  std::string source_meta;
  std::string label_column;
  std::string positive_label;
  std::string negative_label;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dimension() const noexcept { return features.cols(); }

  /// Throws InvalidArgument on shape mismatch, non-finite entries or labels
  /// other than +-1.
  void validate() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

struct CsvOptions {
  std::string label_column;
  /// Label value mapped to +1. Default: the lexicographically larger value.
  std::optional<std::string> positive_label;
};

/// Reads a comma-separated file with a header row. Numeric columns pass
/// through; any other column is expanded into one 0/1 column per distinct
/// value (sorted), named "column=value".
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options);
LabeledDataset parse_csv(std::string_view text, const CsvOptions& options,
                         const std::string& source_name = "<memory>");

/// Encodes an unlabeled CSV against known feature names (as produced by
/// load_csv) for prediction. Dummy columns for unseen categorical values are
/// all-zero; a missing feature column is an error. Other columns (such as
/// the label) are ignored.
Matrix parse_features_for(std::string_view text, std::span<const std::string> feature_names);

/// Seeded uniform train/test split without replacement.
std::pair<LabeledDataset, LabeledDataset> subsample(const LabeledDataset& data,
                                                    std::size_t n_train, std::uint64_t seed);
/// Sorted training indices chosen by subsample for the same arguments.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t n_train,
                                           std::uint64_t seed);

/// Mean of loss(y_i * score(x_i)); zero_one counts margin 0 as an error.
double mean_loss(const LinearModel& model, const LabeledDataset& data, LossKind kind);

/// Sorts, drops `trim_count` values from each end and averages the rest.
double trimmed_mean(std::span<const double> values, std::size_t trim_count);

struct EvalResult {
  std::vector<double> per_repetition_losses;
  double trimmed_mean = 0.0;
  double mean = 0.0;
  std::size_t repetitions = 0;
  std::size_t trim_count = 0;

  /// Aggregates with the requested trim, clamped so that 2 * trim < count.
  static EvalResult from_losses(std::vector<double> losses, std::size_t requested_trim);
};

}  // namespace rolin
