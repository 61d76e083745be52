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

// Experiment runner: methods x training sizes x repetitions on one dataset,
// aggregated with trimmed means into a JSON report.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rolin/baselines.hpp"
#include "rolin/data.hpp"
#include "rolin/losses.hpp"
#include "rolin/model.hpp"
#include "rolin/robust_cv.hpp"
#include "rolin/solver.hpp"

namespace rolin {

inline constexpr int kReportFormatVersion = 1;

/// Everything needed to fit one method with its own hyperparameter search.
struct TrainingSettings {
  /// Used as-is by rolin; the baselines take folds, instances, seed,
  /// cv_objective, normalize_options and threads from it.
  CVConfig cv;
  std::vector<double> lambda_grid = default_lambda_grid();
  /// Empty means the default range (see BaselineConfig::k_grid).
  std::vector<std::size_t> k_grid;
  SolverConfig solver;

  BaselineConfig baseline(Method method) const;
};

LinearModel train_method(const LabeledDataset& data, Method method, LossKind loss,
                         const TrainingSettings& settings, RobustCVResult* rolin_cv = nullptr);

struct ExperimentSpec {
  std::string data_path;
  CsvOptions csv;
  LossKind loss = LossKind::logistic;
  std::vector<Method> methods{Method::rolin, Method::l1, Method::l2, Method::top_pcs};
  std::vector<std::size_t> train_sizes{15, 30, 50, 100, 200};
  std::size_t repetitions = 50;
  std::size_t trim = 5;
  std::uint64_t base_seed = 0;
  /// Seeds, normalize options and threads inside are overridden per cell.
  TrainingSettings training;
  std::string output_path;

  /// Throws InvalidArgument; `dataset_size` checks the training sizes.
  void validate(std::optional<std::size_t> dataset_size = std::nullopt) const;
};

/// JSON mirroring the benchmark flags. Fields absent from the text keep
/// their defaults.
std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);
/// Applies the fields present in `text` on top of `spec`.
void merge_spec_json(ExperimentSpec& spec, const std::string& text);

struct RepetitionRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  /// FNV-1a of the sorted training indices, hex.
  std::string split_digest;
  bool ok = false;
  std::string error;
  double target_loss = 0.0;
  double zero_one_loss = 0.0;
  HyperParams hyperparams;
  double lambda = 0.0;
};

struct CellReport {
  Method method = Method::rolin;
  std::size_t n = 0;
  /// False when no repetition succeeded.
  bool ok = false;
  std::string failure;
  std::vector<RepetitionRecord> repetitions;
  /// Over successful repetitions only.
  EvalResult target;
  EvalResult zero_one;
};

struct ReportMetadata {
  std::string started_utc;
  std::string finished_utc;
  std::string host;
  std::size_t threads = 0;
  /// "method/n" -> summed wall time of the cell's repetitions.
  std::map<std::string, double> cell_wall_seconds;
};

struct BenchReport {
  int format_version = kReportFormatVersion;
  ExperimentSpec spec;
  /// Ordered by (method as listed in spec.methods, n as listed, repetition).
  std::vector<CellReport> cells;
  ReportMetadata metadata;

  const CellReport* find(Method method, std::size_t n) const;
};

std::string split_digest(const std::vector<std::size_t>& train_indices);

/// Loads spec.data_path and runs. Per-repetition failures are recorded.
BenchReport run_experiment(const ExperimentSpec& spec, std::size_t threads);
/// Runs on an already loaded dataset.
BenchReport run_experiment(const ExperimentSpec& spec, const LabeledDataset& data,
                           std::size_t threads);

std::string report_to_json(const BenchReport& report);
BenchReport report_from_json(const std::string& text);
/// Same as report_to_json without the metadata block and the output path;
/// identical across reruns.
std::string report_numeric_content(const BenchReport& report);

/// One CSV row per method x n: method,n,status,repetitions,trim_count,
/// trimmed_mean,mean,min,max,zero_one_trimmed_mean. Aggregates are
/// recomputed from the stored per-repetition losses.
void render_report_csv(std::ostream& out, const BenchReport& report);

/// Cells whose stored trimmed means disagree with the per-repetition losses.
std::vector<std::string> report_inconsistencies(const BenchReport& report);

}  // namespace rolin
