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

// rolin: train, apply and benchmark robust linear classifiers.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rolin/bench.hpp"
#include "rolin/data.hpp"
#include "rolin/error.hpp"
#include "rolin/format.hpp"
#include "rolin/model_io.hpp"
#include "rolin/parallel.hpp"
#include "rolin/robust_cv.hpp"

namespace {

using namespace rolin;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Flags shared by train and benchmark that shape the hyperparameter search.
struct SearchFlags {
  std::string cv_objective;
  bool plain_cv = false;
  std::optional<double> theta_ratio, theta_slack, theta_gain;
  std::optional<std::size_t> folds, instances, max_iterations;
  std::optional<double> subspace_ridge;
  std::vector<double> lambda_grid;
  std::vector<std::size_t> k_grid;

  void add_to(CLI::App& app) {
    app.add_option("--cv-objective", cv_objective,
                   "Loss scored on holdout folds (default: the fitted loss; zero_one for "
                   "double-loss selection)");
    app.add_flag("--plain-cv", plain_cv, "Select rolin hyperparameters by mean holdout loss only");
    app.add_option("--theta-ratio", theta_ratio, "Holdout/training loss ratio threshold");
    app.add_option("--theta-slack", theta_slack, "Near-minimum cost slack");
    app.add_option("--theta-gain", theta_gain, "Required gain over the top-components fit");
    app.add_option("--folds", folds, "Cross-validation folds");
    app.add_option("--instances", instances, "Cross-validation shuffles");
    app.add_option("--max-iterations", max_iterations, "Solver iteration limit");
    app.add_option("--subspace-ridge", subspace_ridge,
                   "Ridge scale for the top-components fit (divided by n; 0 disables)");
    app.add_option("--lambda-grid", lambda_grid, "Penalties tried by l1/l2")->delimiter(',');
    app.add_option("--k-grid", k_grid, "Component counts tried by top_pcs")->delimiter(',');
  }

  void apply(TrainingSettings& t) const {
    if (!cv_objective.empty()) t.cv.cv_objective = loss_from_string(cv_objective);
    if (plain_cv) t.cv.selection = Selection::plain;
    if (theta_ratio) t.cv.theta_ratio = *theta_ratio;
    if (theta_slack) t.cv.theta_slack = *theta_slack;
    if (theta_gain) t.cv.theta_gain = *theta_gain;
    if (folds) t.cv.fold_count = *folds;
    if (instances) t.cv.instance_count = *instances;
    if (max_iterations) t.solver.max_iterations = *max_iterations;
    if (subspace_ridge) t.solver.subspace_ridge_scale = *subspace_ridge;
    if (!lambda_grid.empty()) t.lambda_grid = lambda_grid;
    if (!k_grid.empty()) t.k_grid = k_grid;
  }
};

struct TrainArgs {
  std::string data, label, positive_label, loss = "logistic", method = "rolin", out,
      diagnostics;
  std::uint64_t seed = 0;
  SearchFlags search;
};

int run_train(const TrainArgs& a) {
  CsvOptions csv{a.label, std::nullopt};
  if (!a.positive_label.empty()) csv.positive_label = a.positive_label;
  const LabeledDataset data = load_csv(a.data, csv);
  TrainingSettings settings;
  a.search.apply(settings);
  settings.cv.seed = a.seed;
  settings.cv.threads = default_thread_count();
  const LossKind loss = loss_from_string(a.loss);
  const Method method = method_from_string(a.method);
  RobustCVResult cv;
  const LinearModel model = train_method(data, method, loss, settings, &cv);
  save_model(model, a.out);
  if (!a.diagnostics.empty()) {
    if (method != Method::rolin) throw InvalidArgument("--diagnostics is only available for rolin");
    std::ofstream out(a.diagnostics);
    if (!out) throw Error("cannot open '" + a.diagnostics + "' for writing");
    write_diagnostics_csv(out, cv.diagnostics);
  }
  const auto& hp = model.fitted_hyperparams;
  std::cerr << "trained " << a.method << " on " << data.size() << " rows, " << data.dimension()
            << " features";
  if (method == Method::rolin) {
    std::cerr << " (k=" << hp.k << " sigma_ratio=" << format_double(hp.sigma_ratio)
              << " b_max=" << format_double(hp.b_max) << " normalize=" << hp.normalize << ")";
  } else if (method == Method::top_pcs) {
    std::cerr << " (k=" << hp.k << " normalize=" << hp.normalize << ")";
  } else {
    std::cerr << " (lambda=" << format_double(model.lambda) << " normalize=" << hp.normalize << ")";
  }
  std::cerr << "\n";
  return 0;
}

struct PredictArgs {
  std::string model, data, out;
};

int run_predict(const PredictArgs& a) {
  const LinearModel model = load_model(a.model);
  if (model.feature_names.empty()) throw FormatError("model file lists no feature names");
  const Matrix x = parse_features_for(read_file(a.data), model.feature_names);
  const Vector scores = model.scores(x);
  const std::string pos = model.positive_label.empty() ? "1" : model.positive_label;
  const std::string neg = model.negative_label.empty() ? "-1" : model.negative_label;
  std::ostringstream out;
  out << "score,label\n";
  // A score of exactly 0 is on the boundary; it is reported as the negative class.
  for (double s : scores) out << format_double(s) << ',' << (s > 0 ? pos : neg) << '\n';
  if (a.out.empty() || a.out == "-") {
    std::cout << out.str();
  } else {
    write_file(a.out, out.str());
  }
  return 0;
}

struct BenchArgs {
  std::string config, data, label, positive_label, loss, methods, out;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> reps, trim;
  std::optional<std::uint64_t> seed;
  SearchFlags search;
};

int run_benchmark(const BenchArgs& a) {
  ExperimentSpec spec;
  if (!a.config.empty()) merge_spec_json(spec, read_file(a.config));
  if (!a.data.empty()) spec.data_path = a.data;
  if (!a.label.empty()) spec.csv.label_column = a.label;
  if (!a.positive_label.empty()) spec.csv.positive_label = a.positive_label;
  if (!a.loss.empty()) spec.loss = loss_from_string(a.loss);
  if (!a.methods.empty()) {
    spec.methods.clear();
    for (const auto& m : split_list(a.methods)) spec.methods.push_back(method_from_string(m));
  }
  if (!a.sizes.empty()) spec.train_sizes = a.sizes;
  if (a.reps) spec.repetitions = *a.reps;
  if (a.trim) spec.trim = *a.trim;
  if (a.seed) spec.base_seed = *a.seed;
  if (!a.out.empty()) spec.output_path = a.out;
  a.search.apply(spec.training);
  if (spec.output_path.empty()) throw InvalidArgument("benchmark: no output path (--out)");
  if (spec.csv.label_column.empty()) throw InvalidArgument("benchmark: no label column (--label)");

  const BenchReport report = run_experiment(spec, default_thread_count());
  write_file(spec.output_path, report_to_json(report));
  std::size_t failed = 0;
  for (const auto& c : report.cells) failed += c.ok ? 0 : 1;
  std::cerr << "wrote " << report.cells.size() << " cells to " << spec.output_path;
  if (failed) std::cerr << " (" << failed << " failed)";
  std::cerr << "\n";
  return 0;
}

struct ReportArgs {
  std::string report, out;
};

int run_report(const ReportArgs& a) {
  const BenchReport report = report_from_json(read_file(a.report));
  const auto problems = report_inconsistencies(report);
  if (!problems.empty()) throw FormatError("report is inconsistent: " + problems.front());
  std::ostringstream out;
  render_report_csv(out, report);
  if (a.out.empty() || a.out == "-") {
    std::cout << out.str();
  } else {
    write_file(a.out, out.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust linear classification for small training sets"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Fit one method and write a model file");
  t->add_option("--data", train.data, "Training CSV")->required();
  t->add_option("--label", train.label, "Label column")->required();
  t->add_option("--positive-label", train.positive_label, "Label value mapped to +1");
  t->add_option("--loss", train.loss, "logistic, hinge, squared_hinge or modified_huber");
  t->add_option("--method", train.method, "rolin, l1, l2 or top_pcs");
  t->add_option("--seed", train.seed, "Cross-validation seed");
  t->add_option("--out", train.out, "Model file")->required();
  t->add_option("--diagnostics", train.diagnostics, "Write rolin's CV table to this CSV");
  train.search.add_to(*t);

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Score a CSV with a model file");
  p->add_option("--model", predict.model, "Model file")->required();
  p->add_option("--data", predict.data, "CSV with the model's feature columns")->required();
  p->add_option("--out", predict.out, "Output CSV (default: stdout)");

  BenchArgs bench;
  auto* b = app.add_subcommand("benchmark", "Run the repeated-subsampling experiment");
  b->add_option("--config", bench.config, "JSON file with any of the flags below");
  b->add_option("--data", bench.data, "Dataset CSV");
  b->add_option("--label", bench.label, "Label column");
  b->add_option("--positive-label", bench.positive_label, "Label value mapped to +1");
  b->add_option("--loss", bench.loss, "Fitted and evaluated loss");
  b->add_option("--methods", bench.methods, "Comma-separated methods");
  b->add_option("--sizes", bench.sizes, "Comma-separated training sizes")->delimiter(',');
  b->add_option("--reps", bench.reps, "Repetitions per cell");
  b->add_option("--trim", bench.trim, "Repetitions dropped from each end");
  b->add_option("--seed", bench.seed, "Base seed");
  b->add_option("--out", bench.out, "Report file");
  bench.search.add_to(*b);

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Summarize a report as CSV");
  r->add_option("report,--report", rep.report, "Report file")->required();
  r->add_option("--out", rep.out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*t) return run_train(train);
    if (*p) return run_predict(predict);
    if (*b) return run_benchmark(bench);
    if (*r) return run_report(rep);
  } catch (const std::exception& e) {
    std::cerr << "rolin: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
