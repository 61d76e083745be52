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

#include "rolin/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "json.hpp"

#include "rolin/error.hpp"
#include "rolin/format.hpp"
#include "rolin/parallel.hpp"
#include "rolin/random.hpp"

namespace rolin {

using nlohmann::json;

BaselineConfig TrainingSettings::baseline(Method method) const {
  BaselineConfig b;
  b.method = method;
  b.lambda_grid = lambda_grid;
  b.k_grid = k_grid;
  b.normalize_options = cv.normalize_options;
  b.fold_count = cv.fold_count;
  b.instance_count = cv.instance_count;
  b.seed = cv.seed;
  b.cv_objective = cv.cv_objective;
  b.threads = cv.threads;
  return b;
}

LinearModel train_method(const LabeledDataset& data, Method method, LossKind loss,
                         const TrainingSettings& settings, RobustCVResult* rolin_cv) {
  if (method == Method::rolin) return fit_rolin(data, loss, settings.cv, settings.solver, rolin_cv);
  return cross_validate_baseline(data, loss, settings.baseline(method), settings.solver);
}

void ExperimentSpec::validate(std::optional<std::size_t> dataset_size) const {
  if (methods.empty()) throw InvalidArgument("benchmark: no methods");
  if (train_sizes.empty()) throw InvalidArgument("benchmark: no training sizes");
  if (repetitions < 1) throw InvalidArgument("benchmark: repetitions must be at least 1");
  require_fittable(loss);
  std::set<Method> seen_methods(methods.begin(), methods.end());
  if (seen_methods.size() != methods.size()) throw InvalidArgument("benchmark: duplicate method");
  std::set<std::size_t> seen_sizes(train_sizes.begin(), train_sizes.end());
  if (seen_sizes.size() != train_sizes.size()) {
    throw InvalidArgument("benchmark: duplicate training size");
  }
  for (std::size_t n : train_sizes) {
    if (n < training.cv.fold_count) {
      throw InvalidArgument("benchmark: training size " + std::to_string(n) +
                            " is smaller than the fold count");
    }
    if (dataset_size && n >= *dataset_size) {
      throw InvalidArgument("benchmark: training size " + std::to_string(n) +
                            " must be smaller than the dataset size " +
                            std::to_string(*dataset_size));
    }
  }
  training.cv.validate();
  training.solver.validate();
  for (Method m : methods) {
    if (m != Method::rolin) training.baseline(m).validate();
  }
}

namespace {

json opt_loss(const std::optional<LossKind>& k) {
  return k ? json(std::string(to_string(*k))) : json(nullptr);
}

json spec_json(const ExperimentSpec& s) {
  json methods = json::array();
  for (Method m : s.methods) methods.push_back(std::string(to_string(m)));
  json normalize = json::array();
  for (bool b : s.training.cv.normalize_options) normalize.push_back(b);
  const CVConfig& cv = s.training.cv;
  return json{
      {"data", s.data_path},
      {"label", s.csv.label_column},
      {"positive_label", s.csv.positive_label ? json(*s.csv.positive_label) : json(nullptr)},
      {"loss", std::string(to_string(s.loss))},
      {"methods", methods},
      {"sizes", s.train_sizes},
      {"reps", s.repetitions},
      {"trim", s.trim},
      {"seed", s.base_seed},
      {"cv_objective", opt_loss(cv.cv_objective)},
      {"selection", cv.selection == Selection::robust ? "robust" : "plain"},
      {"theta_ratio", cv.theta_ratio},
      {"theta_slack", cv.theta_slack},
      {"theta_gain", cv.theta_gain},
      {"folds", cv.fold_count},
      {"instances", cv.instance_count},
      {"sigma_grid", cv.sigma_grid},
      {"bmax_grid", cv.bmax_grid},
      {"scale_bmax_with_n", cv.scale_bmax_with_n},
      {"normalize_options", normalize},
      {"lambda_grid", s.training.lambda_grid},
      {"k_grid", s.training.k_grid},
      {"max_iterations", s.training.solver.max_iterations},
      {"gradient_tolerance", s.training.solver.gradient_tolerance},
      {"subspace_ridge_scale", s.training.solver.subspace_ridge_scale},
      {"out", s.output_path},
  };
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("config field '") + key + "': " + e.what());
  }
}

void apply_spec_json(ExperimentSpec& s, const json& j) {
  if (!j.is_object()) throw FormatError("config: expected a JSON object");
  CVConfig& cv = s.training.cv;
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "data") {
      s.data_path = field<std::string>(j, k);
    } else if (key == "label") {
      s.csv.label_column = field<std::string>(j, k);
    } else if (key == "positive_label") {
      s.csv.positive_label = value.is_null() ? std::nullopt
                                             : std::optional(field<std::string>(j, k));
    } else if (key == "loss") {
      s.loss = loss_from_string(field<std::string>(j, k));
    } else if (key == "methods") {
      s.methods.clear();
      for (const auto& m : field<std::vector<std::string>>(j, k)) {
        s.methods.push_back(method_from_string(m));
      }
    } else if (key == "sizes") {
      s.train_sizes = field<std::vector<std::size_t>>(j, k);
    } else if (key == "reps") {
      s.repetitions = field<std::size_t>(j, k);
    } else if (key == "trim") {
      s.trim = field<std::size_t>(j, k);
    } else if (key == "seed") {
      s.base_seed = field<std::uint64_t>(j, k);
    } else if (key == "cv_objective") {
      cv.cv_objective = value.is_null() ? std::nullopt
                                        : std::optional(loss_from_string(field<std::string>(j, k)));
    } else if (key == "selection") {
      const auto sel = field<std::string>(j, k);
      if (sel != "robust" && sel != "plain") {
        throw FormatError("config: selection must be robust or plain");
      }
      cv.selection = sel == "robust" ? Selection::robust : Selection::plain;
    } else if (key == "theta_ratio") {
      cv.theta_ratio = field<double>(j, k);
    } else if (key == "theta_slack") {
      cv.theta_slack = field<double>(j, k);
    } else if (key == "theta_gain") {
      cv.theta_gain = field<double>(j, k);
    } else if (key == "folds") {
      cv.fold_count = field<std::size_t>(j, k);
    } else if (key == "instances") {
      cv.instance_count = field<std::size_t>(j, k);
    } else if (key == "sigma_grid") {
      cv.sigma_grid = field<std::vector<double>>(j, k);
    } else if (key == "bmax_grid") {
      cv.bmax_grid = field<std::vector<double>>(j, k);
    } else if (key == "scale_bmax_with_n") {
      cv.scale_bmax_with_n = field<bool>(j, k);
    } else if (key == "normalize_options") {
      cv.normalize_options = field<std::vector<bool>>(j, k);
    } else if (key == "lambda_grid") {
      s.training.lambda_grid = field<std::vector<double>>(j, k);
    } else if (key == "k_grid") {
      s.training.k_grid = field<std::vector<std::size_t>>(j, k);
    } else if (key == "max_iterations") {
      s.training.solver.max_iterations = field<std::size_t>(j, k);
    } else if (key == "gradient_tolerance") {
      s.training.solver.gradient_tolerance = field<double>(j, k);
    } else if (key == "subspace_ridge_scale") {
      s.training.solver.subspace_ridge_scale = field<double>(j, k);
    } else if (key == "out") {
      s.output_path = field<std::string>(j, k);
    } else {
      throw FormatError("config: unknown field '" + key + "'");
    }
  }
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

// JSON has no NaN or infinity; they are written as null.
double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json eval_json(const EvalResult& e) {
  const auto [lo, hi] =
      std::minmax_element(e.per_repetition_losses.begin(), e.per_repetition_losses.end());
  return json{{"per_repetition_losses", e.per_repetition_losses},
              {"trimmed_mean", e.trimmed_mean},
              {"mean", e.mean},
              {"min", *lo},
              {"max", *hi},
              {"repetitions", e.repetitions},
              {"trim_count", e.trim_count}};
}

EvalResult eval_from_json(const json& j) {
  EvalResult e;
  for (const auto& v : j.at("per_repetition_losses")) e.per_repetition_losses.push_back(number_or_nan(v));
  e.trimmed_mean = number_or_nan(j.at("trimmed_mean"));
  e.mean = number_or_nan(j.at("mean"));
  e.repetitions = j.at("repetitions").get<std::size_t>();
  e.trim_count = j.at("trim_count").get<std::size_t>();
  return e;
}

json cell_json(const CellReport& c) {
  json reps = json::array();
  for (const auto& r : c.repetitions) {
    json row{{"index", r.index}, {"seed", r.seed}, {"split_digest", r.split_digest},
             {"status", r.ok ? "ok" : "failed"}};
    if (r.ok) {
      row["target_loss"] = r.target_loss;
      row["zero_one_loss"] = r.zero_one_loss;
      json hp{{"normalize", r.hyperparams.normalize}};
      if (c.method == Method::rolin || c.method == Method::top_pcs) hp["k"] = r.hyperparams.k;
      if (c.method == Method::rolin) {
        hp["sigma_ratio"] = r.hyperparams.sigma_ratio;
        hp["b_max"] = r.hyperparams.b_max;
      }
      if (c.method == Method::l1 || c.method == Method::l2) hp["lambda"] = r.lambda;
      row["hyperparameters"] = hp;
    } else {
      row["error"] = r.error;
    }
    reps.push_back(std::move(row));
  }
  json out{{"method", std::string(to_string(c.method))},
           {"n", c.n},
           {"status", c.ok ? "ok" : "failed"}};
  if (c.ok) {
    out["target"] = eval_json(c.target);
    out["zero_one"] = eval_json(c.zero_one);
  } else {
    out["reason"] = c.failure;
  }
  out["repetitions"] = std::move(reps);
  return out;
}

CellReport cell_from_json(const json& j) {
  CellReport c;
  c.method = method_from_string(j.at("method").get<std::string>());
  c.n = j.at("n").get<std::size_t>();
  c.ok = j.at("status").get<std::string>() == "ok";
  if (c.ok) {
    c.target = eval_from_json(j.at("target"));
    c.zero_one = eval_from_json(j.at("zero_one"));
  } else {
    c.failure = j.value("reason", "");
  }
  for (const auto& r : j.at("repetitions")) {
    RepetitionRecord rec;
    rec.index = r.at("index").get<std::size_t>();
    rec.seed = r.at("seed").get<std::uint64_t>();
    rec.split_digest = r.at("split_digest").get<std::string>();
    rec.ok = r.at("status").get<std::string>() == "ok";
    if (rec.ok) {
      rec.target_loss = number_or_nan(r.at("target_loss"));
      rec.zero_one_loss = number_or_nan(r.at("zero_one_loss"));
      const json& hp = r.at("hyperparameters");
      rec.hyperparams.normalize = hp.value("normalize", false);
      rec.hyperparams.k = hp.value("k", std::size_t{0});
      rec.hyperparams.sigma_ratio = hp.value("sigma_ratio", 0.0);
      rec.hyperparams.b_max = hp.value("b_max", 0.0);
      rec.lambda = hp.value("lambda", 0.0);
    } else {
      rec.error = r.value("error", "");
    }
    c.repetitions.push_back(std::move(rec));
  }
  return c;
}

json report_body(const BenchReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) cells.push_back(cell_json(c));
  return json{{"format_version", r.format_version}, {"spec", spec_json(r.spec)}, {"cells", cells}};
}

std::string cell_key(Method m, std::size_t n) {
  return std::string(to_string(m)) + "/" + std::to_string(n);
}

}  // namespace

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2) + "\n"; }

ExperimentSpec spec_from_json(const std::string& text) {
  ExperimentSpec s;
  merge_spec_json(s, text);
  return s;
}

void merge_spec_json(ExperimentSpec& spec, const std::string& text) {
  apply_spec_json(spec, parse_json(text, "config"));
}

const CellReport* BenchReport::find(Method method, std::size_t n) const {
  for (const auto& c : cells) {
    if (c.method == method && c.n == n) return &c;
  }
  return nullptr;
}

std::string split_digest(const std::vector<std::size_t>& train_indices) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t idx : train_indices) {
    std::uint64_t v = idx;
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BenchReport run_experiment(const ExperimentSpec& spec, std::size_t threads) {
  if (spec.data_path.empty()) throw InvalidArgument("benchmark: no dataset path");
  return run_experiment(spec, load_csv(spec.data_path, spec.csv), threads);
}

BenchReport run_experiment(const ExperimentSpec& spec, const LabeledDataset& data,
                           std::size_t threads) {
  spec.validate(data.size());
  BenchReport report;
  report.spec = spec;
  report.metadata.started_utc = utc_now();
  report.metadata.host = host_name();
  report.metadata.threads = threads;

  const std::size_t reps = spec.repetitions;
  const std::size_t sizes = spec.train_sizes.size();
  std::vector<std::string> digests(sizes * reps);
  for (std::size_t s = 0; s < sizes; ++s) {
    for (std::size_t r = 0; r < reps; ++r) {
      digests[s * reps + r] =
          split_digest(subsample_indices(data.size(), spec.train_sizes[s], spec.base_seed + r));
    }
  }

  const std::size_t cells = spec.methods.size() * sizes;
  std::vector<RepetitionRecord> records(cells * reps);
  std::vector<double> seconds(cells * reps, 0.0);
  parallel_for(records.size(), threads, [&](std::size_t task) {
    const std::size_t cell = task / reps;
    const std::size_t r = task % reps;
    const Method method = spec.methods[cell / sizes];
    const std::size_t s = cell % sizes;
    RepetitionRecord& rec = records[task];
    rec.index = r;
    rec.seed = spec.base_seed + r;
    rec.split_digest = digests[s * reps + r];
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto [train, test] = subsample(data, spec.train_sizes[s], rec.seed);
      TrainingSettings settings = spec.training;
      settings.cv.seed = derive_seed(rec.seed, 1);
      settings.cv.threads = 1;
      const LinearModel model = train_method(train, method, spec.loss, settings);
      rec.target_loss = mean_loss(model, test, spec.loss);
      rec.zero_one_loss = mean_loss(model, test, LossKind::zero_one);
      rec.hyperparams = model.fitted_hyperparams;
      rec.lambda = model.lambda;
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    seconds[task] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  for (std::size_t cell = 0; cell < cells; ++cell) {
    CellReport c;
    c.method = spec.methods[cell / sizes];
    c.n = spec.train_sizes[cell % sizes];
    std::vector<double> target, zero_one;
    double wall = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      RepetitionRecord& rec = records[cell * reps + r];
      wall += seconds[cell * reps + r];
      if (rec.ok) {
        target.push_back(rec.target_loss);
        zero_one.push_back(rec.zero_one_loss);
      }
      c.repetitions.push_back(std::move(rec));
    }
    if (target.empty()) {
      c.ok = false;
      c.failure = "all repetitions failed; first error: " + c.repetitions.front().error;
    } else {
      c.ok = true;
      c.target = EvalResult::from_losses(std::move(target), spec.trim);
      c.zero_one = EvalResult::from_losses(std::move(zero_one), spec.trim);
    }
    report.metadata.cell_wall_seconds[cell_key(c.method, c.n)] = wall;
    report.cells.push_back(std::move(c));
  }
  report.metadata.finished_utc = utc_now();
  return report;
}

std::string report_to_json(const BenchReport& report) {
  json body = report_body(report);
  body["metadata"] = json{{"started_utc", report.metadata.started_utc},
                          {"finished_utc", report.metadata.finished_utc},
                          {"host", report.metadata.host},
                          {"threads", report.metadata.threads},
                          {"cell_wall_seconds", report.metadata.cell_wall_seconds}};
  return body.dump(2) + "\n";
}

std::string report_numeric_content(const BenchReport& report) {
  json body = report_body(report);
  // Where the report was written is not part of its content.
  body["spec"].erase("out");
  return body.dump(2) + "\n";
}

BenchReport report_from_json(const std::string& text) {
  const json j = parse_json(text, "report");
  try {
    BenchReport r;
    r.format_version = j.at("format_version").get<int>();
    if (r.format_version != kReportFormatVersion) {
      throw FormatError("report: unsupported format_version " + std::to_string(r.format_version));
    }
    apply_spec_json(r.spec, j.at("spec"));
    for (const auto& c : j.at("cells")) r.cells.push_back(cell_from_json(c));
    if (j.contains("metadata")) {
      const json& m = j.at("metadata");
      r.metadata.started_utc = m.value("started_utc", "");
      r.metadata.finished_utc = m.value("finished_utc", "");
      r.metadata.host = m.value("host", "");
      r.metadata.threads = m.value("threads", std::size_t{0});
      if (m.contains("cell_wall_seconds")) {
        r.metadata.cell_wall_seconds =
            m.at("cell_wall_seconds").get<std::map<std::string, double>>();
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

void render_report_csv(std::ostream& out, const BenchReport& report) {
  out << "method,n,status,repetitions,trim_count,trimmed_mean,mean,min,max,"
         "zero_one_trimmed_mean\n";
  for (const auto& c : report.cells) {
    out << to_string(c.method) << ',' << c.n << ',';
    if (!c.ok) {
      out << "failed,0,0,,,,,\n";
      continue;
    }
    const EvalResult t =
        EvalResult::from_losses(c.target.per_repetition_losses, report.spec.trim);
    const EvalResult z =
        EvalResult::from_losses(c.zero_one.per_repetition_losses, report.spec.trim);
    const auto [lo, hi] = std::minmax_element(t.per_repetition_losses.begin(),
                                              t.per_repetition_losses.end());
    out << "ok," << t.repetitions << ',' << t.trim_count << ',' << format_double(t.trimmed_mean)
        << ',' << format_double(t.mean) << ',' << format_double(*lo) << ','
        << format_double(*hi) << ',' << format_double(z.trimmed_mean) << '\n';
  }
}

std::vector<std::string> report_inconsistencies(const BenchReport& report) {
  std::vector<std::string> problems;
  for (const auto& c : report.cells) {
    if (!c.ok) continue;
    for (const auto* e : {&c.target, &c.zero_one}) {
      const EvalResult again = EvalResult::from_losses(e->per_repetition_losses, report.spec.trim);
      if (again.trimmed_mean != e->trimmed_mean || again.trim_count != e->trim_count) {
        problems.push_back(cell_key(c.method, c.n) + ": stored trimmed mean " +
                           format_double(e->trimmed_mean) + " != recomputed " +
                           format_double(again.trimmed_mean));
      }
    }
  }
  return problems;
}

}  // namespace rolin
