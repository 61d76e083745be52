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

#include "rolin/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rolin/error.hpp"
#include "rolin/kernels.hpp"
#include "rolin/random.hpp"

namespace rolin {
namespace {

struct Field {
  std::string text;
  bool quoted = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<Field>> rows;
  /// 1-based source line of each row, for diagnostics.
  std::vector<std::size_t> lines;
};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= s.size()) return false;
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

CsvTable parse_table(std::string_view text, const std::string& source) {
  if (!valid_utf8(text)) throw FormatError(source + ": file is not valid UTF-8");
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::vector<Field>> records;
  std::vector<std::size_t> record_lines;
  std::vector<Field> current;
  Field field;
  bool in_quotes = false;
  bool record_has_content = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  const auto finish_field = [&] {
    if (!field.quoted) field.text = std::string(trim(field.text));
    current.push_back(std::move(field));
    field = Field{};
  };
  const auto finish_record = [&] {
    finish_field();
    const bool blank = current.size() == 1 && current[0].text.empty() && !current[0].quoted;
    if (!blank) {
      records.push_back(std::move(current));
      record_lines.push_back(record_line);
    }
    current.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.text.push_back(c);
      }
      continue;
    }
    if (!record_has_content) {
      record_line = line;
      record_has_content = true;
    }
    if (c == '"' && trim(field.text).empty()) {
      field.text.clear();
      field.quoted = true;
      in_quotes = true;
    } else if (c == ',') {
      finish_field();
    } else if (c == '\n') {
      finish_record();
      ++line;
    } else if (c == '\r') {
      // tolerated before \n
    } else {
      field.text.push_back(c);
    }
  }
  if (in_quotes) throw FormatError(source + ": unterminated quoted field");
  if (record_has_content || !field.text.empty() || !current.empty()) finish_record();

  if (records.empty()) throw FormatError(source + ": missing header row");
  CsvTable table;
  for (auto& f : records.front()) table.header.push_back(f.text);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw FormatError(source + ": line " + std::to_string(record_lines[r]) + " has " +
                        std::to_string(records[r].size()) + " fields, header has " +
                        std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
    table.lines.push_back(record_lines[r]);
  }
  return table;
}

bool is_missing(const Field& f) {
  if (f.quoted) return false;
  return f.text.empty() || f.text == "NA" || f.text == "?" || f.text == "NaN" || f.text == "nan";
}

std::optional<double> parse_number(const Field& f) {
  if (f.quoted || f.text.empty()) return std::nullopt;
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::size_t column_index(const CsvTable& table, const std::string& name, const std::string& source) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) throw FormatError(source + ": no column named '" + name + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

void check_missing(const CsvTable& table, const std::string& source) {
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (is_missing(table.rows[r][c])) {
        throw FormatError(source + ": missing value at line " + std::to_string(table.lines[r]) +
                          " (data row " + std::to_string(r + 1) + "), column '" +
                          table.header[c] + "'");
      }
    }
  }
}

}  // namespace

void LabeledDataset::validate() const {
  if (labels.size() != features.rows()) {
    throw InvalidArgument("dataset has " + std::to_string(features.rows()) + " rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  if (!feature_names.empty() && feature_names.size() != features.cols())
    throw InvalidArgument("dataset feature name count does not match its columns");
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw InvalidArgument("dataset contains non-finite feature values");
  }
  for (double y : labels) {
    if (y != 1.0 && y != -1.0) throw InvalidArgument("dataset labels must be +1 or -1");
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.features = features.select_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels.at(i));
  out.feature_names = feature_names;
  out.source_meta = source_meta;
  out.label_column = label_column;
  out.positive_label = positive_label;
  out.negative_label = negative_label;
  return out;
}

LabeledDataset parse_csv(std::string_view text, const CsvOptions& options,
                         const std::string& source) {
  const CsvTable table = parse_table(text, source);
  check_missing(table, source);
  const std::size_t label_col = column_index(table, options.label_column, source);

  std::set<std::string> label_values;
  for (const auto& row : table.rows) label_values.insert(row[label_col].text);
  if (label_values.size() != 2) {
    throw FormatError(source + ": label column '" + options.label_column + "' has " +
                      std::to_string(label_values.size()) + " distinct values, expected exactly 2");
  }
  const std::string positive = options.positive_label.value_or(*label_values.rbegin());
  if (!label_values.contains(positive)) {
    throw InvalidArgument(source + ": positive label '" + positive + "' does not occur in column '" +
                          options.label_column + "'");
  }
  const std::string negative =
      *label_values.begin() == positive ? *label_values.rbegin() : *label_values.begin();

  struct ColumnPlan {
    std::size_t source_col;
    bool numeric;
    std::vector<std::string> categories;
  };
  std::vector<ColumnPlan> plans;
  std::size_t width = 0;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == label_col) continue;
    ColumnPlan plan{c, true, {}};
    for (const auto& row : table.rows) {
      if (!parse_number(row[c])) {
        plan.numeric = false;
        break;
      }
    }
    if (!plan.numeric) {
      std::set<std::string> values;
      for (const auto& row : table.rows) values.insert(row[c].text);
      plan.categories.assign(values.begin(), values.end());
    }
    width += plan.numeric ? 1 : plan.categories.size();
    plans.push_back(std::move(plan));
  }

  LabeledDataset out;
  out.features = Matrix(table.rows.size(), width);
  out.labels.resize(table.rows.size());
  for (const auto& plan : plans) {
    const std::string& name = table.header[plan.source_col];
    if (plan.numeric) {
      out.feature_names.push_back(name);
    } else {
      for (const auto& v : plan.categories) out.feature_names.push_back(name + "=" + v);
    }
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out.labels[r] = row[label_col].text == positive ? 1.0 : -1.0;
    std::size_t col = 0;
    for (const auto& plan : plans) {
      if (plan.numeric) {
        out.features(r, col++) = *parse_number(row[plan.source_col]);
      } else {
        for (const auto& v : plan.categories) {
          out.features(r, col++) = row[plan.source_col].text == v ? 1.0 : 0.0;
        }
      }
    }
  }
  out.label_column = options.label_column;
  out.positive_label = positive;
  out.negative_label = negative;
  out.source_meta = source + "; label '" + options.label_column + "': '" + positive + "' -> +1, '" +
                    negative + "' -> -1";
  return out;
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options, path.filename().string());
}

Matrix parse_features_for(std::string_view text, std::span<const std::string> feature_names) {
  const CsvTable table = parse_table(text, "prediction input");
  struct Source {
    std::size_t col;
    std::optional<std::string> category;
  };
  std::vector<Source> sources;
  for (const auto& name : feature_names) {
    const auto exact = std::find(table.header.begin(), table.header.end(), name);
    if (exact != table.header.end()) {
      sources.push_back({static_cast<std::size_t>(exact - table.header.begin()), std::nullopt});
      continue;
    }
    bool found = false;
    for (std::size_t pos = name.find('='); pos != std::string::npos; pos = name.find('=', pos + 1)) {
      const auto col = std::find(table.header.begin(), table.header.end(), name.substr(0, pos));
      if (col != table.header.end()) {
        sources.push_back({static_cast<std::size_t>(col - table.header.begin()), name.substr(pos + 1)});
        found = true;
        break;
      }
    }
    if (!found) throw FormatError("prediction input: missing feature column '" + name + "'");
  }

  Matrix out(table.rows.size(), feature_names.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const Field& f = table.rows[r][sources[j].col];
      if (is_missing(f)) {
        throw FormatError("prediction input: missing value at line " +
                          std::to_string(table.lines[r]) + ", column '" +
                          table.header[sources[j].col] + "'");
      }
      if (sources[j].category) {
        out(r, j) = f.text == *sources[j].category ? 1.0 : 0.0;
      } else {
        const auto v = parse_number(f);
        if (!v) {
          throw FormatError("prediction input: non-numeric value '" + f.text + "' at line " +
                            std::to_string(table.lines[r]) + ", column '" + feature_names[j] + "'");
        }
        out(r, j) = *v;
      }
    }
  }
  return out;
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t n_train, std::uint64_t seed) {
  if (n_train >= n) {
    throw InvalidArgument("subsample: training size " + std::to_string(n_train) +
                          " must be smaller than the dataset size " + std::to_string(n));
  }
  Rng rng(seed);
  std::vector<std::size_t> perm = rng.permutation(n);
  perm.resize(n_train);
  std::sort(perm.begin(), perm.end());
  return perm;
}

std::pair<LabeledDataset, LabeledDataset> subsample(const LabeledDataset& data,
                                                    std::size_t n_train, std::uint64_t seed) {
  const std::vector<std::size_t> train = subsample_indices(data.size(), n_train, seed);
  std::vector<std::size_t> test;
  test.reserve(data.size() - n_train);
  std::size_t next = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (next < train.size() && train[next] == i) {
      ++next;
    } else {
      test.push_back(i);
    }
  }
  return {data.subset(train), data.subset(test)};
}

double mean_loss(const LinearModel& model, const LabeledDataset& data, LossKind kind) {
  if (model.dimension() != data.dimension()) {
    throw InvalidArgument("mean_loss: model has " + std::to_string(model.dimension()) +
                          " weights, data has " + std::to_string(data.dimension()) + " features");
  }
  if (data.size() == 0) throw InvalidArgument("mean_loss: empty dataset");
  Vector margins(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    margins[i] = data.labels[i] * model.score(data.features.row(i));
  }
  return kernels::loss_sum(kind, margins) / static_cast<double>(data.size());
}

double trimmed_mean(std::span<const double> values, std::size_t trim_count) {
  if (2 * trim_count >= values.size()) {
    throw InvalidArgument("trimmed_mean: cannot drop " + std::to_string(trim_count) +
                          " values from each end of " + std::to_string(values.size()));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (std::size_t i = trim_count; i < sorted.size() - trim_count; ++i) sum += sorted[i];
  return sum / static_cast<double>(sorted.size() - 2 * trim_count);
}

EvalResult EvalResult::from_losses(std::vector<double> losses, std::size_t requested_trim) {
  if (losses.empty()) throw InvalidArgument("EvalResult: no losses");
  EvalResult r;
  r.repetitions = losses.size();
  r.trim_count = std::min(requested_trim, (losses.size() - 1) / 2);
  r.trimmed_mean = rolin::trimmed_mean(losses, r.trim_count);
  double sum = 0.0;
  for (double v : losses) sum += v;
  r.mean = sum / static_cast<double>(losses.size());
  r.per_repetition_losses = std::move(losses);
  return r;
}

}  // namespace rolin
