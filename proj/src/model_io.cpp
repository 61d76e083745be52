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

#include "rolin/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "rolin/error.hpp"
#include "rolin/format.hpp"

namespace rolin {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) throw FormatError("model: dangling escape");
    switch (s[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: throw FormatError(std::string("model: unknown escape \\") + s[i]);
    }
  }
  return out;
}

std::string join_numbers(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

Vector split_numbers(std::string_view s) {
  Vector out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t end = std::min(s.find(' ', pos), s.size());
    if (end > pos) out.push_back(parse_double(s.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

std::vector<std::string> split_names(std::string_view s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find('\t', pos);
    out.push_back(unescape(s.substr(pos, end == std::string_view::npos ? s.npos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw FormatError("model: expected true or false, got '" + std::string(s) + "'");
}

std::size_t parse_size(std::string_view s) {
  const double v = parse_double(s);
  if (!(v >= 0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw FormatError("model: expected a nonnegative integer, got '" + std::string(s) + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string serialize_model(const LinearModel& m) {
  std::ostringstream out;
  out << "# rolin linear model\n";
  out << "format_version = " << kModelFormatVersion << '\n';
  out << "method = " << to_string(m.method) << '\n';
  out << "loss = " << to_string(m.loss_kind) << '\n';
  out << "intercept = " << format_double(m.intercept) << '\n';
  out << "weights = " << join_numbers(m.weights) << '\n';
  out << "k = " << m.fitted_hyperparams.k << '\n';
  out << "sigma_ratio = " << format_double(m.fitted_hyperparams.sigma_ratio) << '\n';
  out << "b_max = " << format_double(m.fitted_hyperparams.b_max) << '\n';
  out << "normalize = " << (m.fitted_hyperparams.normalize ? "true" : "false") << '\n';
  out << "lambda = " << format_double(m.lambda) << '\n';
  out << "standardized = " << (m.normalization ? "true" : "false") << '\n';
  if (m.normalization) {
    out << "norm_mean = " << join_numbers(m.normalization->mean) << '\n';
    out << "norm_scale = " << join_numbers(m.normalization->scale) << '\n';
  }
  std::string names;
  for (std::size_t i = 0; i < m.feature_names.size(); ++i) {
    if (i) names += '\t';
    names += escape(m.feature_names[i]);
  }
  out << "feature_names = " << names << '\n';
  out << "label_column = " << escape(m.label_column) << '\n';
  out << "positive_label = " << escape(m.positive_label) << '\n';
  out << "negative_label = " << escape(m.negative_label) << '\n';
  return out.str();
}

LinearModel parse_model(std::string_view text) {
  std::map<std::string, std::string, std::less<>> fields;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find(" =");
    if (eq == std::string_view::npos) {
      throw FormatError("model line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(line.substr(0, eq));
    std::string_view value = line.substr(eq + 2);
    if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    if (!fields.emplace(key, std::string(value)).second) {
      throw FormatError("model line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  const auto get = [&](std::string_view key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw FormatError("model: missing field '" + std::string(key) + "'");
    return it->second;
  };

  if (get("format_version") != std::to_string(kModelFormatVersion)) {
    throw FormatError("model: unsupported format_version " + get("format_version"));
  }
  LinearModel m;
  m.method = method_from_string(get("method"));
  m.loss_kind = loss_from_string(get("loss"));
  m.intercept = parse_double(get("intercept"));
  m.weights = split_numbers(get("weights"));
  m.fitted_hyperparams.k = parse_size(get("k"));
  m.fitted_hyperparams.sigma_ratio = parse_double(get("sigma_ratio"));
  m.fitted_hyperparams.b_max = parse_double(get("b_max"));
  m.fitted_hyperparams.normalize = parse_bool(get("normalize"));
  m.lambda = parse_double(get("lambda"));
  if (parse_bool(get("standardized"))) {
    FeatureScaling s;
    s.mean = split_numbers(get("norm_mean"));
    s.scale = split_numbers(get("norm_scale"));
    if (s.mean.size() != m.weights.size() || s.scale.size() != m.weights.size()) {
      throw FormatError("model: standardization length does not match weights");
    }
    m.normalization = std::move(s);
  }
  m.feature_names = split_names(get("feature_names"));
  if (!m.feature_names.empty() && m.feature_names.size() != m.weights.size()) {
    throw FormatError("model: feature_names length does not match weights");
  }
  m.label_column = unescape(get("label_column"));
  m.positive_label = unescape(get("positive_label"));
  m.negative_label = unescape(get("negative_label"));
  return m;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << serialize_model(model);
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace rolin
