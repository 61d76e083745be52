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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rolin/model.hpp"

namespace rolin {

inline constexpr int kModelFormatVersion = 1;

/// Line-oriented "key = value" text. Numbers use the shortest round-trip
/// form, so load(save(m)) == m exactly. Lists are space separated; feature
/// names are tab separated with \t, \n and \\ escaped.
std::string serialize_model(const LinearModel& model);
LinearModel parse_model(std::string_view text);

void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace rolin
