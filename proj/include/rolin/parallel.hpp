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
#include <functional>

namespace rolin {

/// Worker count from ROLIN_THREADS, else the hardware concurrency (min 1).
std::size_t default_thread_count();

/// Runs body(0..count-1) on up to `threads` workers. Indices are handed out
/// from a shared counter; callers write results by index so the outcome does
/// not depend on scheduling. The first exception thrown is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace rolin
