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

// Internal: entry points of the per-ISA translation units. Kept free of
// inline library code so the AVX2 unit cannot leak wide instructions into
// functions shared with the generic build.

#include "rolin/kernels.hpp"

namespace rolin::kernels::detail {

extern const Table kScalarTable;
double scalar_loss_eval(LossKind kind, const double* margins, double* derivative,
                        std::size_t n);

#if defined(ROLIN_HAVE_AVX2)
extern const Table kAvx2Table;
#endif

#if defined(ROLIN_HAVE_NEON)
extern const Table kNeonTable;
#endif

}  // namespace rolin::kernels::detail
