// Copyright 2026 The advpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "advpriv/tape.hpp"
#include "advpriv/tensor.hpp"

namespace advpriv {

// Builds a scalar loss on a fresh tape from the current parameter values.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
  // Entries whose every probe straddled a ReLU or clamp kink.
  std::size_t entries_skipped = 0;
};

// Central difference stencils. The four-point rule has O(h^4) truncation
// error, which allows a larger h and so less cancellation on tiny gradients.
enum class Stencil { kTwoPoint, kFourPoint };

// Compares backward() against central finite differences for every entry of
// every parameter in `params`. The relative error of one entry is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
//
// A probe whose perturbed forward pass lands on the other side of a kink
// than the base point is retried with h/10 and h/100; if all straddle, the
// entry is counted in entries_skipped instead of being compared.
//
// The builder must be deterministic: a tape that drew a dropout mask, or two
// evaluations at the same point that disagree, raise ContractViolation.
// Parameter values and gradients are restored on return.
GradCheckResult grad_check(const LossBuilder& build,
                           const ParameterList& params, double h = 1e-3,
                           Stencil stencil = Stencil::kFourPoint);

}  // namespace advpriv
