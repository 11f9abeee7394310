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

#include "advpriv/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "advpriv/errors.hpp"

namespace advpriv {

namespace {

struct Evaluation {
  double value;
  std::uint64_t kinks;
};

Evaluation evaluate(const LossBuilder& build) {
  Tape tape;
  const Var loss = build(tape);
  if (tape.stochastic()) {
    throw ContractViolation("grad_check: loss builder uses dropout");
  }
  return {tape.scalar_value(loss), tape.kink_signature()};
}

}  // namespace

GradCheckResult grad_check(const LossBuilder& build,
                           const ParameterList& params, double h,
                           Stencil stencil) {
  if (!(h > 0.0)) throw ContractViolation("grad_check: h must be positive");

  std::vector<std::vector<double>> saved_grads;
  saved_grads.reserve(params.size());
  for (Parameter* p : params) {
    saved_grads.push_back(p->grad);
    p->zero_grad();
  }

  Evaluation base{};
  {
    Tape tape;
    const Var loss = build(tape);
    if (tape.stochastic()) {
      throw ContractViolation("grad_check: loss builder uses dropout");
    }
    base = {tape.scalar_value(loss), tape.kink_signature()};
    tape.backward(loss);
  }
  const Evaluation again = evaluate(build);
  if (again.value != base.value || again.kinks != base.kinks) {
    throw ContractViolation("grad_check: loss builder is not deterministic");
  }

  GradCheckResult result;
  for (Parameter* param : params) {
    Parameter& p = *param;
    for (std::size_t i = 0; i < p.value.data.size(); ++i) {
      const double original = p.value.data[i];
      std::optional<double> numeric;
      for (double step = h; step >= h * 1e-2 && !numeric; step *= 0.1) {
        bool smooth = true;
        auto at = [&](double offset) {
          p.value.data[i] = original + offset;
          const Evaluation e = evaluate(build);
          smooth = smooth && e.kinks == base.kinks;
          return e.value;
        };
        double estimate = 0.0;
        if (stencil == Stencil::kTwoPoint) {
          estimate = (at(step) - at(-step)) / (2.0 * step);
        } else {
          const double near = at(step) - at(-step);
          const double far = at(2.0 * step) - at(-2.0 * step);
          estimate = (8.0 * near - far) / (12.0 * step);
        }
        if (smooth) numeric = estimate;
      }
      p.value.data[i] = original;
      if (!numeric) {
        ++result.entries_skipped;
        continue;
      }

      const double analytic = p.grad[i];
      const double denom =
          std::max({std::abs(analytic), std::abs(*numeric), 1e-8});
      const double rel = std::abs(analytic - *numeric) / denom;
      ++result.entries_checked;
      if (rel > result.max_relative_error || std::isnan(rel)) {
        result.max_relative_error = rel;
        result.worst_parameter = p.name;
        result.worst_index = i;
        result.analytic = analytic;
        result.numeric = *numeric;
      }
    }
  }

  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k]->grad = std::move(saved_grads[k]);
  }
  return result;
}

}  // namespace advpriv
