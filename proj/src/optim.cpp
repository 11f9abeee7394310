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

#include "advpriv/optim.hpp"

#include <cmath>

#include "advpriv/errors.hpp"

namespace advpriv {

Adam::Adam(ParameterList params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  require_unique_names(params_);
  for (const Parameter* p : params_) {
    state_.first_moment.emplace_back(p->value.data.size(), 0.0);
    state_.second_moment.emplace_back(p->value.data.size(), 0.0);
  }
}

void Adam::step() {
  for (const Parameter* p : params_) {
    if (p->grad.size() != p->value.data.size()) {
      throw InvalidShapeError("adam: gradient of " + p->name + " has " +
                              std::to_string(p->grad.size()) +
                              " entries, parameter has " +
                              std::to_string(p->value.data.size()));
    }
  }
  ++state_.step;
  const double t = static_cast<double>(state_.step);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    std::vector<double>& m = state_.first_moment[k];
    std::vector<double>& v = state_.second_moment[k];
    for (std::size_t i = 0; i < p.grad.size(); ++i) {
      const double g = p.grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p.value.data[i] -=
          config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
    p.zero_grad();
  }
}

void Adam::set_state(AdamState state) {
  if (state.first_moment.size() != params_.size() ||
      state.second_moment.size() != params_.size()) {
    throw InvalidShapeError("adam: state covers a different parameter count");
  }
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const std::size_t n = params_[k]->value.data.size();
    if (state.first_moment[k].size() != n ||
        state.second_moment[k].size() != n) {
      throw InvalidShapeError("adam: state shape mismatch for " +
                              params_[k]->name);
    }
  }
  state_ = std::move(state);
}

}  // namespace advpriv
