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

#include <cstdint>
#include <vector>

#include "advpriv/tensor.hpp"

namespace advpriv {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators, index-aligned with the optimizer's parameter list.
struct AdamState {
  std::int64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// Bias-corrected Adam without clipping or weight decay.
class Adam {
 public:
  explicit Adam(ParameterList params, AdamConfig config = {});

  // Applies one update from the accumulated gradients, then zeroes them.
  // Throws InvalidShapeError if a gradient does not match its parameter.
  void step();

  const AdamConfig& config() const { return config_; }
  const AdamState& state() const { return state_; }
  // Throws InvalidShapeError if the moments do not fit the parameters.
  void set_state(AdamState state);
  const ParameterList& parameters() const { return params_; }

 private:
  ParameterList params_;
  AdamConfig config_;
  AdamState state_;
};

}  // namespace advpriv
