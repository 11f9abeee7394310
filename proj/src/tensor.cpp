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

#include "advpriv/tensor.hpp"

#include <unordered_set>

#include "advpriv/errors.hpp"

namespace advpriv {

std::string to_string(const Shape& shape) {
  return "[" + std::to_string(shape.rows) + "x" + std::to_string(shape.cols) +
         "]";
}

Tensor::Tensor(Shape s, double fill) : shape(s) {
  if (s.rows <= 0 || s.cols <= 0) {
    throw InvalidShapeError("tensor extents must be positive, got " +
                            to_string(s));
  }
  data.assign(s.size(), fill);
}

Tensor::Tensor(Shape s, std::vector<double> values)
    : shape(s), data(std::move(values)) {
  if (s.rows <= 0 || s.cols <= 0 || data.size() != s.size()) {
    throw InvalidShapeError("tensor of shape " + to_string(s) + " given " +
                            std::to_string(data.size()) + " values");
  }
}

Parameter::Parameter(std::string n, Shape shape)
    : name(std::move(n)), value(shape), grad(shape.size(), 0.0) {}

void Parameter::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void require_unique_names(const ParameterList& params) {
  std::unordered_set<std::string> seen;
  for (const Parameter* p : params) {
    if (!seen.insert(p->name).second) {
      throw InvalidInputError("duplicate parameter name: " + p->name);
    }
  }
}

}  // namespace advpriv
