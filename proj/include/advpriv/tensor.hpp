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
#include <span>
#include <string>
#include <vector>

namespace advpriv {

// Row-major 2-D extent. Vectors are rows x 1.
struct Shape {
  int rows = 0;
  int cols = 1;

  std::size_t size() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  bool is_scalar() const { return rows == 1 && cols == 1; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

// Dense array of doubles with an explicit shape; data.size() == shape.size().
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0);
  Tensor(Shape s, std::vector<double> values);

  std::span<double> span() { return data; }
  std::span<const double> span() const { return data; }
  double& at(int r, int c = 0) {
    return data[static_cast<std::size_t>(r) * shape.cols + c];
  }
  double at(int r, int c = 0) const {
    return data[static_cast<std::size_t>(r) * shape.cols + c];
  }
};

// A named trainable tensor with its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  std::vector<double> grad;

  Parameter() = default;
  Parameter(std::string n, Shape shape);

  const Shape& shape() const { return value.shape; }
  void zero_grad();
};

using ParameterList = std::vector<Parameter*>;

// Throws InvalidInputError when two parameters share a name.
void require_unique_names(const ParameterList& params);

}  // namespace advpriv
