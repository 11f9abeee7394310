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

// Binary container shared by the main and attacker checkpoints.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "advpriv/tensor.hpp"

namespace advpriv::detail {

struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<double> data;
};

std::string pack_container(std::string_view format, nlohmann::json meta,
                           const std::vector<NamedArray>& arrays);

struct Unpacked {
  nlohmann::json meta;
  std::vector<NamedArray> arrays;

  // Throws ParseError when the array is missing or has another shape.
  const NamedArray& find(std::string_view name, Shape shape) const;
};

// Throws ParseError for a bad magic, version, format or truncated payload.
Unpacked unpack_container(std::string_view bytes, std::string_view format);

// Writes through a temporary file and a rename so readers never observe a
// partial file. Throws IoError.
void write_file_atomic(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

void store(std::vector<NamedArray>& out, const Parameter& p);
void restore(const Unpacked& in, Parameter& p);

}  // namespace advpriv::detail
