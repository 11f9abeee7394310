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

// Dense linear-algebra kernels used by the tape. Each kernel has an OpenMP
// version (the default entry point) and a serial reference in
// advpriv::kernels::serial. Both walk the reduction dimension in the same
// order, so their results are bit-identical for any thread count.
namespace advpriv::kernels {

// Work size (rows * cols) below which the OpenMP versions stay serial.
inline constexpr std::size_t kParallelThreshold = 1 << 14;

// y = W x, W is rows x cols row-major.
void matvec(std::span<const double> w, int rows, int cols,
            std::span<const double> x, std::span<double> y);

// dx += W^T g
void matvec_transpose_acc(std::span<const double> w, int rows, int cols,
                          std::span<const double> g, std::span<double> dx);

// dW += g x^T
void outer_acc(std::span<const double> g, std::span<const double> x,
               int rows, int cols, std::span<double> dw);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

namespace serial {

void matvec(std::span<const double> w, int rows, int cols,
            std::span<const double> x, std::span<double> y);
void matvec_transpose_acc(std::span<const double> w, int rows, int cols,
                          std::span<const double> g, std::span<double> dx);
void outer_acc(std::span<const double> g, std::span<const double> x,
               int rows, int cols, std::span<double> dw);
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace serial

// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

}  // namespace advpriv::kernels
