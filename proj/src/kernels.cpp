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

#include "advpriv/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace advpriv::kernels {

namespace serial {

void matvec(std::span<const double> w, int rows, int cols,
            std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < rows; ++i) {
    const double* wr = w.data() + static_cast<std::size_t>(i) * cols;
    double acc = 0.0;
    for (int j = 0; j < cols; ++j) acc += wr[j] * x[j];
    y[i] = acc;
  }
}

void matvec_transpose_acc(std::span<const double> w, int rows, int cols,
                          std::span<const double> g, std::span<double> dx) {
  for (int i = 0; i < rows; ++i) {
    const double* wr = w.data() + static_cast<std::size_t>(i) * cols;
    const double gi = g[i];
    for (int j = 0; j < cols; ++j) dx[j] += wr[j] * gi;
  }
}

void outer_acc(std::span<const double> g, std::span<const double> x,
               int rows, int cols, std::span<double> dw) {
  for (int i = 0; i < rows; ++i) {
    double* dr = dw.data() + static_cast<std::size_t>(i) * cols;
    const double gi = g[i];
    for (int j = 0; j < cols; ++j) dr[j] += gi * x[j];
  }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace serial

namespace {
bool big(int rows, int cols) {
  return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) >=
         kParallelThreshold;
}
}  // namespace

void matvec(std::span<const double> w, int rows, int cols,
            std::span<const double> x, std::span<double> y) {
#pragma omp parallel for schedule(static) if (big(rows, cols))
  for (int i = 0; i < rows; ++i) {
    const double* wr = w.data() + static_cast<std::size_t>(i) * cols;
    double acc = 0.0;
    for (int j = 0; j < cols; ++j) acc += wr[j] * x[j];
    y[i] = acc;
  }
}

void matvec_transpose_acc(std::span<const double> w, int rows, int cols,
                          std::span<const double> g, std::span<double> dx) {
  // Column blocks are independent; inside a block rows are visited in order,
  // matching the serial accumulation sequence for every dx[j].
  constexpr int kBlock = 64;
  const int blocks = (cols + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static) if (big(rows, cols))
  for (int b = 0; b < blocks; ++b) {
    const int j0 = b * kBlock;
    const int j1 = std::min(cols, j0 + kBlock);
    for (int i = 0; i < rows; ++i) {
      const double* wr = w.data() + static_cast<std::size_t>(i) * cols;
      const double gi = g[i];
      for (int j = j0; j < j1; ++j) dx[j] += wr[j] * gi;
    }
  }
}

void outer_acc(std::span<const double> g, std::span<const double> x,
               int rows, int cols, std::span<double> dw) {
#pragma omp parallel for schedule(static) if (big(rows, cols))
  for (int i = 0; i < rows; ++i) {
    double* dr = dw.data() + static_cast<std::size_t>(i) * cols;
    const double gi = g[i];
    for (int j = 0; j < cols; ++j) dr[j] += gi * x[j];
  }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace advpriv::kernels
