// Copyright 2026 The FastMap Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "fastmap/error.hpp"

namespace fastmap {

/// Dense row-major array of doubles with an explicit shape. This is the
/// carrier for BEV features, query/key matrices and decoder outputs; it is a
/// plain value type, not a math library.
class DenseArray {
 public:
  DenseArray() = default;

  explicit DenseArray(std::vector<int> shape, double fill = 0.0)
      : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (int d : shape_) {
      if (d <= 0) throw ShapeError("DenseArray: non-positive dimension");
      n *= static_cast<std::size_t>(d);
    }
    values_.assign(n, fill);
  }

  DenseArray(std::vector<int> shape, std::vector<double> values)
      : shape_(std::move(shape)), values_(std::move(values)) {
    std::size_t n = 1;
    for (int d : shape_) n *= static_cast<std::size_t>(d);
    if (n != values_.size()) throw ShapeError("DenseArray: value count does not match shape");
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(std::size_t i) const { return shape_.at(i); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double& at2(int i, int j) { return values_[idx2(i, j)]; }
  double at2(int i, int j) const { return values_[idx2(i, j)]; }
  double& at3(int i, int j, int k) { return values_[idx3(i, j, k)]; }
  double at3(int i, int j, int k) const { return values_[idx3(i, j, k)]; }

  std::span<double> row(int i) {
    const int cols = shape_.back();
    return {values_.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int i) const {
    const int cols = shape_.back();
    return {values_.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
  }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::size_t idx2(int i, int j) const {
    return static_cast<std::size_t>(i) * shape_[1] + j;
  }
  std::size_t idx3(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k;
  }

  std::vector<int> shape_;
  std::vector<double> values_;
};

namespace num {

/// C = A * B for row-major A (p x q) and B (q x r).
DenseArray matmul(const DenseArray& a, const DenseArray& b);

/// In-place softmax over the last axis of a 2-D array.
void softmax_rows(DenseArray& a);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace num
}  // namespace fastmap
