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

#include "fastmap/tensor.hpp"

#include <algorithm>

namespace fastmap::num {

DenseArray matmul(const DenseArray& a, const DenseArray& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    throw ShapeError("matmul: incompatible shapes");
  const int p = a.dim(0), q = a.dim(1), r = b.dim(1);
  DenseArray c({p, r});
  for (int i = 0; i < p; ++i) {
    const double* arow = a.data() + static_cast<std::size_t>(i) * q;
    double* crow = c.data() + static_cast<std::size_t>(i) * r;
    for (int k = 0; k < q; ++k) {
      const double aik = arow[k];
      const double* brow = b.data() + static_cast<std::size_t>(k) * r;
      for (int j = 0; j < r; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

void softmax_rows(DenseArray& a) {
  if (a.rank() != 2) throw ShapeError("softmax_rows: expected 2-D array");
  const int rows = a.dim(0), cols = a.dim(1);
  for (int i = 0; i < rows; ++i) {
    double* row = a.data() + static_cast<std::size_t>(i) * cols;
    const double mx = *std::max_element(row, row + cols);
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (int j = 0; j < cols; ++j) row[j] /= sum;
  }
}

}  // namespace fastmap::num
