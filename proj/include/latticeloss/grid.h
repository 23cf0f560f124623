// Copyright 2026 The latticeloss Authors. All Rights Reserved.
//
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

#ifndef LATTICELOSS_GRID_H_
#define LATTICELOSS_GRID_H_

#include <cassert>
#include <span>
#include <vector>

namespace latticeloss {

// Dense row-major 2-D array of doubles indexed (row, col).
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        values_(static_cast<std::size_t>(rows) * cols, fill) {}
  Grid(int rows, int cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    assert(values_.size() == static_cast<std::size_t>(rows) * cols);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return values_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

}  // namespace latticeloss

#endif  // LATTICELOSS_GRID_H_
