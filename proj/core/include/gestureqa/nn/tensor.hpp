// Copyright 2026 The GestureQA Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gestureqa::nn {

using Shape = std::vector<std::int64_t>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
// Every buffer starts on the widest SIMD boundary, so vectorised reductions
// split the same way no matter where a tensor was allocated.
using Storage = std::vector<double, Eigen::aligned_allocator<double>>;

std::int64_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

// Dense row-major float64 tensor. Rank-N tensors are viewed as matrices of
// [product of leading dims, last dim] by the autograd ops.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, const std::vector<double>& values);
  Tensor(Shape shape, Storage values);
  Tensor(Shape shape, std::initializer_list<double> values) : Tensor(std::move(shape), Storage(values)) {}

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::int64_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  bool empty() const { return values_.empty(); }

  std::int64_t cols() const { return shape_.empty() ? 1 : shape_.back(); }
  std::int64_t rows() const { return cols() == 0 ? 0 : size() / cols(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::int64_t i) { return values_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
  double& at(std::initializer_list<std::int64_t> index);
  double at(std::initializer_list<std::int64_t> index) const;

  MatrixMap matrix() { return {values_.data(), rows(), cols()}; }
  ConstMatrixMap matrix() const { return {values_.data(), rows(), cols()}; }

  // Same data, new shape with an equal element count.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  // Copy of slot `i` along the leading axis, e.g. one batch row.
  Tensor slice(std::int64_t i) const;

  void fill(double v);
  bool all_finite() const;

  bool operator==(const Tensor&) const = default;

 private:
  std::int64_t flat_index(std::initializer_list<std::int64_t> index) const;

  Shape shape_;
  Storage values_;
};

// Stacks equally-shaped tensors along a new leading axis.
Tensor stack(std::span<const Tensor> items);

}  // namespace gestureqa::nn
