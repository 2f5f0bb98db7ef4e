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

#include "gestureqa/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gestureqa/error.hpp"

namespace gestureqa::nn {

std::int64_t element_count(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) {
    if (d < 0) throw ContractError("negative dimension in shape " + to_string(shape));
    n *= d;
  }
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(static_cast<std::size_t>(element_count(shape_)), fill) {}

Tensor::Tensor(Shape shape, const std::vector<double>& values)
    : Tensor(std::move(shape), Storage(values.begin(), values.end())) {}

Tensor::Tensor(Shape shape, Storage values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (element_count(shape_) != static_cast<std::int64_t>(values_.size())) {
    throw ContractError("tensor of shape " + to_string(shape_) + " given " + std::to_string(values_.size()) +
                        " values");
  }
}

std::int64_t Tensor::flat_index(std::initializer_list<std::int64_t> index) const {
  if (index.size() != shape_.size()) throw ContractError("index rank mismatch for shape " + to_string(shape_));
  std::int64_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i < 0 || i >= shape_[axis]) throw ContractError("index out of range for shape " + to_string(shape_));
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

double& Tensor::at(std::initializer_list<std::int64_t> index) { return values_[flat_index(index)]; }
double Tensor::at(std::initializer_list<std::int64_t> index) const { return values_[flat_index(index)]; }

Tensor Tensor::reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(Shape shape) && {
  if (element_count(shape) != size()) {
    throw ContractError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  }
  shape_ = std::move(shape);
  return std::move(*this);
}

Tensor Tensor::slice(std::int64_t i) const {
  if (shape_.empty() || i < 0 || i >= shape_[0]) throw ContractError("slice index out of range");
  Shape inner(shape_.begin() + 1, shape_.end());
  const std::int64_t n = element_count(inner);
  return Tensor(inner, Storage(values_.begin() + i * n, values_.begin() + (i + 1) * n));
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Tensor stack(std::span<const Tensor> items) {
  if (items.empty()) throw ContractError("stack of zero tensors");
  Shape shape = items.front().shape();
  shape.insert(shape.begin(), static_cast<std::int64_t>(items.size()));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(element_count(shape)));
  for (const auto& t : items) {
    if (t.shape() != items.front().shape()) {
      throw ContractError("stack: shape " + to_string(t.shape()) + " differs from " +
                          to_string(items.front().shape()));
    }
    values.insert(values.end(), t.values().begin(), t.values().end());
  }
  return Tensor(std::move(shape), std::move(values));
}

}  // namespace gestureqa::nn
