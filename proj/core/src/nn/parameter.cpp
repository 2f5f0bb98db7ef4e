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

#include "gestureqa/nn/parameter.hpp"

#include "gestureqa/error.hpp"

namespace gestureqa::nn {

Parameter& ParameterStore::add(std::string name, Tensor init) {
  if (by_name_.contains(name)) throw ContractError("duplicate parameter name '" + name + "'");
  const std::size_t index = params_.size();
  by_name_.emplace(name, index);
  params_.push_back(Parameter{std::move(name), std::move(init), index});
  return params_.back();
}

Parameter* ParameterStore::find(std::string_view name) {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &params_[it->second];
}

const Parameter* ParameterStore::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it == by_name_.end() ? nullptr : &params_[it->second];
}

std::int64_t ParameterStore::element_count() const {
  std::int64_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

GradientSet zero_gradients(const ParameterStore& store) {
  GradientSet grads;
  grads.reserve(store.size());
  for (const auto& p : store) grads.emplace_back(p.value.shape());
  return grads;
}

void add_into(GradientSet& dst, const GradientSet& src) {
  if (dst.size() != src.size()) throw ContractError("gradient set size mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (src[i].empty()) continue;
    dst[i].matrix() += src[i].matrix();
  }
}

}  // namespace gestureqa::nn
