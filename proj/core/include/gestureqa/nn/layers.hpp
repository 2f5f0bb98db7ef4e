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

#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "gestureqa/nn/graph.hpp"
#include "gestureqa/nn/parameter.hpp"

namespace gestureqa::nn {

using Rng = std::mt19937_64;

// Dense layer with Xavier-uniform weights and zero bias.
class Linear {
 public:
  Linear() = default;
  Linear(ParameterStore& store, const std::string& name, std::int64_t in, std::int64_t out, Rng& rng,
         bool bias = true);

  Var operator()(Graph& g, Var x) const;

  std::int64_t in_features() const { return weight_->value.dim(0); }
  std::int64_t out_features() const { return weight_->value.dim(1); }
  Parameter& weight() const { return *weight_; }
  Parameter* bias() const { return bias_; }

 private:
  Parameter* weight_ = nullptr;
  Parameter* bias_ = nullptr;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterStore& store, const std::string& name, std::int64_t dim);

  Var operator()(Graph& g, Var x) const;

 private:
  Parameter* gamma_ = nullptr;
  Parameter* beta_ = nullptr;
};

struct TransformerBlockConfig {
  std::int64_t dim = 128;
  int heads = 4;
  std::int64_t mlp_hidden = 256;
};

// Pre-norm block: x + Attn(LN(x)), then x + MLP(LN(x)). Attention is
// restricted to the windows of the partition passed to each call.
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(ParameterStore& store, const std::string& name, const TransformerBlockConfig& config, Rng& rng);

  Var operator()(Graph& g, Var x, std::shared_ptr<const WindowPartition> partition) const;

 private:
  TransformerBlockConfig config_;
  LayerNorm norm1_;
  Linear qkv_;
  Linear proj_;
  LayerNorm norm2_;
  Linear fc1_;
  Linear fc2_;
};

// Fixed sine/cosine table [count, dim] for positions offset..offset+count-1.
Tensor sinusoidal_positions(std::int64_t count, std::int64_t dim, std::int64_t offset = 0);

Tensor normal_tensor(Shape shape, double stddev, Rng& rng);

}  // namespace gestureqa::nn
