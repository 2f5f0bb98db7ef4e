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

#include "gestureqa/nn/layers.hpp"

#include <cmath>

namespace gestureqa::nn {

Linear::Linear(ParameterStore& store, const std::string& name, std::int64_t in, std::int64_t out, Rng& rng,
               bool bias) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor w({in, out});
  for (auto& v : w.values()) v = dist(rng);
  weight_ = &store.add(name + ".weight", std::move(w));
  if (bias) bias_ = &store.add(name + ".bias", Tensor({out}));
}

Var Linear::operator()(Graph& g, Var x) const {
  return linear(x, g.parameter(*weight_), bias_ ? g.parameter(*bias_) : Var{});
}

LayerNorm::LayerNorm(ParameterStore& store, const std::string& name, std::int64_t dim)
    : gamma_(&store.add(name + ".gamma", Tensor({dim}, 1.0))), beta_(&store.add(name + ".beta", Tensor({dim}))) {}

Var LayerNorm::operator()(Graph& g, Var x) const {
  return layer_norm(x, g.parameter(*gamma_), g.parameter(*beta_));
}

TransformerBlock::TransformerBlock(ParameterStore& store, const std::string& name,
                                   const TransformerBlockConfig& config, Rng& rng)
    : config_(config),
      norm1_(store, name + ".norm1", config.dim),
      qkv_(store, name + ".attn.qkv", config.dim, 3 * config.dim, rng),
      proj_(store, name + ".attn.proj", config.dim, config.dim, rng),
      norm2_(store, name + ".norm2", config.dim),
      fc1_(store, name + ".mlp.fc1", config.dim, config.mlp_hidden, rng),
      fc2_(store, name + ".mlp.fc2", config.mlp_hidden, config.dim, rng) {}

Var TransformerBlock::operator()(Graph& g, Var x, std::shared_ptr<const WindowPartition> partition) const {
  Var attended = proj_(g, window_attention(qkv_(g, norm1_(g, x)), std::move(partition), config_.heads));
  x = add(x, attended);
  Var mlp = fc2_(g, gelu(fc1_(g, norm2_(g, x))));
  return add(x, mlp);
}

Tensor sinusoidal_positions(std::int64_t count, std::int64_t dim, std::int64_t offset) {
  Tensor pe({count, dim});
  for (std::int64_t p = 0; p < count; ++p) {
    const double pos = static_cast<double>(p + offset);
    for (std::int64_t i = 0; i < dim; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
      pe.at({p, i}) = std::sin(pos * freq);
      if (i + 1 < dim) pe.at({p, i + 1}) = std::cos(pos * freq);
    }
  }
  return pe;
}

Tensor normal_tensor(Shape shape, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace gestureqa::nn
