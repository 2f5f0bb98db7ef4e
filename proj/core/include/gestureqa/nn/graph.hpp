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
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gestureqa/nn/parameter.hpp"
#include "gestureqa/nn/tensor.hpp"

namespace gestureqa::nn {

class Graph;

// Handle to a node recorded on a Graph.
struct Var {
  Graph* graph = nullptr;
  int id = -1;

  bool valid() const { return graph != nullptr && id >= 0; }
  const Tensor& value() const;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so backward()
// walks them in reverse. A Graph is single-threaded; concurrent work uses one
// graph per thread over shared read-only parameters.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Input without gradient.
  Var constant(Tensor value);
  // Leaf that receives a gradient (used by gradient checks).
  Var variable(Tensor value);
  // Reads the parameter in place; its gradient is harvested with
  // accumulate_parameter_gradients().
  Var parameter(const Parameter& p);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).needs_grad; }
  // Gradient of `v` after backward(); an empty tensor when none flowed.
  const Tensor& grad(Var v) const { return nodes_.at(v.id).grad; }

  void backward(Var root, const Tensor& seed);
  // Seeds with ones; `root` must hold a single element.
  void backward(Var root);

  void accumulate_parameter_gradients(GradientSet& out) const;

  std::size_t node_count() const { return nodes_.size(); }

  // Op plumbing.
  Var record(Tensor value, bool needs_grad, BackwardFn fn);
  const Tensor& value(int id) const;
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  // Gradient accumulator for `id`, zero-initialised on first use.
  Tensor& grad_accumulator(int id);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    const Parameter* param = nullptr;
    Tensor grad;
    BackwardFn backward;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
};

// Token groups that attend only within themselves. A single group spanning
// every token is ordinary full self-attention.
struct WindowPartition {
  std::vector<std::vector<std::int32_t>> windows;
  std::int64_t tokens = 0;

  static std::shared_ptr<const WindowPartition> full(std::int64_t tokens);
};

// y = x W + b for x [N, in], W [in, out], b [out] (b may be invalid).
Var linear(Var x, Var w, Var b);
Var add(Var a, Var b);
Var gelu(Var x);
// Normalises each row over its last dimension.
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
// Multi-head scaled dot-product attention. `qkv` is [N, 3C] holding queries,
// keys and values side by side; output is [N, C].
Var window_attention(Var qkv, std::shared_ptr<const WindowPartition> partition, int heads);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);
Var slice_rows(Var x, std::int64_t begin, std::int64_t count);
// Means over consecutive row groups: [N, C] -> [N / group, C].
Var mean_row_groups(Var x, std::int64_t group);
Var reshape(Var x, Shape shape);
// Scalar sum(x * weights), used as a probe readout.
Var weighted_sum(Var x, const Tensor& weights);

}  // namespace gestureqa::nn
