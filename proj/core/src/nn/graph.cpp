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

#include "gestureqa/nn/graph.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "gestureqa/error.hpp"

namespace gestureqa::nn {

const Tensor& Var::value() const { return graph->value(*this); }

Var Graph::constant(Tensor value) { return record(std::move(value), false, nullptr); }

Var Graph::variable(Tensor value) { return record(std::move(value), true, nullptr); }

Var Graph::parameter(const Parameter& p) {
  Node node;
  node.external = &p.value;
  node.param = &p;
  node.needs_grad = true;
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

const Tensor& Graph::value(Var v) const {
  if (v.graph != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw ContractError("variable does not belong to this graph");
  }
  return value(v.id);
}

const Tensor& Graph::value(int id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

Var Graph::record(Tensor value, bool needs_grad, BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad;
  if (needs_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Tensor& Graph::grad_accumulator(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(value(id).shape());
  return n.grad;
}

void Graph::backward(Var root, const Tensor& seed) {
  const Tensor& v = value(root);
  if (seed.size() != v.size()) {
    throw ContractError("backward seed " + to_string(seed.shape()) + " does not match " + to_string(v.shape()));
  }
  for (auto& n : nodes_) n.grad = Tensor();
  if (!nodes_[root.id].needs_grad) return;
  grad_accumulator(root.id).matrix() = seed.reshaped(v.shape()).matrix();
  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, id);
  }
}

void Graph::backward(Var root) {
  if (value(root).size() != 1) throw ContractError("backward() without seed needs a scalar root");
  backward(root, Tensor({1}, 1.0));
}

void Graph::accumulate_parameter_gradients(GradientSet& out) const {
  for (const auto& n : nodes_) {
    if (n.param == nullptr || n.grad.empty()) continue;
    Tensor& dst = out.at(n.param->index);
    if (dst.empty()) dst = Tensor(n.grad.shape());
    dst.matrix() += n.grad.matrix();
  }
}

std::shared_ptr<const WindowPartition> WindowPartition::full(std::int64_t tokens) {
  auto p = std::make_shared<WindowPartition>();
  p->tokens = tokens;
  p->windows.emplace_back(static_cast<std::size_t>(tokens));
  std::iota(p->windows[0].begin(), p->windows[0].end(), 0);
  return p;
}

namespace {

Graph& graph_of(Var v) {
  if (!v.valid()) throw ContractError("invalid variable");
  return *v.graph;
}

void require_same_graph(Var a, Var b) {
  if (b.valid() && a.graph != b.graph) throw ContractError("variables from different graphs");
}

}  // namespace

Var linear(Var x, Var w, Var b) {
  Graph& g = graph_of(x);
  require_same_graph(x, w);
  require_same_graph(x, b);
  const Tensor& X = g.value(x);
  const Tensor& W = g.value(w);
  if (W.rank() != 2 || X.cols() != W.dim(0)) {
    throw ContractError("linear: input " + to_string(X.shape()) + " vs weight " + to_string(W.shape()));
  }
  Shape shape = X.shape();
  shape.back() = W.dim(1);
  Tensor Y(shape);
  Y.matrix().noalias() = X.matrix() * W.matrix();
  if (b.valid()) {
    const Tensor& B = g.value(b);
    if (B.size() != W.dim(1)) throw ContractError("linear: bias size mismatch");
    Y.matrix().rowwise() += B.matrix().row(0);
  }
  const bool needs = g.needs_grad(x.id) || g.needs_grad(w.id) || (b.valid() && g.needs_grad(b.id));
  return g.record(std::move(Y), needs, [xi = x.id, wi = w.id, bi = b.id](Graph& g, int self) {
    const Tensor& dY = g.grad_accumulator(self);
    if (g.needs_grad(xi)) g.grad_accumulator(xi).matrix().noalias() += dY.matrix() * g.value(wi).matrix().transpose();
    if (g.needs_grad(wi)) g.grad_accumulator(wi).matrix().noalias() += g.value(xi).matrix().transpose() * dY.matrix();
    if (bi >= 0 && g.needs_grad(bi)) g.grad_accumulator(bi).matrix().row(0) += dY.matrix().colwise().sum();
  });
}

Var add(Var a, Var b) {
  Graph& g = graph_of(a);
  require_same_graph(a, b);
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  if (A.shape() != B.shape()) throw ContractError("add: " + to_string(A.shape()) + " vs " + to_string(B.shape()));
  Tensor Y = A;
  Y.matrix() += B.matrix();
  return g.record(std::move(Y), g.needs_grad(a.id) || g.needs_grad(b.id), [ai = a.id, bi = b.id](Graph& g, int self) {
    const Tensor& dY = g.grad_accumulator(self);
    if (g.needs_grad(ai)) g.grad_accumulator(ai).matrix() += dY.matrix();
    if (g.needs_grad(bi)) g.grad_accumulator(bi).matrix() += dY.matrix();
  });
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;
}  // namespace

namespace {

// tanh(u) through exp, which Eigen vectorises for doubles.
Eigen::ArrayXd gelu_tanh(const Eigen::ArrayXd& v) {
  const Eigen::ArrayXd u = kGeluC * (v + kGeluA * v.cube());
  return 1.0 - 2.0 / ((2.0 * u).exp() + 1.0);
}

}  // namespace

Var gelu(Var x) {
  Graph& g = graph_of(x);
  const Tensor& X = g.value(x);
  Tensor Y(X.shape());
  const Eigen::Map<const Eigen::ArrayXd> v(X.data(), X.size());
  Eigen::Map<Eigen::ArrayXd>(Y.data(), Y.size()) = 0.5 * v * (1.0 + gelu_tanh(v));
  return g.record(std::move(Y), g.needs_grad(x.id), [xi = x.id](Graph& g, int self) {
    const Tensor& dY = g.grad_accumulator(self);
    const Tensor& X = g.value(xi);
    Tensor& dX = g.grad_accumulator(xi);
    const Eigen::Map<const Eigen::ArrayXd> v(X.data(), X.size());
    const Eigen::ArrayXd t = gelu_tanh(v);
    const Eigen::ArrayXd dt = (1.0 - t.square()) * kGeluC * (1.0 + 3.0 * kGeluA * v.square());
    Eigen::Map<Eigen::ArrayXd>(dX.data(), dX.size()) +=
        Eigen::Map<const Eigen::ArrayXd>(dY.data(), dY.size()) * (0.5 * (1.0 + t) + 0.5 * v * dt);
  });
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  Graph& g = graph_of(x);
  require_same_graph(x, gamma);
  require_same_graph(x, beta);
  const Tensor& X = g.value(x);
  const Tensor& G = g.value(gamma);
  const Tensor& Bt = g.value(beta);
  const std::int64_t rows = X.rows();
  const std::int64_t cols = X.cols();
  if (G.size() != cols || Bt.size() != cols) throw ContractError("layer_norm: affine size mismatch");
  Tensor xhat(X.shape());
  std::vector<double> rstd(static_cast<std::size_t>(rows));
  Tensor Y(X.shape());
  auto xm = X.matrix();
  auto hm = xhat.matrix();
  for (std::int64_t r = 0; r < rows; ++r) {
    const double mean = xm.row(r).mean();
    const double var = (xm.row(r).array() - mean).square().mean();
    const double rs = 1.0 / std::sqrt(var + eps);
    rstd[static_cast<std::size_t>(r)] = rs;
    hm.row(r) = (xm.row(r).array() - mean) * rs;
  }
  Y.matrix() = (hm.array().rowwise() * G.matrix().row(0).array()).rowwise() + Bt.matrix().row(0).array();
  const bool needs = g.needs_grad(x.id) || g.needs_grad(gamma.id) || g.needs_grad(beta.id);
  return g.record(std::move(Y), needs,
                  [xi = x.id, gi = gamma.id, bi = beta.id, xhat = std::move(xhat), rstd = std::move(rstd)](
                      Graph& g, int self) {
                    const auto dY = g.grad_accumulator(self).matrix();
                    const auto H = xhat.matrix();
                    if (g.needs_grad(gi)) {
                      g.grad_accumulator(gi).matrix().row(0) += (dY.array() * H.array()).colwise().sum().matrix();
                    }
                    if (g.needs_grad(bi)) g.grad_accumulator(bi).matrix().row(0) += dY.colwise().sum();
                    if (!g.needs_grad(xi)) return;
                    const auto G = g.value(gi).matrix().row(0).array();
                    auto dX = g.grad_accumulator(xi).matrix();
                    const double inv_n = 1.0 / static_cast<double>(H.cols());
                    for (std::int64_t r = 0; r < H.rows(); ++r) {
                      const Eigen::ArrayXd dh = (dY.row(r).array() * G).transpose();
                      const Eigen::ArrayXd h = H.row(r).transpose().array();
                      const double m1 = dh.sum() * inv_n;
                      const double m2 = (dh * h).sum() * inv_n;
                      dX.row(r).array() += (rstd[static_cast<std::size_t>(r)] * (dh - m1 - h * m2)).transpose();
                    }
                  });
}

Var window_attention(Var qkv, std::shared_ptr<const WindowPartition> partition, int heads) {
  Graph& g = graph_of(qkv);
  const Tensor& QKV = g.value(qkv);
  const std::int64_t n = QKV.rows();
  const std::int64_t c = QKV.cols() / 3;
  if (QKV.cols() != 3 * c || heads < 1 || c % heads != 0) {
    throw ContractError("window_attention: qkv width " + std::to_string(QKV.cols()) + " incompatible with " +
                        std::to_string(heads) + " heads");
  }
  if (!partition || partition->tokens != n) throw ContractError("window_attention: partition token count mismatch");
  const std::int64_t dh = c / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  auto probs = std::make_shared<std::vector<RowMatrix>>();
  probs->reserve(partition->windows.size() * static_cast<std::size_t>(heads));
  Tensor Y({n, c});
  const auto src = QKV.matrix();
  auto out = Y.matrix();
  RowMatrix q, k, v;
  for (const auto& window : partition->windows) {
    const auto m = static_cast<std::int64_t>(window.size());
    q.resize(m, dh);
    k.resize(m, dh);
    v.resize(m, dh);
    for (int h = 0; h < heads; ++h) {
      for (std::int64_t i = 0; i < m; ++i) {
        const auto row = window[static_cast<std::size_t>(i)];
        q.row(i) = src.block(row, h * dh, 1, dh);
        k.row(i) = src.block(row, c + h * dh, 1, dh);
        v.row(i) = src.block(row, 2 * c + h * dh, 1, dh);
      }
      RowMatrix p = (q * k.transpose()) * scale;
      for (std::int64_t i = 0; i < m; ++i) {
        const double mx = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - mx).exp();
        p.row(i) /= p.row(i).sum();
      }
      const RowMatrix o = p * v;
      for (std::int64_t i = 0; i < m; ++i) out.block(window[static_cast<std::size_t>(i)], h * dh, 1, dh) = o.row(i);
      probs->push_back(std::move(p));
    }
  }
  return g.record(std::move(Y), g.needs_grad(qkv.id),
                  [xi = qkv.id, partition, probs, heads, c, dh, scale](Graph& g, int self) {
                    const auto dout = g.grad_accumulator(self).matrix();
                    const auto src = g.value(xi).matrix();
                    auto dsrc = g.grad_accumulator(xi).matrix();
                    RowMatrix q, k, v, dO;
                    std::size_t slot = 0;
                    for (const auto& window : partition->windows) {
                      const auto m = static_cast<std::int64_t>(window.size());
                      q.resize(m, dh);
                      k.resize(m, dh);
                      v.resize(m, dh);
                      dO.resize(m, dh);
                      for (int h = 0; h < heads; ++h) {
                        for (std::int64_t i = 0; i < m; ++i) {
                          const auto row = window[static_cast<std::size_t>(i)];
                          q.row(i) = src.block(row, h * dh, 1, dh);
                          k.row(i) = src.block(row, c + h * dh, 1, dh);
                          v.row(i) = src.block(row, 2 * c + h * dh, 1, dh);
                          dO.row(i) = dout.block(row, h * dh, 1, dh);
                        }
                        const RowMatrix& p = (*probs)[slot++];
                        const RowMatrix dp = dO * v.transpose();
                        const RowMatrix dv = p.transpose() * dO;
                        const Eigen::VectorXd dot = (dp.array() * p.array()).rowwise().sum();
                        const RowMatrix ds = (p.array() * (dp.array().colwise() - dot.array())).matrix() * scale;
                        const RowMatrix dq = ds * k;
                        const RowMatrix dk = ds.transpose() * q;
                        for (std::int64_t i = 0; i < m; ++i) {
                          const auto row = window[static_cast<std::size_t>(i)];
                          dsrc.block(row, h * dh, 1, dh) += dq.row(i);
                          dsrc.block(row, c + h * dh, 1, dh) += dk.row(i);
                          dsrc.block(row, 2 * c + h * dh, 1, dh) += dv.row(i);
                        }
                      }
                    }
                  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows of nothing");
  Graph& g = graph_of(parts.front());
  const std::int64_t cols = g.value(parts.front()).cols();
  std::int64_t rows = 0;
  bool needs = false;
  std::vector<int> ids;
  for (Var p : parts) {
    require_same_graph(parts.front(), p);
    if (g.value(p).cols() != cols) throw ContractError("concat_rows: column mismatch");
    rows += g.value(p).rows();
    needs = needs || g.needs_grad(p.id);
    ids.push_back(p.id);
  }
  Tensor Y({rows, cols});
  std::int64_t at = 0;
  for (Var p : parts) {
    const auto m = g.value(p).matrix();
    Y.matrix().middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return g.record(std::move(Y), needs, [ids = std::move(ids)](Graph& g, int self) {
    const auto dY = g.grad_accumulator(self).matrix();
    std::int64_t at = 0;
    for (int id : ids) {
      const std::int64_t r = g.value(id).rows();
      if (g.needs_grad(id)) g.grad_accumulator(id).matrix() += dY.middleRows(at, r);
      at += r;
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols of nothing");
  Graph& g = graph_of(parts.front());
  const std::int64_t rows = g.value(parts.front()).rows();
  std::int64_t cols = 0;
  bool needs = false;
  std::vector<int> ids;
  for (Var p : parts) {
    require_same_graph(parts.front(), p);
    if (g.value(p).rows() != rows) throw ContractError("concat_cols: row mismatch");
    cols += g.value(p).cols();
    needs = needs || g.needs_grad(p.id);
    ids.push_back(p.id);
  }
  Tensor Y({rows, cols});
  std::int64_t at = 0;
  for (Var p : parts) {
    const auto m = g.value(p).matrix();
    Y.matrix().middleCols(at, m.cols()) = m;
    at += m.cols();
  }
  return g.record(std::move(Y), needs, [ids = std::move(ids)](Graph& g, int self) {
    const auto dY = g.grad_accumulator(self).matrix();
    std::int64_t at = 0;
    for (int id : ids) {
      const std::int64_t c = g.value(id).cols();
      if (g.needs_grad(id)) g.grad_accumulator(id).matrix() += dY.middleCols(at, c);
      at += c;
    }
  });
}

Var slice_rows(Var x, std::int64_t begin, std::int64_t count) {
  Graph& g = graph_of(x);
  const Tensor& X = g.value(x);
  if (begin < 0 || count < 1 || begin + count > X.rows()) throw ContractError("slice_rows out of range");
  Tensor Y({count, X.cols()});
  Y.matrix() = X.matrix().middleRows(begin, count);
  return g.record(std::move(Y), g.needs_grad(x.id), [xi = x.id, begin, count](Graph& g, int self) {
    g.grad_accumulator(xi).matrix().middleRows(begin, count) += g.grad_accumulator(self).matrix();
  });
}

Var mean_row_groups(Var x, std::int64_t group) {
  Graph& g = graph_of(x);
  const Tensor& X = g.value(x);
  if (group < 1 || X.rows() % group != 0) {
    throw ContractError("mean_row_groups: " + std::to_string(X.rows()) + " rows not divisible by " +
                        std::to_string(group));
  }
  const std::int64_t out_rows = X.rows() / group;
  Tensor Y({out_rows, X.cols()});
  const auto xm = X.matrix();
  auto ym = Y.matrix();
  for (std::int64_t r = 0; r < out_rows; ++r) ym.row(r) = xm.middleRows(r * group, group).colwise().mean();
  return g.record(std::move(Y), g.needs_grad(x.id), [xi = x.id, group](Graph& g, int self) {
    const auto dY = g.grad_accumulator(self).matrix();
    auto dX = g.grad_accumulator(xi).matrix();
    const double w = 1.0 / static_cast<double>(group);
    for (std::int64_t r = 0; r < dX.rows(); ++r) dX.row(r) += dY.row(r / group) * w;
  });
}

Var reshape(Var x, Shape shape) {
  Graph& g = graph_of(x);
  Tensor Y = g.value(x).reshaped(std::move(shape));
  return g.record(std::move(Y), g.needs_grad(x.id), [xi = x.id](Graph& g, int self) {
    Tensor& dX = g.grad_accumulator(xi);
    const Tensor& dY = g.grad_accumulator(self);
    for (std::int64_t i = 0; i < dX.size(); ++i) dX[i] += dY[i];
  });
}

Var weighted_sum(Var x, const Tensor& weights) {
  Graph& g = graph_of(x);
  const Tensor& X = g.value(x);
  if (weights.size() != X.size()) throw ContractError("weighted_sum: weight size mismatch");
  double s = 0.0;
  for (std::int64_t i = 0; i < X.size(); ++i) s += X[i] * weights[i];
  return g.record(Tensor({1}, s), g.needs_grad(x.id), [xi = x.id, weights](Graph& g, int self) {
    const double d = g.grad_accumulator(self)[0];
    Tensor& dX = g.grad_accumulator(xi);
    for (std::int64_t i = 0; i < dX.size(); ++i) dX[i] += d * weights[i];
  });
}

}  // namespace gestureqa::nn
