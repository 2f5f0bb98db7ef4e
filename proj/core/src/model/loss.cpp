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

#include "gestureqa/model/loss.hpp"

#include <cmath>
#include <numeric>

#include "gestureqa/error.hpp"

namespace gestureqa::model {
namespace {

void check_pair(std::span<const double> p, std::span<const double> t) {
  if (p.size() != t.size()) throw ContractError("loss: prediction and target lengths differ");
  if (p.size() < 2) throw ContractError("loss: needs at least two scores (covariance undefined)");
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments moments(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  Moments m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(ss / n);
  return m;
}

}  // namespace

std::vector<double> normalize_scores(std::span<const double> v, double eps) {
  if (v.size() < 2) throw ContractError("normalize_scores needs at least two values");
  const Moments m = moments(v);
  const double scale = std::sqrt(m.stddev * m.stddev + eps * eps);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - m.mean) / scale;
  return out;
}

double plcc_loss(std::span<const double> predicted, std::span<const double> target) {
  return plcc_loss_with_grad(predicted, target).loss;
}

LossGradient plcc_loss_with_grad(std::span<const double> predicted, std::span<const double> target) {
  check_pair(predicted, target);
  const std::size_t n = predicted.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Moments pm = moments(predicted);
  const double s = std::sqrt(pm.stddev * pm.stddev + kNormalizeEps * kNormalizeEps);
  const auto ph = normalize_scores(predicted);
  const auto th = normalize_scores(target);

  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) r += ph[i] * th[i];
  r *= inv_n;

  double mse_direct = 0.0;
  double mse_scaled = 0.0;
  double cross = 0.0;  // sum_j (r p^_j - t^_j) p^_j
  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = ph[i] - th[i];
    const double d2 = r * ph[i] - th[i];
    mse_direct += d1 * d1;
    mse_scaled += d2 * d2;
    cross += d2 * ph[i];
  }
  LossGradient out;
  out.loss = (mse_direct + mse_scaled) * inv_n / 8.0;

  // Gradient with respect to p^, including the dependence of r on p^.
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double direct = 2.0 * inv_n * (ph[i] - th[i]);
    const double scaled = 2.0 * inv_n * (r * (r * ph[i] - th[i]) + th[i] * inv_n * cross);
    g[i] = (direct + scaled) / 8.0;
  }
  // Chain through p^ = (p - mean) / s with s = sqrt(var + eps^2).
  const double g_mean = std::accumulate(g.begin(), g.end(), 0.0) * inv_n;
  double g_dot_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) g_dot_d += g[i] * (predicted[i] - pm.mean);
  out.grad.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d_k = predicted[k] - pm.mean;
    out.grad[k] = (g[k] - g_mean) / s - d_k * g_dot_d * inv_n / (s * s * s);
  }
  return out;
}

namespace {

LossGradient mse_with_grad(std::span<const double> p, std::span<const double> t) {
  check_pair(p, t);
  LossGradient out;
  out.grad.resize(p.size());
  const double inv_n = 1.0 / static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    out.loss += d * d * inv_n;
    out.grad[i] = 2.0 * d * inv_n;
  }
  return out;
}

}  // namespace

double total_loss(const nn::Tensor& predicted, const nn::Tensor& target, LossKind kind) {
  return total_loss_with_grad(predicted, target, kind).loss;
}

LossGradient total_loss_with_grad(const nn::Tensor& predicted, const nn::Tensor& target, LossKind kind) {
  if (predicted.shape() != target.shape() || predicted.rank() != 2) {
    throw ContractError("total_loss: expects matching (B, dims) tensors, got " + nn::to_string(predicted.shape()) +
                        " and " + nn::to_string(target.shape()));
  }
  const std::int64_t rows = predicted.dim(0);
  const std::int64_t dims = predicted.dim(1);
  LossGradient out;
  out.grad.assign(static_cast<std::size_t>(rows * dims), 0.0);
  std::vector<double> p(static_cast<std::size_t>(rows));
  std::vector<double> t(static_cast<std::size_t>(rows));
  for (std::int64_t d = 0; d < dims; ++d) {
    for (std::int64_t i = 0; i < rows; ++i) {
      p[static_cast<std::size_t>(i)] = predicted[i * dims + d];
      t[static_cast<std::size_t>(i)] = target[i * dims + d];
    }
    const LossGradient col = kind == LossKind::kPlcc ? plcc_loss_with_grad(p, t) : mse_with_grad(p, t);
    out.loss += col.loss / static_cast<double>(dims);
    for (std::int64_t i = 0; i < rows; ++i) {
      out.grad[static_cast<std::size_t>(i * dims + d)] = col.grad[static_cast<std::size_t>(i)] / static_cast<double>(dims);
    }
  }
  return out;
}

}  // namespace gestureqa::model
