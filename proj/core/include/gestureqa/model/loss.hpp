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

#include <span>
#include <vector>

#include "gestureqa/nn/tensor.hpp"

namespace gestureqa::model {

inline constexpr double kNormalizeEps = 1e-8;

// (v - mean) / sqrt(population variance + eps^2). Within eps of dividing by
// (std + eps), but exact to second order for well-spread inputs. Constant
// inputs map to zeros. Requires at least two values.
std::vector<double> normalize_scores(std::span<const double> v, double eps = kNormalizeEps);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d prediction, same layout as the input
};

// Correlation-weighted loss on normalized scores p^ and t^:
//   r = mean(p^ * t^)
//   loss = (MSE(p^, t^) + MSE(r * p^, t^)) / 8
// Throws ContractError for fewer than two scores or mismatched lengths.
double plcc_loss(std::span<const double> predicted, std::span<const double> target);
LossGradient plcc_loss_with_grad(std::span<const double> predicted, std::span<const double> target);

enum class LossKind { kPlcc, kMse };

// Mean of the per-column loss over the score columns of [B, 2] tensors.
double total_loss(const nn::Tensor& predicted, const nn::Tensor& target, LossKind kind = LossKind::kPlcc);
LossGradient total_loss_with_grad(const nn::Tensor& predicted, const nn::Tensor& target,
                                  LossKind kind = LossKind::kPlcc);

}  // namespace gestureqa::model
