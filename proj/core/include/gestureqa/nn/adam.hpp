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
#include <vector>

#include "gestureqa/nn/parameter.hpp"

namespace gestureqa::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer with bias correction. The learning rate is passed
// per step so an external schedule can drive it.
class Adam {
 public:
  Adam(ParameterStore& store, AdamConfig config = {});

  void step(const GradientSet& grads, double lr);
  std::int64_t steps() const { return steps_; }

 private:
  ParameterStore* store_;
  AdamConfig config_;
  GradientSet m_;
  GradientSet v_;
  std::int64_t steps_ = 0;
};

}  // namespace gestureqa::nn
