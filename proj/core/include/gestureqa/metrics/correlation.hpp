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

#include <array>
#include <span>
#include <vector>

namespace gestureqa::metrics {

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> v);

// All four require equal lengths. srcc/plcc/krcc need n >= 2 and throw
// ContractError when a correlation is undefined (a constant input).
double srcc(std::span<const double> x, std::span<const double> y);
double plcc(std::span<const double> x, std::span<const double> y);
// Kendall tau-b.
double krcc(std::span<const double> x, std::span<const double> y);
// Needs n >= 1.
double rmse(std::span<const double> x, std::span<const double> y);

// Four-parameter logistic y = b2 + (b1 - b2) / (1 + exp(-(x - b3) / |b4|)).
struct Logistic4 {
  std::array<double, 4> beta{1.0, 0.0, 0.0, 1.0};
  double operator()(double x) const;
};

// Least-squares fit of predictions x onto targets y (Levenberg-Marquardt).
Logistic4 fit_logistic(std::span<const double> x, std::span<const double> y);

}  // namespace gestureqa::metrics
