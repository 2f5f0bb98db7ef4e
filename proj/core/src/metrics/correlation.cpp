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

#include "gestureqa/metrics/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Core>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "gestureqa/error.hpp"

namespace gestureqa::metrics {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_n, const char* what) {
  if (x.size() != y.size()) {
    throw ContractError(std::string(what) + ": length mismatch " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
  }
  if (x.size() < min_n) throw ContractError(std::string(what) + ": needs at least " + std::to_string(min_n) + " values");
}

double pearson(std::span<const double> x, std::span<const double> y, const char* what) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw ContractError(std::string(what) + " undefined: zero variance input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double srcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2, "srcc");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry, "srcc");
}

double plcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2, "plcc");
  return pearson(x, y, "plcc");
}

double krcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2, "krcc");
  // n0 - n1 and n0 - n2 in tau-b are the pairs untied in x and in y.
  long long concordant = 0, discordant = 0, untied_x = 0, untied_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx != 0.0) ++untied_x;
      if (dy != 0.0) ++untied_y;
      const double s = dx * dy;
      if (s > 0.0) {
        ++concordant;
      } else if (s < 0.0) {
        ++discordant;
      }
    }
  }
  if (untied_x == 0 || untied_y == 0) throw ContractError("krcc undefined: all values tied");
  const double tau = static_cast<double>(concordant - discordant) /
                     std::sqrt(static_cast<double>(untied_x) * static_cast<double>(untied_y));
  return std::clamp(tau, -1.0, 1.0);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 1, "rmse");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s / static_cast<double>(x.size()));
}

double Logistic4::operator()(double x) const {
  const double scale = std::max(std::abs(beta[3]), 1e-12);
  return beta[1] + (beta[0] - beta[1]) / (1.0 + std::exp(-(x - beta[2]) / scale));
}

namespace {

struct LogisticResidual : Eigen::DenseFunctor<double> {
  std::span<const double> x, y;
  LogisticResidual(std::span<const double> xs, std::span<const double> ys)
      : Eigen::DenseFunctor<double>(4, static_cast<int>(xs.size())), x(xs), y(ys) {}

  int operator()(const Eigen::VectorXd& b, Eigen::VectorXd& fvec) const {
    Logistic4 f{{b[0], b[1], b[2], b[3]}};
    for (std::size_t i = 0; i < x.size(); ++i) fvec[static_cast<Eigen::Index>(i)] = f(x[i]) - y[i];
    return 0;
  }

  int df(const Eigen::VectorXd& b, Eigen::MatrixXd& jac) const {
    const double sign = b[3] < 0.0 ? -1.0 : 1.0;
    const double scale = std::max(std::abs(b[3]), 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double z = (x[i] - b[2]) / scale;
      const double s = 1.0 / (1.0 + std::exp(-z));
      const double ds = s * (1.0 - s) * (b[0] - b[1]);
      jac(r, 0) = s;
      jac(r, 1) = 1.0 - s;
      jac(r, 2) = -ds / scale;
      jac(r, 3) = -ds * z / scale * sign;
    }
    return 0;
  }
};

}  // namespace

Logistic4 fit_logistic(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 4, "fit_logistic");
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double sx = 0.0;
  for (double v : x) sx += (v - mean_x) * (v - mean_x);
  sx = std::sqrt(sx / static_cast<double>(x.size()));
  if (sx <= 0.0) throw ContractError("fit_logistic: constant predictions");
  Eigen::VectorXd b(4);
  b << *ymax, *ymin, mean_x, sx;
  if (*xmax == *xmin) b[3] = 1.0;

  LogisticResidual functor(x, y);
  Eigen::LevenbergMarquardt<LogisticResidual> lm(functor);
  lm.setMaxfev(2000);
  lm.minimize(b);
  Logistic4 out{{b[0], b[1], b[2], b[3]}};
  for (double v : out.beta) {
    if (!std::isfinite(v)) throw ContractError("fit_logistic: fit diverged");
  }
  return out;
}

}  // namespace gestureqa::metrics
