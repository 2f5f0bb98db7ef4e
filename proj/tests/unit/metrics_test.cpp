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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "gestureqa/error.hpp"
#include "gestureqa/metrics/correlation.hpp"
#include "gestureqa/metrics/report.hpp"
#include "test_util.hpp"

namespace gestureqa::metrics {
namespace {

using V = std::vector<double>;

// ---- definitional oracles ----

// Average rank by counting: 1 + (#smaller) + (#equal - 1) / 2.
V oracle_ranks(const V& v) {
  V r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (double w : v) {
      smaller += w < v[i];
      equal += w == v[i];
    }
    r[i] = 1.0 + smaller + (equal - 1.0) / 2.0;
  }
  return r;
}

// Spearman for tie-free data: 1 - 6 sum d^2 / (n (n^2 - 1)).
double oracle_spearman(const V& x, const V& y) {
  const auto rx = oracle_ranks(x), ry = oracle_ranks(y);
  const double n = static_cast<double>(x.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// Kendall tau-b by pair counting.
double oracle_kendall(const V& x, const V& y) {
  double c = 0, d = 0, tx = 0, ty = 0, n0 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++n0;
      const double sx = (x[i] > x[j]) - (x[i] < x[j]);
      const double sy = (y[i] > y[j]) - (y[i] < y[j]);
      if (sx == 0) ++tx;
      if (sy == 0) ++ty;
      if (sx * sy > 0) ++c;
      if (sx * sy < 0) ++d;
    }
  }
  return (c - d) / std::sqrt((n0 - tx) * (n0 - ty));
}

double oracle_pearson(const V& x, const V& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// ---- worked examples ----

TEST(SrccTest, WorkedExamples) {
  EXPECT_NEAR(srcc(V{1, 2, 3, 4}, V{10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(srcc(V{1, 2, 3, 4}, V{4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_NEAR(srcc(V{1, 2, 3, 4}, V{1, 3, 2, 4}), 0.8, 1e-15);
}

TEST(PlccTest, WorkedExamples) {
  EXPECT_NEAR(plcc(V{1, 2, 3, 4}, V{5, 7, 9, 11}), 1.0, 1e-15);
  EXPECT_NEAR(plcc(V{1, 2, 3}, V{-1, -2, -3}), -1.0, 1e-15);
  // r = 1.5 / sqrt(2/3 * 14/9 * 9/4 ...) by hand: sxy = 3, sxx = 2, syy = 14/3
  EXPECT_NEAR(plcc(V{1, 2, 3}, V{1, 2, 4}), 3.0 / std::sqrt(2.0 * 14.0 / 3.0), 1e-15);
  EXPECT_NEAR(plcc(V{1, 2, 3}, V{1, 2, 4}), 0.9820, 5e-5);
}

TEST(KrccTest, WorkedExamples) {
  EXPECT_NEAR(krcc(V{1, 2, 3, 4}, V{2, 3, 4, 5}), 1.0, 1e-15);
  EXPECT_NEAR(krcc(V{1, 2, 3}, V{1, 3, 2}), 1.0 / 3.0, 1e-15);
  const V x{1, 2, 3, 4, 5, 5}, y{2, 1, 4, 3, 6, 6};
  const double tb = krcc(x, y);
  EXPECT_GE(tb, -1.0);
  EXPECT_LE(tb, 1.0);
  EXPECT_NEAR(tb, oracle_kendall(x, y), 1e-12);
}

TEST(RmseTest, WorkedExamples) {
  EXPECT_EQ(rmse(V{1, 2, 3}, V{1, 2, 3}), 0.0);
  EXPECT_NEAR(rmse(V{0, 0}, V{3, 4}), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(rmse(V{1, 2, 3}, V{3.5, 4.5, 5.5}), 2.5, 1e-15);
  EXPECT_NEAR(rmse(V{7}, V{4}), 3.0, 1e-15);
}

TEST(CorrelationTest, UndefinedCasesThrow) {
  EXPECT_THROW(srcc(V{1, 1, 1}, V{1, 2, 3}), ContractError);
  EXPECT_THROW(plcc(V{1, 2, 3}, V{2, 2, 2}), ContractError);
  EXPECT_THROW(krcc(V{4, 4}, V{1, 2}), ContractError);
  EXPECT_THROW(srcc(V{1}, V{1}), ContractError);
  EXPECT_THROW(plcc(V{1, 2}, V{1, 2, 3}), ContractError);
  EXPECT_THROW(rmse(V{}, V{}), ContractError);
}

// ---- exhaustive oracle comparison ----

TEST(CorrelationTest, MatchesOraclesOverAllPermutations) {
  std::mt19937_64 rng(1);
  std::size_t cases = 0;
  for (std::size_t n : {4, 5, 6}) {
    V base(n);
    std::iota(base.begin(), base.end(), 1.0);
    // distinct non-integer values, fixed order for x
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    V x(n);
    for (auto& v : x) v = u(rng);
    std::sort(x.begin(), x.end());
    V perm = base;
    do {
      V y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = perm[i] * 3.7 - 1.0;
      ASSERT_NEAR(srcc(x, y), oracle_spearman(x, y), 1e-12);
      ASSERT_NEAR(krcc(x, y), oracle_kendall(x, y), 1e-12);
      ASSERT_NEAR(srcc(y, x), oracle_spearman(y, x), 1e-12);
      ASSERT_NEAR(krcc(y, x), oracle_kendall(y, x), 1e-12);
      ++cases;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  EXPECT_EQ(cases, 24u + 120u + 720u);
}

TEST(CorrelationTest, TiedDataMatchesOracles) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> small(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + trial % 9;
    V x(n), y(n);
    for (auto& v : x) v = small(rng);
    for (auto& v : y) v = small(rng);
    if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) x[0] += 1;
    if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) y[0] += 1;
    EXPECT_EQ(average_ranks(x), oracle_ranks(x));
    EXPECT_NEAR(srcc(x, y), oracle_pearson(oracle_ranks(x), oracle_ranks(y)), 1e-12);
    EXPECT_NEAR(krcc(x, y), oracle_kendall(x, y), 1e-12);
  }
}

// ---- invariances ----

TEST(CorrelationTest, RankMetricsInvariantUnderMonotoneMaps) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    V x(30), y(30);
    for (auto& v : x) v = n(rng);
    for (auto& v : y) v = n(rng);
    const double s = srcc(x, y), k = krcc(x, y);
    for (int kind = 0; kind < 3; ++kind) {
      V fx(x);
      for (auto& v : fx) v = kind == 0 ? std::exp(v) : kind == 1 ? v * v * v : 4.0 * v - 2.0;
      EXPECT_NEAR(srcc(fx, y), s, 1e-12);
      EXPECT_NEAR(krcc(fx, y), k, 1e-12);
      EXPECT_NEAR(srcc(y, fx), s, 1e-12);
    }
  }
}

TEST(CorrelationTest, PlccAffineInvariance) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    V x(20), y(20);
    for (auto& v : x) v = n(rng);
    for (auto& v : y) v = n(rng);
    V ax(x);
    for (auto& v : ax) v = 0.3 * v + 11.0;
    EXPECT_NEAR(plcc(ax, y), plcc(x, y), 1e-12);
    EXPECT_NEAR(plcc(x, y), oracle_pearson(x, y), 1e-12);
  }
}

TEST(RmseTest, SymmetryAndTriangle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    V x(12), y(12), z(12);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    for (auto& v : z) v = u(rng);
    EXPECT_EQ(rmse(x, y), rmse(y, x));
    EXPECT_LE(rmse(x, z), rmse(x, y) + rmse(y, z) + 1e-9);
  }
}

// ---- logistic ----

TEST(LogisticTest, RecoversPlantedCurve) {
  const Logistic4 truth{{90.0, 10.0, 0.2, 0.15}};
  V x, y;
  for (int i = 0; i <= 60; ++i) {
    x.push_back(-1.0 + i / 30.0);
    y.push_back(truth(x.back()));
  }
  const auto fit = fit_logistic(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(fit(x[i]), y[i], 1e-4);
}

TEST(LogisticTest, FitIsMonotoneOnNoisyData) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 3.0);
  V x, y;
  for (int i = 0; i < 100; ++i) {
    x.push_back(i / 100.0);
    y.push_back(20.0 + 60.0 * x.back() + n(rng));
  }
  const auto fit = fit_logistic(x, y);
  V fitted;
  for (double v : x) fitted.push_back(fit(v));
  EXPECT_GT(plcc(fitted, y), 0.9);
  EXPECT_LT(rmse(fitted, y), 4.0);
}

// ---- evaluate ----

std::vector<subjective::AggregateRecord> aggregates_for(const V& q, const V& c) {
  std::vector<subjective::AggregateRecord> out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    subjective::AggregateRecord a;
    a.sample_id = "s" + std::to_string(i);
    a.mos_quality = q[i];
    a.mos_consistency = c[i];
    a.n_raters = 1;
    out.push_back(a);
  }
  return out;
}

TEST(EvaluateTest, PerfectAndReversedPredictors) {
  const V q{10, 40, 35, 80, 62}, c{50, 20, 90, 30, 70};
  const auto aggs = aggregates_for(q, c);
  std::vector<Prediction> perfect, reversed;
  for (std::size_t i = 0; i < q.size(); ++i) {
    perfect.push_back({aggs[i].sample_id, q[i], c[i]});
    reversed.push_back({aggs[i].sample_id, 100 - q[i], 100 - c[i]});
  }
  const auto r = evaluate(perfect, aggs);
  EXPECT_EQ(r.n, 5u);
  for (auto d : {subjective::Dimension::kQuality, subjective::Dimension::kConsistency}) {
    EXPECT_NEAR(r[d].srcc, 1.0, 1e-15);
    EXPECT_NEAR(r[d].plcc, 1.0, 1e-15);
    EXPECT_NEAR(r[d].krcc, 1.0, 1e-15);
    EXPECT_EQ(r[d].rmse, 0.0);
  }
  const auto rev = evaluate(reversed, aggs);
  EXPECT_NEAR(rev.quality.srcc, -1.0, 1e-15);
  EXPECT_GT(rev.quality.rmse, 0.0);
}

TEST(EvaluateTest, MissingAggregateAndTinyInputs) {
  const auto aggs = aggregates_for({1, 2, 3}, {3, 2, 1});
  try {
    evaluate({{"s0", 1, 1}, {"ghost", 2, 2}}, aggs);
    FAIL() << "expected NotFoundError";
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
  EXPECT_THROW(evaluate({{"s0", 1, 1}}, aggs), ContractError);
}

TEST(EvaluateTest, RandomPredictionsAreUncorrelated) {
  // permutation-null simulation at the desk-scale dataset size
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  V q(280), c(280);
  for (auto& v : q) v = u(rng);
  for (auto& v : c) v = u(rng);
  const auto aggs = aggregates_for(q, c);
  int small = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<Prediction> preds;
    for (const auto& a : aggs) preds.push_back({a.sample_id, u(rng), u(rng)});
    small += std::abs(evaluate(preds, aggs).quality.srcc) < 0.2;
  }
  EXPECT_GT(small, 0.99 * trials);
}

TEST(EvaluateTest, LogisticOptionChangesOnlyLinearMetrics) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  V q, c;
  std::vector<Prediction> preds;
  for (int i = 0; i < 60; ++i) {
    q.push_back(50 + 15 * n(rng));
    c.push_back(50 + 15 * n(rng));
  }
  const auto aggs = aggregates_for(q, c);
  for (int i = 0; i < 60; ++i) preds.push_back({aggs[i].sample_id, std::tanh((q[i] - 50) / 20), c[i] / 100});
  const auto raw = evaluate(preds, aggs);
  const auto fitted = evaluate(preds, aggs, {true});
  EXPECT_NEAR(raw.quality.srcc, fitted.quality.srcc, 1e-12);
  EXPECT_LT(fitted.quality.rmse, raw.quality.rmse);
}

TEST(ReportTest, JsonShape) {
  MetricReport r;
  r.quality = {0.9, 0.8, 0.7, 5.0};
  r.consistency = {0.6, 0.5, 0.4, 6.0};
  r.n = 56;
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("quality").at("srcc"), 0.9);
  EXPECT_EQ(j.at("consistency").at("rmse"), 6.0);
  EXPECT_EQ(j.at("n"), 56);
  const auto back = j.get<MetricReport>();
  EXPECT_EQ(back.consistency.krcc, 0.4);
  testing::TempDir dir;
  save_report(dir / "metrics.json", r);
  EXPECT_EQ(nlohmann::json::parse(testing::slurp(dir / "metrics.json")), j);
}

}  // namespace
}  // namespace gestureqa::metrics
