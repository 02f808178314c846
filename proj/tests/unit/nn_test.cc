// Copyright 2026 The pillfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pillfl/common/errors.h"
#include "pillfl/nn/dense_net.h"
#include "pillfl/nn/param_vector.h"

namespace pillfl {
namespace {

Matrix random_batch(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = normal(rng);
  }
  return x;
}

std::vector<int> random_labels(int n, int classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (auto& v : y) v = static_cast<int>(rng() % static_cast<std::uint64_t>(classes));
  return y;
}

TEST(ParamLayoutTest, SizesAndOffsets) {
  ParamLayout layout({2, 3, 2});
  EXPECT_EQ(layout.size(), 17u);
  EXPECT_EQ(layout.num_layers(), 2);
  EXPECT_EQ(layout.layer_offset(0), 0u);
  EXPECT_EQ(layout.layer_offset(1), 9u);
  EXPECT_EQ(layout.bias_index(0, 0), 6u);
  EXPECT_EQ(layout.bias_index(1, 1), 16u);
}

TEST(ParamLayoutTest, AddressingTable) {
  // Layer 1 weights start after layer 0's 6 weights and 3 biases; row 0,
  // column 1 is the second entry of the row-major 2x3 block.
  ParamLayout layout({2, 3, 2});
  EXPECT_EQ(layout.weight_index(1, 0, 1), 10u);
  EXPECT_EQ(layout.weight_index(0, 2, 1), 5u);
  EXPECT_EQ(layout.weight_index(1, 1, 2), 14u);
  EXPECT_THROW(layout.weight_index(2, 0, 0), ShapeError);
  EXPECT_THROW(layout.weight_index(0, 3, 0), ShapeError);
}

TEST(ParamVectorTest, ArithmeticAndShapeChecks) {
  ParamVector a = ParamVector::from({1.0, 2.0, 3.0});
  ParamVector b = ParamVector::from({0.5, -1.0, 2.0});
  EXPECT_EQ(a + b, ParamVector::from({1.5, 1.0, 5.0}));
  EXPECT_EQ(a - b, ParamVector::from({0.5, 3.0, 1.0}));
  EXPECT_EQ(2.0 * a, ParamVector::from({2.0, 4.0, 6.0}));
  EXPECT_EQ(a.masked(ParamVector::from({1.0, 0.0, 1.0})), ParamVector::from({1.0, 0.0, 3.0}));
  EXPECT_DOUBLE_EQ(a.dot(b), 0.5 - 2.0 + 6.0);
  ParamVector c = ParamVector::from({1.0, 2.0});
  EXPECT_THROW(a += c, ShapeError);
  EXPECT_THROW(a.masked(c), ShapeError);
  ParamVector structured(ParamLayout({1, 2}));
  ParamVector flat4 = ParamVector::from({0.0, 0.0, 0.0, 0.0});
  EXPECT_THROW(structured + flat4, ShapeError);
}

TEST(ParamVectorTest, CosineAndDistance) {
  ParamVector a = ParamVector::from({1.0, 0.0});
  ParamVector b = ParamVector::from({0.0, 2.0});
  ParamVector zero = ParamVector::from({0.0, 0.0});
  EXPECT_DOUBLE_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, 3.0 * a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, -1.0 * a), -1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, zero), 0.0);
  EXPECT_DOUBLE_EQ(euclidean_distance(a, b), std::sqrt(5.0));
  EXPECT_EQ(complement(ParamVector::from({1.0, 0.0})), ParamVector::from({0.0, 1.0}));
  EXPECT_EQ(count_nonzero(ParamVector::from({0.0, 2.0, -1.0})), 2u);
}

TEST(DenseNetTest, ZeroNetGivesZeroLogits) {
  DenseNet net({4, 5, 3});
  Matrix logits = net.forward(random_batch(6, 4, 1));
  EXPECT_EQ(logits.rows(), 6);
  EXPECT_EQ(logits.cols(), 3);
  EXPECT_EQ(logits.cwiseAbs().maxCoeff(), 0.0);
}

TEST(DenseNetTest, IdentityNet) {
  DenseNet net({2, 2});
  net.weights[0] = Eigen::MatrixXd::Identity(2, 2);
  Matrix x(1, 2);
  x << 0.3, -0.7;
  Matrix logits = net.forward(x);
  EXPECT_DOUBLE_EQ(logits(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(logits(0, 1), -0.7);
}

TEST(DenseNetTest, MatchesHandUnrolledEvaluation) {
  DenseNet net = DenseNet::glorot_uniform({2, 3, 2}, 7);
  for (auto& b : net.biases) b.setConstant(0.1);
  Matrix x(1, 2);
  x << 0.8, -1.3;
  double hidden[3];
  for (int r = 0; r < 3; ++r) {
    double z = net.biases[0][r];
    for (int c = 0; c < 2; ++c) z += net.weights[0](r, c) * x(0, c);
    hidden[r] = z > 0.0 ? z : 0.0;
  }
  Matrix logits = net.forward(x);
  for (int r = 0; r < 2; ++r) {
    double z = net.biases[1][r];
    for (int c = 0; c < 3; ++c) z += net.weights[1](r, c) * hidden[c];
    EXPECT_NEAR(logits(0, r), z, 1e-15);
  }
}

TEST(DenseNetTest, ForwardRejectsWrongWidth) {
  DenseNet net({3, 4, 2});
  EXPECT_THROW(net.forward(Matrix::Zero(2, 5)), ShapeError);
}

TEST(DenseNetTest, GlorotBounds) {
  DenseNet net = DenseNet::glorot_uniform({10, 20, 5}, 3);
  const double b0 = std::sqrt(6.0 / 30.0);
  const double b1 = std::sqrt(6.0 / 25.0);
  EXPECT_LE(net.weights[0].cwiseAbs().maxCoeff(), b0);
  EXPECT_LE(net.weights[1].cwiseAbs().maxCoeff(), b1);
  EXPECT_GT(net.weights[0].cwiseAbs().maxCoeff(), 0.5 * b0);
  EXPECT_EQ(net.biases[0].cwiseAbs().maxCoeff(), 0.0);
}

TEST(FlattenTest, RoundTripIsExact) {
  DenseNet net = DenseNet::glorot_uniform({5, 7, 4, 3}, 11);
  for (auto& b : net.biases) b.setRandom();
  ParamVector v = net.flatten();
  EXPECT_EQ(v.size(), net.layout().size());
  DenseNet back = DenseNet::unflatten(v);
  EXPECT_EQ(back.flatten(), v);
  Matrix x = random_batch(9, 5, 2);
  EXPECT_EQ(back.forward(x), net.forward(x));
}

TEST(FlattenTest, LayoutOrdering) {
  DenseNet net({2, 3, 2});
  net.weights[1](0, 1) = 4.0;
  net.biases[0](2) = -2.0;
  ParamVector v = net.flatten();
  EXPECT_EQ(v[10], 4.0);
  EXPECT_EQ(v[8], -2.0);
}

TEST(FlattenTest, UnflattenNeedsStructuredLayout) {
  EXPECT_THROW(DenseNet::unflatten(ParamVector::from({1.0, 2.0})), ShapeError);
}

TEST(GradTest, SaturatedSampleHasTinyGradient) {
  DenseNet net({2, 3, 2});
  net.weights[1].setZero();
  net.biases[1] << 50.0, -50.0;
  Matrix x(1, 2);
  x << 0.1, 0.2;
  std::vector<int> y = {0};
  EXPECT_LT(grad(net, x, y).norm(), 1e-6);
}

TEST(GradTest, MatchesFiniteDifferences) {
  DenseNet net = DenseNet::glorot_uniform({4, 6, 5, 3}, 5);
  for (auto& b : net.biases) b.setRandom();
  Matrix x = random_batch(8, 4, 9);
  std::vector<int> y = random_labels(8, 3, 10);
  ParamVector g = grad(net, x, y);
  ParamVector p = net.flatten();
  const double h = 1e-4;
  for (std::size_t j = 0; j < p.size(); ++j) {
    ParamVector up = p, down = p;
    up[j] += h;
    down[j] -= h;
    const double fd = (mean_cross_entropy(DenseNet::unflatten(up), x, y) -
                       mean_cross_entropy(DenseNet::unflatten(down), x, y)) /
                      (2.0 * h);
    EXPECT_NEAR(g[j], fd, 1e-6 + 1e-4 * std::abs(fd)) << "coordinate " << j;
  }
}

TEST(GradTest, DuplicatedBatchGivesSameGradient) {
  DenseNet net = DenseNet::glorot_uniform({3, 4, 3, 2}, 2);
  Matrix x = random_batch(5, 3, 4);
  std::vector<int> y = random_labels(5, 2, 5);
  Matrix xx(10, 3);
  xx << x, x;
  std::vector<int> yy = y;
  yy.insert(yy.end(), y.begin(), y.end());
  const ParamVector a = grad(net, x, y);
  const ParamVector b = grad(net, xx, yy);
  EXPECT_LT((a - b).values().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(GradTest, Errors) {
  DenseNet net({2, 3, 2});
  EXPECT_THROW(grad(net, Matrix(0, 2), std::vector<int>{}), EmptyInputError);
  EXPECT_THROW(grad(net, Matrix::Zero(1, 2), std::vector<int>{2}), InvalidArgumentError);
  EXPECT_THROW(grad(net, Matrix::Zero(2, 2), std::vector<int>{0}), ShapeError);
}

TEST(SgdTrainTest, SingleFullBatchStepEqualsScaledGradient) {
  DenseNet net = DenseNet::glorot_uniform({3, 5, 4, 2}, 8);
  Matrix x = random_batch(12, 3, 3);
  std::vector<int> y = random_labels(12, 2, 4);
  TrainOptions opts{1, 0.1, 0};
  TrainResult r = sgd_train(net, x, y, opts, 99);
  ParamVector expected = 0.1 * grad(net, x, y);
  EXPECT_LT((r.update - expected).values().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SgdTrainTest, ZeroLearningRateGivesZeroUpdate) {
  DenseNet net = DenseNet::glorot_uniform({3, 5, 2}, 8);
  Matrix x = random_batch(20, 3, 3);
  std::vector<int> y = random_labels(20, 2, 4);
  TrainResult r = sgd_train(net, x, y, {3, 0.0, 4}, 1);
  EXPECT_EQ(r.update.norm(), 0.0);
}

TEST(SgdTrainTest, SameSeedIsBitwiseIdentical) {
  DenseNet net = DenseNet::glorot_uniform({3, 5, 2}, 8);
  Matrix x = random_batch(50, 3, 3);
  std::vector<int> y = random_labels(50, 2, 4);
  TrainOptions opts{2, 0.05, 8};
  EXPECT_EQ(sgd_train(net, x, y, opts, 5).update, sgd_train(net, x, y, opts, 5).update);
  EXPECT_NE(sgd_train(net, x, y, opts, 5).update, sgd_train(net, x, y, opts, 6).update);
}

TEST(SgdTrainTest, ApplyingUpdateReproducesTrainedNet) {
  DenseNet net = DenseNet::glorot_uniform({4, 6, 3}, 1);
  Matrix x = random_batch(40, 4, 2);
  std::vector<int> y = random_labels(40, 3, 3);
  TrainResult r = sgd_train(net, x, y, {2, 0.1, 16}, 7);
  ParamVector applied = net.flatten() - r.update;
  ParamVector trained = r.net.flatten();
  EXPECT_LT((applied - trained).values().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SgdTrainTest, ReducesLoss) {
  DenseNet net = DenseNet::glorot_uniform({4, 8, 3}, 1);
  Matrix x = random_batch(60, 4, 2);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) > 0.0 ? 1 : 0;
  const double before = mean_cross_entropy(net, x, y);
  TrainResult r = sgd_train(net, x, y, {20, 0.1, 10}, 3);
  EXPECT_LT(mean_cross_entropy(r.net, x, y), 0.5 * before);
}

TEST(SgdTrainTest, EmptyDataThrows) {
  DenseNet net({2, 3, 2});
  EXPECT_THROW(sgd_train(net, Matrix(0, 2), std::vector<int>{}, {}, 1), EmptyInputError);
}

TEST(PredictTest, ArgmaxWithLowestIndexOnTies) {
  DenseNet net({2, 3});
  net.biases[0] << 1.0, 1.0, 0.0;
  std::vector<int> p = predict(net, Matrix::Zero(2, 2));
  EXPECT_EQ(p, (std::vector<int>{0, 0}));
  net.biases[0] << 0.0, 2.0, 1.0;
  EXPECT_EQ(predict(net, Matrix::Zero(1, 2)), std::vector<int>{1});
}

}  // namespace
}  // namespace pillfl
