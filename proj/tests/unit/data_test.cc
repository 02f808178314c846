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

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pillfl/common/errors.h"
#include "pillfl/data/dataset.h"
#include "pillfl/data/partition.h"
#include "pillfl/nn/dense_net.h"

namespace pillfl {
namespace {

namespace fs = std::filesystem;

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

class IdxFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pillfl_idx_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_images(const std::string& name, std::uint32_t magic, std::uint32_t n,
                           std::uint32_t rows, std::uint32_t cols,
                           const std::vector<unsigned char>& pixels) {
    const std::string path = (dir_ / name).string();
    std::ofstream out(path, std::ios::binary);
    put_u32(out, magic);
    put_u32(out, n);
    put_u32(out, rows);
    put_u32(out, cols);
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    return path;
  }
  std::string write_labels(const std::string& name, std::uint32_t magic,
                           const std::vector<unsigned char>& labels) {
    const std::string path = (dir_ / name).string();
    std::ofstream out(path, std::ios::binary);
    put_u32(out, magic);
    put_u32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
    return path;
  }

  fs::path dir_;
};

TEST_F(IdxFiles, ScalesPixels) {
  const auto img = write_images("img", 0x803, 1, 2, 2, {0, 128, 255, 0});
  const auto lab = write_labels("lab", 0x801, {3});
  LabeledDataset ds = load_idx(img, lab);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.dim(), 4);
  EXPECT_DOUBLE_EQ(ds.features(0, 0), 0.0);
  EXPECT_NEAR(ds.features(0, 1), 0.50196, 1e-5);
  EXPECT_DOUBLE_EQ(ds.features(0, 2), 1.0);
  EXPECT_EQ(ds.labels[0], 3);
  EXPECT_EQ(ds.num_classes, 4);
}

TEST_F(IdxFiles, RejectsImageMagicInLabelFile) {
  const auto img = write_images("img", 0x803, 1, 1, 1, {7});
  const auto lab = write_labels("lab", 0x803, {0});
  EXPECT_THROW(load_idx(img, lab), FormatError);
}

TEST_F(IdxFiles, RejectsCountMismatch) {
  const auto img = write_images("img", 0x803, 2, 1, 1, {7, 9});
  const auto lab = write_labels("lab", 0x801, {0});
  EXPECT_THROW(load_idx(img, lab), FormatError);
}

TEST_F(IdxFiles, RejectsTruncatedPayload) {
  const auto img = write_images("img", 0x803, 2, 2, 2, {1, 2, 3});
  const auto lab = write_labels("lab", 0x801, {0, 1});
  EXPECT_THROW(load_idx(img, lab), FormatError);
}

TEST(IdxTest, MissingFileIsIoError) {
  EXPECT_THROW(load_idx("/nonexistent/a", "/nonexistent/b"), IoError);
}

TEST(IdxTest, BundledMnistSubset) {
  const std::string dir = std::string(PILLFL_DATA_DIR) + "/mnist/";
  LabeledDataset train =
      load_idx(dir + "train-images-idx3-ubyte", dir + "train-labels-idx1-ubyte");
  LabeledDataset test =
      load_idx(dir + "test-images-idx3-ubyte", dir + "test-labels-idx1-ubyte");
  EXPECT_EQ(train.size(), 6000u);
  EXPECT_EQ(test.size(), 4000u);
  EXPECT_EQ(train.dim(), 784);
  EXPECT_EQ(train.num_classes, 10);
  EXPECT_GE(train.features.minCoeff(), 0.0);
  EXPECT_LE(train.features.maxCoeff(), 1.0);
  for (std::size_t c : train.class_counts()) EXPECT_GT(c, 400u);
}

TEST(BlobsTest, ZeroSpreadCollapsesToCenters) {
  BlobsOptions o;
  o.classes = 3;
  o.n_per_class = 5;
  o.dim = 4;
  o.spread = 0.0;
  o.seed = 4;
  LabeledDataset ds = synth_blobs(o);
  ASSERT_EQ(ds.size(), 15u);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t k = i + 1; k < ds.size(); ++k) {
      const bool same_class = ds.labels[i] == ds.labels[k];
      const bool same_point =
          (ds.features.row(static_cast<Eigen::Index>(i)) -
           ds.features.row(static_cast<Eigen::Index>(k))).norm() == 0.0;
      EXPECT_EQ(same_class, same_point);
    }
  }
}

TEST(BlobsTest, DeterministicAndStreamsShareCenters) {
  BlobsOptions o;
  o.seed = 12;
  LabeledDataset a = synth_blobs(o);
  LabeledDataset b = synth_blobs(o);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  LabeledDataset c = synth_blobs(o, 1);
  EXPECT_NE(a.features, c.features);
  // Class means of both streams estimate the same centers.
  for (int cls = 0; cls < o.classes; ++cls) {
    Eigen::RowVectorXd ma = Eigen::RowVectorXd::Zero(o.dim);
    Eigen::RowVectorXd mc = Eigen::RowVectorXd::Zero(o.dim);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.labels[i] == cls) ma += a.features.row(static_cast<Eigen::Index>(i));
      if (c.labels[i] == cls) mc += c.features.row(static_cast<Eigen::Index>(i));
    }
    EXPECT_LT((ma - mc).norm() / o.n_per_class, 0.25);
  }
}

TEST(BlobsTest, SmallNetFitsWellSeparatedBlobs) {
  BlobsOptions o;
  o.classes = 2;
  o.dim = 2;
  o.n_per_class = 100;
  o.spread = 0.1;
  o.seed = 3;
  LabeledDataset ds = synth_blobs(o);
  // Some inits leave the two-unit layer dead; this one does not.
  DenseNet net = DenseNet::glorot_uniform({2, 8, 2, 2}, 4);
  TrainResult r = sgd_train(net, ds.features, ds.labels, {200, 0.1, 0}, 1);
  const std::vector<int> pred = predict(r.net, ds.features);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != ds.labels[i];
  EXPECT_LT(static_cast<double>(wrong) / static_cast<double>(ds.size()), 0.05);
}

LabeledDataset labels_only(std::size_t n, int classes) {
  LabeledDataset ds;
  ds.num_classes = classes;
  ds.features = Matrix::Zero(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) ds.labels.push_back(static_cast<int>(i % classes));
  return ds;
}

void expect_disjoint_cover(const Partition& p, std::size_t n) {
  std::set<std::size_t> seen(p.root_indices.begin(), p.root_indices.end());
  EXPECT_EQ(seen.size(), p.root_indices.size());
  std::size_t total = p.root_indices.size();
  for (const auto& shard : p.shards) {
    for (std::size_t i : shard) {
      EXPECT_TRUE(seen.insert(i).second) << "index " << i << " assigned twice";
    }
    total += shard.size();
  }
  EXPECT_EQ(total, n);
  EXPECT_EQ(seen.size(), n);
}

TEST(PartitionTest, IidEvenSplit) {
  LabeledDataset ds = labels_only(10, 2);
  Partition p = partition_iid(ds, 5, 1);
  ASSERT_EQ(p.shards.size(), 5u);
  for (const auto& s : p.shards) EXPECT_EQ(s.size(), 2u);
  expect_disjoint_cover(p, 10);
}

TEST(PartitionTest, IidLeftoverGoesToFirstShard) {
  LabeledDataset ds = labels_only(11, 2);
  Partition p = partition_iid(ds, 5, 1);
  std::vector<std::size_t> sizes;
  for (const auto& s : p.shards) sizes.push_back(s.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 2, 2, 2, 2}));
  expect_disjoint_cover(p, 11);
}

TEST(PartitionTest, IidTooManyClients) {
  EXPECT_THROW(partition_iid(labels_only(3, 2), 4, 1), InvalidArgumentError);
}

TEST(PartitionTest, IidShardsFollowGlobalClassFrequencies) {
  const int classes = 10;
  LabeledDataset ds = labels_only(6000, classes);
  Partition p = partition_iid(ds, 20, 7);
  // Chi-squared statistic over the 20 x 10 contingency table; 171 degrees
  // of freedom, so a value above 250 would be far in the tail.
  double chi2 = 0.0;
  for (const auto& shard : p.shards) {
    std::vector<double> counts(classes, 0.0);
    for (std::size_t i : shard) counts[static_cast<std::size_t>(ds.labels[i])] += 1.0;
    const double expected = static_cast<double>(shard.size()) / classes;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  }
  EXPECT_LT(chi2, 250.0);
}

TEST(PartitionTest, NonIidHomeGroupFraction) {
  const int classes = 10;
  LabeledDataset ds = labels_only(6000, classes);
  double in_group = 0.0, total = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Partition p = partition_noniid(ds, 20, 0.5, seed);
    expect_disjoint_cover(p, 6000);
    for (int k = 0; k < 20; ++k) {
      const int g = noniid_group(k, 20, classes);
      for (std::size_t i : p.shards[static_cast<std::size_t>(k)]) {
        in_group += ds.labels[i] == g;
        total += 1.0;
      }
    }
  }
  EXPECT_NEAR(in_group / total, 0.5, 0.03);
}

TEST(PartitionTest, NonIidFullDegreeGivesSingleClassClients) {
  LabeledDataset ds = labels_only(600, 3);
  Partition p = partition_noniid(ds, 6, 1.0, 2);
  for (int k = 0; k < 6; ++k) {
    for (std::size_t i : p.shards[static_cast<std::size_t>(k)]) {
      EXPECT_EQ(ds.labels[i], noniid_group(k, 6, 3));
    }
  }
}

TEST(PartitionTest, NonIidUniformDegreeIsSymmetric) {
  const int classes = 4;
  LabeledDataset ds = labels_only(8000, classes);
  Partition p = partition_noniid(ds, 8, 0.25, 5);
  for (int g = 0; g < classes; ++g) {
    double in_group = 0.0, total = 0.0;
    for (int k = 0; k < 8; ++k) {
      if (noniid_group(k, 8, classes) != g) continue;
      for (std::size_t i : p.shards[static_cast<std::size_t>(k)]) {
        in_group += ds.labels[i] == g;
        total += 1.0;
      }
    }
    EXPECT_NEAR(in_group / total, 0.25, 0.03);
  }
}

TEST(PartitionTest, NonIidRejectsBadDegree) {
  LabeledDataset ds = labels_only(100, 4);
  EXPECT_THROW(partition_noniid(ds, 8, 0.1, 1), InvalidArgumentError);
  EXPECT_THROW(partition_noniid(ds, 8, 1.2, 1), InvalidArgumentError);
}

TEST(PartitionTest, Deterministic) {
  LabeledDataset ds = labels_only(500, 5);
  EXPECT_EQ(partition_iid(ds, 7, 9).shards, partition_iid(ds, 7, 9).shards);
  EXPECT_EQ(partition_noniid(ds, 10, 0.6, 9).shards,
            partition_noniid(ds, 10, 0.6, 9).shards);
}

TEST(RootSplitTest, EmptyRoot) {
  LabeledDataset ds = labels_only(50, 2);
  EXPECT_TRUE(split_root(ds, 0, 1).root_indices.empty());
}

TEST(RootSplitTest, ShardsCoverTheRemainder) {
  LabeledDataset ds = labels_only(6000, 10);
  Partition base = split_root(ds, 100, 4);
  EXPECT_EQ(base.root_indices.size(), 100u);
  Partition p = partition_iid(ds, 20, 5, base);
  EXPECT_EQ(p.root_indices, base.root_indices);
  std::size_t shard_total = 0;
  for (const auto& s : p.shards) shard_total += s.size();
  EXPECT_EQ(shard_total, 5900u);
  expect_disjoint_cover(p, 6000);
}

TEST(RootSplitTest, RootTooLarge) {
  LabeledDataset ds = labels_only(10, 2);
  EXPECT_THROW(split_root(ds, 10, 1), InvalidArgumentError);
}

TEST(RootSplitTest, UniformRootMatchesGlobalHistogram) {
  LabeledDataset ds = labels_only(20000, 4);
  Partition p = split_root(ds, 2000, 8);
  std::vector<double> counts(4, 0.0);
  for (std::size_t i : p.root_indices) counts[static_cast<std::size_t>(ds.labels[i])] += 1.0;
  for (double c : counts) EXPECT_NEAR(c / 2000.0, 0.25, 0.04);
}

TEST(RootSplitTest, BiasedRootFavoursHomeClass) {
  LabeledDataset ds = labels_only(20000, 4);
  Partition p = split_root_biased(ds, 2000, 0.7, 2, 8);
  double home = 0.0;
  for (std::size_t i : p.root_indices) home += ds.labels[i] == 2;
  EXPECT_NEAR(home / 2000.0, 0.7, 0.04);
}

TEST(DatasetTest, SubsetAndValidate) {
  LabeledDataset ds = labels_only(6, 3);
  std::vector<std::size_t> idx = {4, 1};
  LabeledDataset s = ds.subset(idx);
  EXPECT_EQ(s.labels, (std::vector<int>{1, 1}));
  EXPECT_EQ(ds.class_counts(), (std::vector<std::size_t>{2, 2, 2}));
  ds.labels[0] = 5;
  EXPECT_THROW(ds.validate(), InvalidArgumentError);
}

}  // namespace
}  // namespace pillfl
