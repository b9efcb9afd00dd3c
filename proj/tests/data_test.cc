/*
 * Copyright 2026 The FairCon Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "faircon/data.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace faircon {
namespace {

using testing::TempDir;
using testing::read_file;
using testing::write_file;

// Pearson chi-square statistic of a contingency table.
double chi_square(const std::vector<std::vector<double>>& t) {
  const std::size_t r = t.size(), c = t[0].size();
  std::vector<double> rows(r, 0.0), cols(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      rows[i] += t[i][j];
      cols[j] += t[i][j];
      total += t[i][j];
    }
  }
  double chi = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double e = rows[i] * cols[j] / total;
      chi += (t[i][j] - e) * (t[i][j] - e) / e;
    }
  }
  return chi;
}

// Critical value of chi-square with 1 degree of freedom at alpha = 0.01.
constexpr double kChi2Df1Alpha01 = 6.635;

TEST(GenerateSyntheticTest, MarginalsMatchConfig) {
  SynthConfig cfg;
  const SplitDatasets d = generate_synthetic(cfg);
  ASSERT_EQ(d.train.size(), 5000u);
  std::vector<double> n_a(2, 0.0), pos_a(2, 0.0);
  for (const auto& ex : d.train.examples) {
    n_a[ex.attr] += 1;
    pos_a[ex.attr] += ex.label;
  }
  EXPECT_NEAR(n_a[0] / 5000.0, 0.5, 0.03);
  EXPECT_NEAR(pos_a[0] / n_a[0], 0.2, 0.03);
  EXPECT_NEAR(pos_a[1] / n_a[1], 0.7, 0.03);
}

TEST(GenerateSyntheticTest, NoLeakageMeansIndependence) {
  SynthConfig cfg;
  cfg.base_rates = {{0.5, 0.5}, {0.5, 0.5}};
  cfg.leakage = 0.0;
  const SplitDatasets d = generate_synthetic(cfg);
  const VocabPartition vocab = partition_vocab(cfg);

  std::vector<std::vector<double>> ay(2, std::vector<double>(2, 0.0));
  // Tokens by group: class-block vs neutral-block counts.
  std::vector<std::vector<double>> tok(2, std::vector<double>(2, 0.0));
  for (const auto& ex : d.train.examples) {
    ay[ex.attr][ex.label] += 1;
    for (auto t : ex.tokens) {
      for (const auto& g : vocab.group_blocks) ASSERT_FALSE(g.contains(t));
      tok[ex.attr][vocab.neutral.contains(t) ? 1 : 0] += 1;
    }
  }
  EXPECT_LT(chi_square(ay), kChi2Df1Alpha01);
  EXPECT_LT(chi_square(tok), kChi2Df1Alpha01);
}

TEST(GenerateSyntheticTest, TokensFollowBlocks) {
  // Every token of an example lies in its group block, its class block or
  // the neutral block.
  SynthConfig cfg;
  const SplitDatasets d = generate_synthetic(cfg);
  const VocabPartition v = partition_vocab(cfg);
  double in_group = 0.0, total = 0.0;
  for (const auto& ex : d.test.examples) {
    for (auto t : ex.tokens) {
      const bool g = v.group_blocks[ex.attr].contains(t);
      ASSERT_TRUE(g || v.class_blocks[ex.label].contains(t) ||
                  v.neutral.contains(t));
      in_group += g;
      total += 1;
    }
  }
  EXPECT_NEAR(in_group / total, cfg.leakage, 0.01);
}

TEST(GenerateSyntheticTest, Deterministic) {
  SynthConfig cfg;
  cfg.n_train = 300;
  const SplitDatasets a = generate_synthetic(cfg);
  const SplitDatasets b = generate_synthetic(cfg);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  cfg.seed = 2;
  EXPECT_NE(generate_synthetic(cfg).train, a.train);
}

TEST(GenerateSyntheticTest, SplitsDiffer) {
  SynthConfig cfg;
  cfg.n_train = cfg.n_val = cfg.n_test = 50;
  const SplitDatasets d = generate_synthetic(cfg);
  EXPECT_NE(d.train.examples, d.val.examples);
  EXPECT_EQ(d.val.split, Split::kVal);
}

TEST(GenerateSyntheticTest, VocabularyPartitionIsDisjoint) {
  SynthConfig cfg;
  cfg.num_groups = 3;
  cfg.group_priors = {0.2, 0.3, 0.5};
  cfg.base_rates = {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  const VocabPartition v = partition_vocab(cfg);
  std::vector<int> owner(cfg.vocab_size, 0);
  auto mark = [&](const TokenBlock& b) {
    for (auto t = b.begin; t < b.end; ++t) ++owner[t];
  };
  for (const auto& b : v.group_blocks) mark(b);
  for (const auto& b : v.class_blocks) mark(b);
  mark(v.neutral);
  for (int o : owner) EXPECT_EQ(o, 1);
}

TEST(GenerateSyntheticTest, InvalidConfig) {
  SynthConfig cfg;
  cfg.group_priors = {0.5, 0.4};
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SynthConfig();
  cfg.leakage = 0.95;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SynthConfig();
  cfg.base_rates = {{0.8, 0.2}};
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
  cfg = SynthConfig();
  cfg.n_val = 0;
  EXPECT_THROW(generate_synthetic(cfg), ConfigError);
}

TEST(GenerateSyntheticTest, EmptyCellNamesIt) {
  SynthConfig cfg;
  cfg.base_rates = {{1.0, 0.0}, {0.3, 0.7}};
  try {
    generate_synthetic(cfg);
    FAIL() << "expected RegenerationError";
  } catch (const RegenerationError& e) {
    EXPECT_EQ(e.attr(), 0u);
    EXPECT_EQ(e.label(), 1u);
  }
}

TEST(JsonlTest, SingleRecord) {
  TempDir dir;
  const std::string path = dir.file("one.jsonl");
  write_file(path, "{\"tokens\": [1, 2], \"y\": 0, \"a\": 1}\n");
  write_file(header_path(path),
             "{\"vocab_size\": 10, \"num_classes\": 2, \"num_groups\": 2}");
  const Dataset d = load_jsonl(path);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.examples[0].tokens, (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(d.examples[0].label, 0u);
  EXPECT_EQ(d.examples[0].attr, 1u);
}

TEST(JsonlTest, RoundTrip) {
  SynthConfig cfg;
  cfg.n_train = 1000;
  const Dataset d = generate_synthetic(cfg).train;
  TempDir dir;
  const std::string path = dir.file("train.jsonl");
  save_jsonl(d, path);
  EXPECT_EQ(header_path(path), dir.file("train.header.json"));
  const Dataset back = load_jsonl(path);
  EXPECT_EQ(back.examples, d.examples);
  EXPECT_EQ(back.vocab_size, d.vocab_size);
  EXPECT_EQ(back.num_classes, d.num_classes);
  EXPECT_EQ(back.num_groups, d.num_groups);
  // Saving twice gives identical bytes.
  const std::string again = dir.file("again.jsonl");
  save_jsonl(back, again);
  EXPECT_EQ(read_file(path), read_file(again));
}

class JsonlErrorTest : public ::testing::Test {
 protected:
  std::string write(const std::string& body) {
    const std::string path = dir_.file("bad.jsonl");
    write_file(path, body);
    write_file(header_path(path),
               "{\"vocab_size\": 10, \"num_classes\": 2, \"num_groups\": 2}");
    return path;
  }
  TempDir dir_;
};

TEST_F(JsonlErrorTest, LabelOutOfRangeNamesLine) {
  const std::string path = write(
      "{\"tokens\": [1], \"y\": 0, \"a\": 0}\n"
      "{\"tokens\": [1], \"y\": 5, \"a\": 0}\n");
  try {
    load_jsonl(path);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST_F(JsonlErrorTest, MalformedLineNamesLine) {
  const std::string path = write(
      "{\"tokens\": [1], \"y\": 0, \"a\": 0}\n"
      "{\"tokens\": [1], \"y\": 0, \"a\": 0}\n"
      "{\"tokens\": [1, \n");
  try {
    load_jsonl(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST_F(JsonlErrorTest, OtherViolations) {
  EXPECT_THROW(load_jsonl(write("{\"tokens\": [11], \"y\": 0, \"a\": 0}\n")),
               ValidationError);
  EXPECT_THROW(load_jsonl(write("{\"tokens\": [1], \"y\": 0, \"a\": 2}\n")),
               ValidationError);
  EXPECT_THROW(load_jsonl(write("{\"tokens\": [], \"y\": 0, \"a\": 0}\n")),
               ValidationError);
  EXPECT_THROW(load_jsonl(write("{\"tokens\": [-1], \"y\": 0, \"a\": 0}\n")),
               ParseError);
  EXPECT_THROW(load_jsonl(write("{\"tokens\": [1], \"y\": \"x\", \"a\": 0}\n")),
               ParseError);
}

TEST(JsonlTest, MissingHeader) {
  TempDir dir;
  const std::string path = dir.file("x.jsonl");
  write_file(path, "{\"tokens\": [1], \"y\": 0, \"a\": 0}\n");
  EXPECT_THROW(load_jsonl(path), Error);
}

Dataset small_dataset(std::size_t n, std::uint32_t cells) {
  Dataset d;
  d.vocab_size = 4;
  d.num_classes = 2;
  d.num_groups = 2;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::uint32_t>(i % cells);
    d.examples.push_back({{1}, c % 2, c / 2});
  }
  return d;
}

TEST(StratifiedBatchesTest, PartitionWithDroppedTail) {
  const Dataset d = small_dataset(10, 4);
  const auto batches = stratified_batches(d, 4, 3);
  ASSERT_EQ(batches.size(), 2u);
  std::set<std::size_t> seen;
  for (const auto& b : batches) {
    EXPECT_EQ(b.size(), 4u);
    for (auto i : b) {
      EXPECT_LT(i, 10u);
      EXPECT_TRUE(seen.insert(i).second);
    }
  }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(StratifiedBatchesTest, EveryEpochIsPartition) {
  SynthConfig cfg;
  cfg.n_train = 1003;
  const Dataset d = generate_synthetic(cfg).train;
  StratifiedBatcher batcher(d, 16, 5);
  EXPECT_EQ(batcher.batches_per_epoch(), 62u);
  for (std::uint64_t e = 0; e < 4; ++e) {
    const auto batches = batcher.epoch(e);
    std::vector<int> count(d.size(), 0);
    for (const auto& b : batches) {
      ASSERT_EQ(b.size(), 16u);
      for (auto i : b) ++count[i];
      // Some cell holds two anchors.
      std::vector<int> cell(4, 0);
      for (auto i : b) ++cell[d.examples[i].attr * 2 + d.examples[i].label];
      EXPECT_GE(*std::max_element(cell.begin(), cell.end()), 2);
    }
    std::size_t used = 0;
    for (int c : count) {
      EXPECT_LE(c, 1);
      used += c;
    }
    EXPECT_EQ(used, 62u * 16u);
  }
  EXPECT_NE(batcher.epoch(0), batcher.epoch(1));
}

TEST(StratifiedBatchesTest, SharedCellWheneverPossible) {
  // Four cells, N = 2. A batch without a shared cell is allowed only when no
  // later example comes from the cell of its first anchor.
  const Dataset d = small_dataset(40, 4);
  auto cell = [&](std::size_t i) {
    return d.examples[i].attr * 2 + d.examples[i].label;
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto batches = stratified_batches(d, 2, seed);
    ASSERT_EQ(batches.size(), 20u);
    std::size_t shared = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      if (cell(batches[b][0]) == cell(batches[b][1])) {
        ++shared;
        continue;
      }
      for (std::size_t later = b + 1; later < batches.size(); ++later) {
        for (auto i : batches[later]) {
          EXPECT_NE(cell(i), cell(batches[b][0]));
        }
      }
    }
    EXPECT_GE(shared, 15u);
  }
}

TEST(StratifiedBatchesTest, SingletonCellTolerated) {
  Dataset d = small_dataset(12, 3);
  d.examples[5] = {{1}, 1, 1};  // the only (1, 1) example
  std::size_t seen = 0;
  for (std::uint64_t e = 0; e < 10; ++e) {
    for (const auto& b : StratifiedBatcher(d, 4, 1).epoch(e)) {
      seen += std::count(b.begin(), b.end(), std::size_t{5});
    }
  }
  EXPECT_GT(seen, 0u);
}

TEST(StratifiedBatchesTest, Deterministic) {
  const Dataset d = small_dataset(50, 4);
  EXPECT_EQ(stratified_batches(d, 5, 9), stratified_batches(d, 5, 9));
  EXPECT_NE(stratified_batches(d, 5, 9), stratified_batches(d, 5, 10));
}

TEST(StratifiedBatchesTest, Errors) {
  const Dataset d = small_dataset(10, 4);
  EXPECT_THROW(stratified_batches(d, 11, 1), ConfigError);
  EXPECT_THROW(stratified_batches(d, 1, 1), ConfigError);
  EXPECT_THROW(stratified_batches(Dataset{}, 2, 1), ConfigError);
}

TEST(SplitTest, Names) {
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    EXPECT_EQ(parse_split(split_name(s)), s);
  }
  EXPECT_THROW(parse_split("dev"), ConfigError);
}

}  // namespace
}  // namespace faircon
