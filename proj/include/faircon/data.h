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

// Token-id corpora: synthetic biased generation, JSON Lines I/O and
// stratified contrastive batching.
//
// Generation follows the dependency order group -> label -> tokens. The
// vocabulary is split into disjoint blocks:
//
//   [ group 0 | ... | group G-1 | class 0 | ... | class C-1 | neutral ]
//
// Every token of an example with group a and label y is drawn from the block
// of group a with probability `leakage`, from the block of class y with
// probability `class_signal`, and from the neutral block otherwise. Leakage is
// what makes the group recoverable from the text.

#ifndef FAIRCON_DATA_H_
#define FAIRCON_DATA_H_

#include <cstdint>
#include <string>
#include <vector>

#include "faircon/common.h"

namespace faircon {

enum class Split { kTrain, kVal, kTest };

std::string split_name(Split split);
Split parse_split(const std::string& name);

struct Example {
  std::vector<std::uint32_t> tokens;
  std::uint32_t label = 0;
  std::uint32_t attr = 0;

  bool operator==(const Example&) const = default;
};

struct Dataset {
  std::vector<Example> examples;
  std::uint32_t vocab_size = 0;
  std::uint32_t num_classes = 0;
  std::uint32_t num_groups = 0;
  Split split = Split::kTrain;

  std::size_t size() const { return examples.size(); }
  bool operator==(const Dataset&) const = default;

  // Throws ValidationError on the first example violating vocab/C/G.
  void validate() const;

  // Number of examples per (group, label) cell, indexed [a * C + y].
  std::vector<std::size_t> cell_counts() const;
};

struct SplitDatasets {
  Dataset train;
  Dataset val;
  Dataset test;
};

struct SynthConfig {
  std::uint32_t vocab_size = 240;
  std::uint32_t num_classes = 2;
  std::uint32_t num_groups = 2;
  std::vector<double> group_priors = {0.5, 0.5};
  // p(y | a), one row per group.
  std::vector<std::vector<double>> base_rates = {{0.8, 0.2}, {0.3, 0.7}};
  double leakage = 0.5;
  double class_signal = 0.1;
  std::uint32_t doc_len = 20;
  std::size_t n_train = 5000;
  std::size_t n_val = 1000;
  std::size_t n_test = 2000;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

// Contiguous [begin, end) token-id range.
struct TokenBlock {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t size() const { return end - begin; }
  bool contains(std::uint32_t t) const { return t >= begin && t < end; }
};

struct VocabPartition {
  std::vector<TokenBlock> group_blocks;
  std::vector<TokenBlock> class_blocks;
  TokenBlock neutral;
};

// Disjoint sub-vocabularies for `cfg`. A quarter of the vocabulary is shared
// out among the groups, a quarter among the classes, the rest is neutral.
VocabPartition partition_vocab(const SynthConfig& cfg);

// Raised when a (group, label) train cell is empty after sampling.
class RegenerationError : public Error {
 public:
  RegenerationError(const std::string& what, std::uint32_t attr,
                    std::uint32_t label)
      : Error(what), attr_(attr), label_(label) {}
  std::uint32_t attr() const { return attr_; }
  std::uint32_t label() const { return label_; }

 private:
  std::uint32_t attr_;
  std::uint32_t label_;
};

SplitDatasets generate_synthetic(const SynthConfig& cfg);

// JSON Lines corpus plus a sidecar header next to it (see header_path).
void save_jsonl(const Dataset& dataset, const std::string& path);
Dataset load_jsonl(const std::string& path);

// "dir/train.jsonl" -> "dir/train.header.json".
std::string header_path(const std::string& corpus_path);

// Seeded per-epoch batching of anchor indices.
//
// Each epoch is a permutation of [0, n) cut into floor(n / N) batches of N;
// the short tail is dropped. A batch that would contain no two anchors from
// the same (group, label) cell swaps its last slot with a later index from a
// cell it already holds, when one exists, so the conditional contrastive term
// has in-cell negatives.
class StratifiedBatcher {
 public:
  // Throws ConfigError if anchors_per_batch < 2 or exceeds the dataset size.
  StratifiedBatcher(const Dataset& dataset, std::size_t anchors_per_batch,
                    std::uint64_t seed);

  std::vector<std::vector<std::size_t>> epoch(std::uint64_t epoch) const;
  std::size_t batches_per_epoch() const;

 private:
  std::vector<std::uint32_t> cell_of_;
  std::size_t anchors_per_batch_;
  std::uint64_t seed_;
};

// Batches of epoch 0.
std::vector<std::vector<std::size_t>> stratified_batches(
    const Dataset& dataset, std::size_t anchors_per_batch, std::uint64_t seed);

}  // namespace faircon

#endif  // FAIRCON_DATA_H_
