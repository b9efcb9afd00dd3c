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

// EDA-style token edits (synonym replacement, random insertion, random swap,
// random deletion) and construction of anchor/view batches.

#ifndef FAIRCON_AUGMENT_H_
#define FAIRCON_AUGMENT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "faircon/data.h"

namespace faircon {

enum class AugmentKind { kSynonymReplace, kRandomInsert, kRandomSwap, kRandomDelete };

std::string augment_kind_name(AugmentKind kind);
AugmentKind parse_augment_kind(const std::string& name);

struct AugmentStrategy {
  AugmentKind kind = AugmentKind::kSynonymReplace;
  double rate = 0.1;

  void validate() const;  // rate in (0, 1]
  // ceil(rate * len): positions touched on a sequence of length `len`.
  std::size_t edits_for(std::size_t len) const;
};

// Token id -> substitutes. Tokens without an entry are never replaced and
// never used as an insertion source.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // Throws ConfigError if a list is empty, contains only the key itself, or
  // holds an id >= vocab_size.
  SynonymLexicon(std::map<std::uint32_t, std::vector<std::uint32_t>> entries,
                 std::uint32_t vocab_size);

  // Synonyms are the other members of the token's synthetic sub-vocabulary.
  static SynonymLexicon from_synth_config(const SynthConfig& cfg);

  static SynonymLexicon load_json(const std::string& path,
                                  std::uint32_t vocab_size);
  void save_json(const std::string& path) const;

  // nullptr when the token has no entry.
  const std::vector<std::uint32_t>* find(std::uint32_t token) const;
  std::uint32_t vocab_size() const { return vocab_size_; }
  const std::map<std::uint32_t, std::vector<std::uint32_t>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::uint32_t, std::vector<std::uint32_t>> entries_;
  std::uint32_t vocab_size_ = 0;
};

// Draw order for a fixed seed (Rng from common.h):
//   synonym_replace: partial Fisher-Yates over eligible positions
//     (k-th pick = k + index(m - k)), then per picked position in pick order
//     index(#substitutes other than the current token).
//   random_insert:   per insertion, index(#eligible tokens in the current
//     sequence), index(#substitutes), index(len + 1) for the slot.
//   random_swap:     per swap, i = index(len), j = index(len - 1) shifted past i.
//   random_delete:   partial Fisher-Yates over positions, at most len - 1 picks.
// Throws ValidationError on empty input.
std::vector<std::uint32_t> augment_tokens(
    const std::vector<std::uint32_t>& tokens, const AugmentStrategy& strategy,
    const SynonymLexicon& lexicon, std::uint64_t seed);

// Returns 2N examples: the N anchors followed by one augmented view of each,
// with label and attribute copied. View i uses derive_seed(seed, tag, i).
std::vector<Example> make_pair_batch(const std::vector<Example>& anchors,
                                     const AugmentStrategy& strategy,
                                     const SynonymLexicon& lexicon,
                                     std::uint64_t seed);

}  // namespace faircon

#endif  // FAIRCON_AUGMENT_H_
