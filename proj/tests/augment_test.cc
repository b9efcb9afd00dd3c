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

#include "faircon/augment.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace faircon {
namespace {

using Tokens = std::vector<std::uint32_t>;

// Tokens 0..9 each have the two substitutes t + 10 and t + 20.
SynonymLexicon ten_token_lexicon() {
  std::map<std::uint32_t, Tokens> entries;
  for (std::uint32_t t = 0; t < 10; ++t) entries[t] = {t + 10, t + 20};
  return SynonymLexicon(entries, 30);
}

AugmentStrategy strategy(AugmentKind kind, double rate) {
  AugmentStrategy s;
  s.kind = kind;
  s.rate = rate;
  return s;
}

TEST(AugmentTokensTest, SynonymReplaceReplay) {
  const SynonymLexicon lex = ten_token_lexicon();
  const Tokens in = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
  for (std::uint64_t seed : {1ull, 17ull, 2024ull}) {
    // Hand replay: two partial Fisher-Yates picks over positions 0..9, then
    // one index(2) per pick selecting the substitute.
    Rng r(seed);
    std::vector<std::size_t> pos(10);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    std::swap(pos[0], pos[0 + r.index(10)]);
    std::swap(pos[1], pos[1 + r.index(9)]);
    Tokens expected = in;
    for (int k = 0; k < 2; ++k) {
      const std::uint32_t t = expected[pos[k]];
      expected[pos[k]] = r.index(2) == 0 ? t + 10 : t + 20;
    }

    const Tokens out =
        augment_tokens(in, strategy(AugmentKind::kSynonymReplace, 0.2), lex, seed);
    EXPECT_EQ(out, expected);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (out[i] == in[i]) continue;
      ++changed;
      const Tokens& entry = *lex.find(in[i]);
      EXPECT_NE(std::find(entry.begin(), entry.end(), out[i]), entry.end());
    }
    EXPECT_EQ(changed, 2u);
  }
}

TEST(AugmentTokensTest, SynonymReplaceSkipsTokensWithoutEntry) {
  const SynonymLexicon lex = ten_token_lexicon();
  const Tokens in = {25, 26, 27, 4, 28};
  const Tokens out =
      augment_tokens(in, strategy(AugmentKind::kSynonymReplace, 1.0), lex, 3);
  EXPECT_EQ(out[0], 25u);
  EXPECT_EQ(out[4], 28u);
  EXPECT_TRUE(out[3] == 14u || out[3] == 24u);
}

TEST(AugmentTokensTest, SwapPreservesMultiset) {
  const SynonymLexicon lex = ten_token_lexicon();
  const Tokens in = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Tokens out =
        augment_tokens(in, strategy(AugmentKind::kRandomSwap, 0.1), lex, seed);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < in.size(); ++i) moved += out[i] != in[i];
    EXPECT_EQ(moved, 2u);  // one swap of two distinct positions
    std::sort(out.begin(), out.end());
    EXPECT_EQ(out, in);
  }
}

TEST(AugmentTokensTest, DeleteKeepsOneToken) {
  const SynonymLexicon lex = ten_token_lexicon();
  EXPECT_EQ(augment_tokens({7}, strategy(AugmentKind::kRandomDelete, 0.1), lex, 1),
            Tokens{7});
  const Tokens out =
      augment_tokens({1, 2, 3}, strategy(AugmentKind::kRandomDelete, 1.0), lex, 4);
  EXPECT_EQ(out.size(), 1u);
}

TEST(AugmentTokensTest, DeleteIsSubsequence) {
  const SynonymLexicon lex = ten_token_lexicon();
  const Tokens in = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 0, 1};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Tokens out =
        augment_tokens(in, strategy(AugmentKind::kRandomDelete, 0.25), lex, seed);
    ASSERT_EQ(out.size(), 9u);
    // Order-preserving: greedy subsequence match.
    std::size_t j = 0;
    for (std::size_t i = 0; i < in.size() && j < out.size(); ++i) {
      if (in[i] == out[j]) ++j;
    }
    EXPECT_EQ(j, out.size());
  }
}

TEST(AugmentTokensTest, InsertAddsSynonyms) {
  const SynonymLexicon lex = ten_token_lexicon();
  const Tokens in = {1, 2, 25, 3, 4, 26, 27, 28, 29, 5};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Tokens out =
        augment_tokens(in, strategy(AugmentKind::kRandomInsert, 0.2), lex, seed);
    ASSERT_EQ(out.size(), 12u);
    // Removing the inserted tokens gives back the input.
    std::size_t inserted = 0;
    std::size_t j = 0;
    for (auto t : out) {
      if (j < in.size() && t == in[j]) {
        ++j;
      } else {
        ++inserted;
        EXPECT_GE(t, 10u);
      }
    }
    EXPECT_EQ(j, in.size());
    EXPECT_EQ(inserted, 2u);
  }
}

TEST(AugmentTokensTest, InsertWithoutEligibleTokenIsNoop) {
  const SynonymLexicon lex = ten_token_lexicon();
  const Tokens in = {25, 26};
  EXPECT_EQ(augment_tokens(in, strategy(AugmentKind::kRandomInsert, 1.0), lex, 1),
            in);
}

TEST(AugmentTokensTest, EditCounts) {
  EXPECT_EQ(strategy(AugmentKind::kRandomSwap, 0.1).edits_for(1), 1u);
  EXPECT_EQ(strategy(AugmentKind::kRandomSwap, 0.1).edits_for(10), 1u);
  EXPECT_EQ(strategy(AugmentKind::kRandomSwap, 0.1).edits_for(11), 2u);
  EXPECT_EQ(strategy(AugmentKind::kRandomSwap, 0.1).edits_for(30), 3u);
  EXPECT_EQ(strategy(AugmentKind::kRandomSwap, 0.2).edits_for(10), 2u);
}

TEST(AugmentTokensTest, DeterministicAndInVocabulary) {
  SynthConfig cfg;
  const SynonymLexicon lex = SynonymLexicon::from_synth_config(cfg);
  const Dataset d = generate_synthetic(cfg).val;
  for (AugmentKind kind : {AugmentKind::kSynonymReplace, AugmentKind::kRandomInsert,
                           AugmentKind::kRandomSwap, AugmentKind::kRandomDelete}) {
    for (std::size_t i = 0; i < 50; ++i) {
      const auto s = strategy(kind, 0.3);
      const Tokens a = augment_tokens(d.examples[i].tokens, s, lex, i);
      EXPECT_EQ(a, augment_tokens(d.examples[i].tokens, s, lex, i));
      EXPECT_FALSE(a.empty());
      for (auto t : a) EXPECT_LT(t, cfg.vocab_size);
    }
  }
}

TEST(AugmentTokensTest, Errors) {
  const SynonymLexicon lex = ten_token_lexicon();
  EXPECT_THROW(augment_tokens({}, strategy(AugmentKind::kRandomSwap, 0.1), lex, 1),
               ValidationError);
  EXPECT_THROW(augment_tokens({1}, strategy(AugmentKind::kRandomSwap, 0.0), lex, 1),
               ConfigError);
  EXPECT_THROW(augment_tokens({1}, strategy(AugmentKind::kRandomSwap, 1.5), lex, 1),
               ConfigError);
  EXPECT_THROW(parse_augment_kind("back_translate"), ConfigError);
}

TEST(SynonymLexiconTest, RejectsBadEntries) {
  EXPECT_THROW(SynonymLexicon({{1, {1}}}, 5), ConfigError);
  EXPECT_THROW(SynonymLexicon({{1, {}}}, 5), ConfigError);
  EXPECT_THROW(SynonymLexicon({{1, {7}}}, 5), ConfigError);
  EXPECT_THROW(SynonymLexicon({{9, {1}}}, 5), ConfigError);
  EXPECT_NO_THROW(SynonymLexicon({{1, {1, 2}}}, 5));
}

TEST(SynonymLexiconTest, SynthLexiconStaysInBlock) {
  SynthConfig cfg;
  const SynonymLexicon lex = SynonymLexicon::from_synth_config(cfg);
  const VocabPartition p = partition_vocab(cfg);
  for (std::uint32_t t = 0; t < cfg.vocab_size; ++t) {
    const Tokens* subs = lex.find(t);
    ASSERT_NE(subs, nullptr);
    const TokenBlock* home = &p.neutral;
    for (const auto& b : p.group_blocks) if (b.contains(t)) home = &b;
    for (const auto& b : p.class_blocks) if (b.contains(t)) home = &b;
    EXPECT_EQ(subs->size(), home->size() - 1);
    for (auto s : *subs) {
      EXPECT_NE(s, t);
      EXPECT_TRUE(home->contains(s));
    }
  }
}

TEST(SynonymLexiconTest, JsonRoundTrip) {
  testing::TempDir dir;
  const SynonymLexicon lex = ten_token_lexicon();
  lex.save_json(dir.file("lex.json"));
  const SynonymLexicon back = SynonymLexicon::load_json(dir.file("lex.json"), 30);
  EXPECT_EQ(back.entries(), lex.entries());
  testing::write_file(dir.file("bad.json"), "{\"x\": [1]}");
  EXPECT_THROW(SynonymLexicon::load_json(dir.file("bad.json"), 30), ParseError);
}

TEST(MakePairBatchTest, SingleAnchor) {
  const SynonymLexicon lex = ten_token_lexicon();
  const std::vector<Example> anchors = {{{1, 2, 3}, 0, 1}};
  const auto batch =
      make_pair_batch(anchors, strategy(AugmentKind::kSynonymReplace, 0.3), lex, 8);
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_EQ(batch[0], anchors[0]);
  EXPECT_EQ(batch[1].label, 0u);
  EXPECT_EQ(batch[1].attr, 1u);
  EXPECT_NE(batch[1].tokens, anchors[0].tokens);
}

TEST(MakePairBatchTest, CopyContractAndViewSeeds) {
  const SynonymLexicon lex = ten_token_lexicon();
  const std::vector<Example> anchors = {
      {{1, 2, 3, 4}, 0, 1}, {{5, 6}, 1, 0}, {{7, 8, 9}, 1, 1}};
  const auto s = strategy(AugmentKind::kSynonymReplace, 0.5);
  const auto batch = make_pair_batch(anchors, s, lex, 99);
  ASSERT_EQ(batch.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(batch[i], anchors[i]);
    EXPECT_EQ(batch[i + 3].label, anchors[i].label);
    EXPECT_EQ(batch[i + 3].attr, anchors[i].attr);
    EXPECT_EQ(batch[i + 3].tokens,
              augment_tokens(anchors[i].tokens, s, lex,
                             derive_seed(99, 0x5649, i)));
  }
}

TEST(MakePairBatchTest, NoEditLeavesViewEqual) {
  // A single token with no lexicon entry cannot be replaced.
  const SynonymLexicon lex = ten_token_lexicon();
  const std::vector<Example> anchors = {{{29}, 1, 0}};
  const auto batch =
      make_pair_batch(anchors, strategy(AugmentKind::kSynonymReplace, 0.1), lex, 1);
  EXPECT_EQ(batch[1], batch[0]);
  EXPECT_THROW(make_pair_batch({}, strategy(AugmentKind::kRandomSwap, 0.1), lex, 1),
               ValidationError);
}

}  // namespace
}  // namespace faircon
