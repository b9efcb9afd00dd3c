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

#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace faircon {
namespace {

constexpr std::uint64_t kTagView = 0x5649;

// Partial Fisher-Yates: first k entries of `items` become the picks.
void pick_prefix(std::vector<std::size_t>& items, std::size_t k, Rng& rng) {
  const std::size_t m = items.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(items[i], items[i + rng.index(m - i)]);
  }
}

// Substitute for `token` from its entry, never the token itself.
std::uint32_t draw_substitute(const std::vector<std::uint32_t>& entry,
                              std::uint32_t token, Rng& rng) {
  std::size_t others = 0;
  for (auto s : entry) others += s != token;
  std::size_t k = rng.index(others);
  for (auto s : entry) {
    if (s == token) continue;
    if (k-- == 0) return s;
  }
  return entry.front();  // unreachable for a valid lexicon
}

std::vector<std::uint32_t> synonym_replace(std::vector<std::uint32_t> tokens,
                                           std::size_t edits,
                                           const SynonymLexicon& lexicon,
                                           Rng& rng) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lexicon.find(tokens[i]) != nullptr) eligible.push_back(i);
  }
  const std::size_t k = std::min(edits, eligible.size());
  pick_prefix(eligible, k, rng);
  for (std::size_t i = 0; i < k; ++i) {
    auto& tok = tokens[eligible[i]];
    tok = draw_substitute(*lexicon.find(tok), tok, rng);
  }
  return tokens;
}

std::vector<std::uint32_t> random_insert(std::vector<std::uint32_t> tokens,
                                         std::size_t edits,
                                         const SynonymLexicon& lexicon,
                                         Rng& rng) {
  for (std::size_t e = 0; e < edits; ++e) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (lexicon.find(tokens[i]) != nullptr) eligible.push_back(i);
    }
    if (eligible.empty()) break;
    const std::uint32_t source = tokens[eligible[rng.index(eligible.size())]];
    const std::uint32_t inserted =
        draw_substitute(*lexicon.find(source), source, rng);
    const std::size_t slot = rng.index(tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(slot), inserted);
  }
  return tokens;
}

std::vector<std::uint32_t> random_swap(std::vector<std::uint32_t> tokens,
                                       std::size_t edits, Rng& rng) {
  const std::size_t n = tokens.size();
  if (n < 2) return tokens;
  for (std::size_t e = 0; e < edits; ++e) {
    const std::size_t i = rng.index(n);
    std::size_t j = rng.index(n - 1);
    if (j >= i) ++j;
    std::swap(tokens[i], tokens[j]);
  }
  return tokens;
}

std::vector<std::uint32_t> random_delete(const std::vector<std::uint32_t>& tokens,
                                         std::size_t edits, Rng& rng) {
  const std::size_t n = tokens.size();
  const std::size_t k = std::min(edits, n - 1);
  if (k == 0) return tokens;
  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  pick_prefix(positions, k, rng);
  std::vector<bool> drop(n, false);
  for (std::size_t i = 0; i < k; ++i) drop[positions[i]] = true;
  std::vector<std::uint32_t> out;
  out.reserve(n - k);
  for (std::size_t i = 0; i < n; ++i) {
    if (!drop[i]) out.push_back(tokens[i]);
  }
  return out;
}

}  // namespace

std::string augment_kind_name(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kSynonymReplace:
      return "synonym_replace";
    case AugmentKind::kRandomInsert:
      return "random_insert";
    case AugmentKind::kRandomSwap:
      return "random_swap";
    case AugmentKind::kRandomDelete:
      return "random_delete";
  }
  return "synonym_replace";
}

AugmentKind parse_augment_kind(const std::string& name) {
  if (name == "synonym_replace") return AugmentKind::kSynonymReplace;
  if (name == "random_insert") return AugmentKind::kRandomInsert;
  if (name == "random_swap") return AugmentKind::kRandomSwap;
  if (name == "random_delete") return AugmentKind::kRandomDelete;
  throw ConfigError("unknown augmentation '" + name + "'");
}

void AugmentStrategy::validate() const {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw ConfigError("augmentation rate must lie in (0, 1]");
  }
}

std::size_t AugmentStrategy::edits_for(std::size_t len) const {
  // The epsilon keeps products such as 0.1 * 30 = 3.0000000000000004 at 3.
  return static_cast<std::size_t>(
      std::ceil(rate * static_cast<double>(len) - 1e-9));
}

SynonymLexicon::SynonymLexicon(
    std::map<std::uint32_t, std::vector<std::uint32_t>> entries,
    std::uint32_t vocab_size)
    : entries_(std::move(entries)), vocab_size_(vocab_size) {
  for (const auto& [token, subs] : entries_) {
    const std::string where = "lexicon entry " + std::to_string(token) + ": ";
    if (token >= vocab_size_) throw ConfigError(where + "key >= vocab_size");
    if (subs.empty()) throw ConfigError(where + "empty substitute list");
    bool has_other = false;
    for (auto s : subs) {
      if (s >= vocab_size_) throw ConfigError(where + "substitute >= vocab_size");
      has_other = has_other || s != token;
    }
    if (!has_other) throw ConfigError(where + "only maps to itself");
  }
}

SynonymLexicon SynonymLexicon::from_synth_config(const SynthConfig& cfg) {
  const VocabPartition p = partition_vocab(cfg);
  std::map<std::uint32_t, std::vector<std::uint32_t>> entries;
  auto add_block = [&](const TokenBlock& block) {
    if (block.size() < 2) return;
    for (std::uint32_t t = block.begin; t < block.end; ++t) {
      auto& subs = entries[t];
      for (std::uint32_t s = block.begin; s < block.end; ++s) {
        if (s != t) subs.push_back(s);
      }
    }
  };
  for (const auto& b : p.group_blocks) add_block(b);
  for (const auto& b : p.class_blocks) add_block(b);
  add_block(p.neutral);
  return SynonymLexicon(std::move(entries), cfg.vocab_size);
}

SynonymLexicon SynonymLexicon::load_json(const std::string& path,
                                         std::uint32_t vocab_size) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon '" + path + "'");
  std::map<std::uint32_t, std::vector<std::uint32_t>> entries;
  try {
    const auto j = nlohmann::json::parse(in);
    if (!j.is_object()) throw ParseError(path + ": lexicon must be an object", 0);
    for (const auto& [key, value] : j.items()) {
      std::size_t used = 0;
      const unsigned long id = std::stoul(key, &used);
      if (used != key.size()) {
        throw ParseError(path + ": bad token key '" + key + "'", 0);
      }
      entries[static_cast<std::uint32_t>(id)] =
          value.get<std::vector<std::uint32_t>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what(), 0);
  } catch (const std::logic_error&) {
    throw ParseError(path + ": token keys must be decimal integers", 0);
  }
  return SynonymLexicon(std::move(entries), vocab_size);
}

void SynonymLexicon::save_json(const std::string& path) const {
  // Keys in numeric order, which std::map gives us.
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [token, subs] : entries_) j[std::to_string(token)] = subs;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << j.dump() << '\n';
}

const std::vector<std::uint32_t>* SynonymLexicon::find(
    std::uint32_t token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::uint32_t> augment_tokens(
    const std::vector<std::uint32_t>& tokens, const AugmentStrategy& strategy,
    const SynonymLexicon& lexicon, std::uint64_t seed) {
  if (tokens.empty()) throw ValidationError("cannot augment an empty sequence");
  strategy.validate();
  Rng rng(seed);
  const std::size_t edits = strategy.edits_for(tokens.size());
  switch (strategy.kind) {
    case AugmentKind::kSynonymReplace:
      return synonym_replace(tokens, edits, lexicon, rng);
    case AugmentKind::kRandomInsert:
      return random_insert(tokens, edits, lexicon, rng);
    case AugmentKind::kRandomSwap:
      return random_swap(tokens, edits, rng);
    case AugmentKind::kRandomDelete:
      return random_delete(tokens, edits, rng);
  }
  return tokens;
}

std::vector<Example> make_pair_batch(const std::vector<Example>& anchors,
                                     const AugmentStrategy& strategy,
                                     const SynonymLexicon& lexicon,
                                     std::uint64_t seed) {
  if (anchors.empty()) throw ValidationError("pair batch needs >= 1 anchor");
  std::vector<Example> out;
  out.reserve(2 * anchors.size());
  out.insert(out.end(), anchors.begin(), anchors.end());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    Example view;
    view.tokens = augment_tokens(anchors[i].tokens, strategy, lexicon,
                                 derive_seed(seed, kTagView, i));
    view.label = anchors[i].label;
    view.attr = anchors[i].attr;
    out.push_back(std::move(view));
  }
  return out;
}

}  // namespace faircon
