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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace faircon {
namespace {

constexpr std::uint64_t kTagSplit = 0x5350;
constexpr std::uint64_t kTagBatch = 0x4241;

void check_distribution(const std::vector<double>& p, std::size_t n,
                        const std::string& name) {
  if (p.size() != n) {
    throw ConfigError(name + " has " + std::to_string(p.size()) +
                      " entries, expected " + std::to_string(n));
  }
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError(name + " has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << name << " sums to " << sum << ", not 1";
    throw ConfigError(os.str());
  }
}

Dataset sample_split(const SynthConfig& cfg, const VocabPartition& vocab,
                     Split split, std::size_t count) {
  Dataset out;
  out.vocab_size = cfg.vocab_size;
  out.num_classes = cfg.num_classes;
  out.num_groups = cfg.num_groups;
  out.split = split;
  out.examples.reserve(count);

  Rng rng(derive_seed(cfg.seed, kTagSplit, static_cast<std::uint64_t>(split)));
  for (std::size_t n = 0; n < count; ++n) {
    Example ex;
    ex.attr = static_cast<std::uint32_t>(
        rng.categorical(cfg.group_priors.data(), cfg.num_groups));
    ex.label = static_cast<std::uint32_t>(
        rng.categorical(cfg.base_rates[ex.attr].data(), cfg.num_classes));
    ex.tokens.resize(cfg.doc_len);
    const TokenBlock& gblock = vocab.group_blocks[ex.attr];
    const TokenBlock& cblock = vocab.class_blocks[ex.label];
    for (auto& tok : ex.tokens) {
      const double u = rng.uniform();
      const TokenBlock& block = u < cfg.leakage ? gblock
                                : u < cfg.leakage + cfg.class_signal
                                    ? cblock
                                    : vocab.neutral;
      tok = block.begin + static_cast<std::uint32_t>(rng.index(block.size()));
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

std::string split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + name + "'");
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    const std::string where = "example " + std::to_string(i) + ": ";
    if (ex.tokens.empty()) throw ValidationError(where + "empty token list");
    for (auto t : ex.tokens) {
      if (t >= vocab_size) {
        throw ValidationError(where + "token " + std::to_string(t) +
                              " >= vocab_size " + std::to_string(vocab_size));
      }
    }
    if (ex.label >= num_classes) {
      throw ValidationError(where + "label out of range");
    }
    if (ex.attr >= num_groups) {
      throw ValidationError(where + "attribute out of range");
    }
  }
}

std::vector<std::size_t> Dataset::cell_counts() const {
  std::vector<std::size_t> counts(
      static_cast<std::size_t>(num_groups) * num_classes, 0);
  for (const auto& ex : examples) {
    ++counts[static_cast<std::size_t>(ex.attr) * num_classes + ex.label];
  }
  return counts;
}

void SynthConfig::validate() const {
  if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
  if (num_groups < 1) throw ConfigError("num_groups must be >= 1");
  check_distribution(group_priors, num_groups, "group_priors");
  if (base_rates.size() != num_groups) {
    throw ConfigError("base_rates needs one row per group");
  }
  for (std::size_t a = 0; a < base_rates.size(); ++a) {
    check_distribution(base_rates[a], num_classes,
                       "base_rates[" + std::to_string(a) + "]");
  }
  if (!(leakage >= 0.0 && leakage <= 1.0)) {
    throw ConfigError("leakage must lie in [0, 1]");
  }
  if (!(class_signal >= 0.0 && class_signal <= 1.0)) {
    throw ConfigError("class_signal must lie in [0, 1]");
  }
  if (leakage + class_signal > 1.0) {
    throw ConfigError("leakage + class_signal must be <= 1");
  }
  if (doc_len == 0) throw ConfigError("doc_len must be > 0");
  if (n_train == 0 || n_val == 0 || n_test == 0) {
    throw ConfigError("split sizes must be > 0");
  }
  // Throws when the vocabulary is too small to partition.
  partition_vocab(*this);
}

VocabPartition partition_vocab(const SynthConfig& cfg) {
  const std::uint32_t per_group = cfg.vocab_size / (4 * cfg.num_groups);
  const std::uint32_t per_class = cfg.vocab_size / (4 * cfg.num_classes);
  if (per_group < 2 || per_class < 2) {
    throw ConfigError("vocab_size " + std::to_string(cfg.vocab_size) +
                      " too small: every group and class block needs >= 2 "
                      "tokens");
  }
  VocabPartition p;
  std::uint32_t next = 0;
  for (std::uint32_t a = 0; a < cfg.num_groups; ++a) {
    p.group_blocks.push_back({next, next + per_group});
    next += per_group;
  }
  for (std::uint32_t y = 0; y < cfg.num_classes; ++y) {
    p.class_blocks.push_back({next, next + per_class});
    next += per_class;
  }
  p.neutral = {next, cfg.vocab_size};
  if (p.neutral.size() < 2) {
    throw ConfigError("vocab_size leaves fewer than 2 neutral tokens");
  }
  return p;
}

SplitDatasets generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const VocabPartition vocab = partition_vocab(cfg);
  SplitDatasets out;
  out.train = sample_split(cfg, vocab, Split::kTrain, cfg.n_train);
  out.val = sample_split(cfg, vocab, Split::kVal, cfg.n_val);
  out.test = sample_split(cfg, vocab, Split::kTest, cfg.n_test);

  const auto counts = out.train.cell_counts();
  for (std::uint32_t a = 0; a < cfg.num_groups; ++a) {
    for (std::uint32_t y = 0; y < cfg.num_classes; ++y) {
      if (counts[a * cfg.num_classes + y] == 0) {
        throw RegenerationError(
            "train cell (a=" + std::to_string(a) + ", y=" + std::to_string(y) +
                ") is empty; raise n_train or change the seed",
            a, y);
      }
    }
  }
  return out;
}

std::string header_path(const std::string& corpus_path) {
  std::filesystem::path p(corpus_path);
  if (p.extension() == ".jsonl") p.replace_extension();
  return p.string() + ".header.json";
}

void save_jsonl(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& ex : dataset.examples) {
    nlohmann::ordered_json rec;
    rec["tokens"] = ex.tokens;
    rec["y"] = ex.label;
    rec["a"] = ex.attr;
    out << rec.dump() << '\n';
  }
  if (!out) throw Error("write to '" + path + "' failed");

  nlohmann::ordered_json header;
  header["vocab_size"] = dataset.vocab_size;
  header["num_classes"] = dataset.num_classes;
  header["num_groups"] = dataset.num_groups;
  header["split"] = split_name(dataset.split);
  std::ofstream hout(header_path(path), std::ios::binary | std::ios::trunc);
  if (!hout) throw Error("cannot open '" + header_path(path) + "'");
  hout << header.dump(2) << '\n';
}

Dataset load_jsonl(const std::string& path) {
  const std::string hpath = header_path(path);
  std::ifstream hin(hpath);
  if (!hin) throw Error("missing dataset header '" + hpath + "'");
  Dataset ds;
  try {
    const auto header = nlohmann::json::parse(hin);
    ds.vocab_size = header.at("vocab_size").get<std::uint32_t>();
    ds.num_classes = header.at("num_classes").get<std::uint32_t>();
    ds.num_groups = header.at("num_groups").get<std::uint32_t>();
    if (header.contains("split")) {
      ds.split = parse_split(header["split"].get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(hpath + ": " + e.what(), 0);
  }

  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    Example ex;
    try {
      const auto rec = nlohmann::json::parse(line);
      const auto& toks = rec.at("tokens");
      if (!toks.is_array()) throw ParseError(where + "tokens is not an array", lineno);
      for (const auto& t : toks) {
        if (!t.is_number_integer() || t.get<std::int64_t>() < 0) {
          throw ParseError(where + "token ids must be non-negative integers",
                           lineno);
        }
        const auto v = t.get<std::int64_t>();
        if (v >= ds.vocab_size) {
          throw ValidationError(where + "token " + std::to_string(v) +
                                    " >= vocab_size",
                                lineno);
        }
        ex.tokens.push_back(static_cast<std::uint32_t>(v));
      }
      const auto& y = rec.at("y");
      const auto& a = rec.at("a");
      if (!y.is_number_integer() || !a.is_number_integer()) {
        throw ParseError(where + "y and a must be integers", lineno);
      }
      const auto yv = y.get<std::int64_t>();
      const auto av = a.get<std::int64_t>();
      if (yv < 0 || yv >= ds.num_classes) {
        throw ValidationError(where + "y=" + std::to_string(yv) +
                                  " outside [0, " +
                                  std::to_string(ds.num_classes) + ")",
                              lineno);
      }
      if (av < 0 || av >= ds.num_groups) {
        throw ValidationError(where + "a=" + std::to_string(av) +
                                  " outside [0, " +
                                  std::to_string(ds.num_groups) + ")",
                              lineno);
      }
      ex.label = static_cast<std::uint32_t>(yv);
      ex.attr = static_cast<std::uint32_t>(av);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + e.what(), lineno);
    }
    if (ex.tokens.empty()) {
      throw ValidationError(where + "empty token list", lineno);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

StratifiedBatcher::StratifiedBatcher(const Dataset& dataset,
                                     std::size_t anchors_per_batch,
                                     std::uint64_t seed)
    : anchors_per_batch_(anchors_per_batch), seed_(seed) {
  if (anchors_per_batch < 2) {
    throw ConfigError("anchors per batch must be >= 2");
  }
  if (dataset.examples.empty()) throw ConfigError("dataset is empty");
  if (anchors_per_batch > dataset.size()) {
    throw ConfigError("anchors per batch (" + std::to_string(anchors_per_batch) +
                      ") exceeds dataset size (" +
                      std::to_string(dataset.size()) + ")");
  }
  cell_of_.reserve(dataset.size());
  for (const auto& ex : dataset.examples) {
    cell_of_.push_back(ex.attr * dataset.num_classes + ex.label);
  }
}

std::size_t StratifiedBatcher::batches_per_epoch() const {
  return cell_of_.size() / anchors_per_batch_;
}

std::vector<std::vector<std::size_t>> StratifiedBatcher::epoch(
    std::uint64_t epoch) const {
  const std::size_t n = cell_of_.size();
  const std::size_t per = anchors_per_batch_;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(seed_, kTagBatch, epoch));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.index(i)]);
  }

  const std::size_t num_batches = n / per;
  std::vector<std::vector<std::size_t>> batches;
  batches.reserve(num_batches);
  std::vector<std::uint32_t> held;
  for (std::size_t b = 0; b < num_batches; ++b) {
    const std::size_t lo = b * per;
    const std::size_t hi = lo + per;
    held.clear();
    bool shared = false;
    for (std::size_t i = lo; i < hi && !shared; ++i) {
      const auto c = cell_of_[perm[i]];
      for (auto h : held) shared = shared || h == c;
      held.push_back(c);
    }
    if (!shared) {
      // held[0 .. per-2] are the cells kept when the last slot is replaced.
      held.pop_back();
      for (std::size_t j = hi; j < n; ++j) {
        const auto c = cell_of_[perm[j]];
        bool match = false;
        for (auto h : held) match = match || h == c;
        if (match) {
          std::swap(perm[hi - 1], perm[j]);
          break;
        }
      }
    }
    batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                         perm.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return batches;
}

std::vector<std::vector<std::size_t>> stratified_batches(
    const Dataset& dataset, std::size_t anchors_per_batch, std::uint64_t seed) {
  return StratifiedBatcher(dataset, anchors_per_batch, seed).epoch(0);
}

}  // namespace faircon
