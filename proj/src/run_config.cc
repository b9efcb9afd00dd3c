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

#include "faircon/run_config.h"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>

namespace faircon {
namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError("section '" + section + "' must be an object");
  }
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) {
      throw ConfigError("unknown key '" + key + "' in " +
                        (section.empty() ? std::string("top level")
                                         : "section '" + section + "'"));
    }
  }
}

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

std::uint64_t as_unsigned(const json& v, const std::string& name,
                          std::uint64_t max = std::numeric_limits<std::uint64_t>::max()) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(name + " must be a non-negative integer");
  }
  const auto x = v.get<std::uint64_t>();
  if (x > max) throw ConfigError(name + " is out of range");
  return x;
}

double as_double(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError(name + " must be a string");
  return v.get<std::string>();
}

std::vector<double> as_doubles(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError(name + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_double(x, name + "[]"));
  return out;
}

AugmentStrategy parse_augment(const json& j, const std::string& section) {
  check_keys(j, section, {"kind", "rate"});
  AugmentStrategy a;
  if (j.contains("kind")) {
    a.kind = parse_augment_kind(as_string(j["kind"], where(section, "kind")));
  }
  if (j.contains("rate")) a.rate = as_double(j["rate"], where(section, "rate"));
  return a;
}

void parse_data(const json& j, RunConfigFile& rc) {
  check_keys(j, "data",
             {"vocab_size", "num_classes", "num_groups", "group_priors",
              "base_rates", "leakage", "class_signal", "doc_len", "n_train",
              "n_val", "n_test", "corpus_dir"});
  SynthConfig& d = rc.data;
  constexpr auto u32 = std::numeric_limits<std::uint32_t>::max();
  if (j.contains("vocab_size")) d.vocab_size = static_cast<std::uint32_t>(as_unsigned(j["vocab_size"], "data.vocab_size", u32));
  if (j.contains("num_classes")) d.num_classes = static_cast<std::uint32_t>(as_unsigned(j["num_classes"], "data.num_classes", u32));
  if (j.contains("num_groups")) d.num_groups = static_cast<std::uint32_t>(as_unsigned(j["num_groups"], "data.num_groups", u32));
  if (j.contains("group_priors")) d.group_priors = as_doubles(j["group_priors"], "data.group_priors");
  if (j.contains("base_rates")) {
    if (!j["base_rates"].is_array()) throw ConfigError("data.base_rates must be an array of arrays");
    d.base_rates.clear();
    for (const auto& row : j["base_rates"]) d.base_rates.push_back(as_doubles(row, "data.base_rates[]"));
  }
  if (j.contains("leakage")) d.leakage = as_double(j["leakage"], "data.leakage");
  if (j.contains("class_signal")) d.class_signal = as_double(j["class_signal"], "data.class_signal");
  if (j.contains("doc_len")) d.doc_len = static_cast<std::uint32_t>(as_unsigned(j["doc_len"], "data.doc_len", u32));
  if (j.contains("n_train")) d.n_train = as_unsigned(j["n_train"], "data.n_train");
  if (j.contains("n_val")) d.n_val = as_unsigned(j["n_val"], "data.n_val");
  if (j.contains("n_test")) d.n_test = as_unsigned(j["n_test"], "data.n_test");
  if (j.contains("corpus_dir")) rc.corpus_dir = as_string(j["corpus_dir"], "data.corpus_dir");
}

void parse_train(const json& j, TrainConfig& t) {
  check_keys(j, "train",
             {"mode", "pretrain_epochs", "finetune_epochs", "optimizer",
              "learning_rate", "beta1", "beta2", "epsilon", "anchors_per_batch",
              "finetune_batch", "tau", "lambda", "gamma", "early_stop_patience",
              "embed_dim", "hidden_dim", "output_dim"});
  constexpr auto u32 = std::numeric_limits<std::uint32_t>::max();
  auto u = [&](const char* k) { return as_unsigned(j[k], std::string("train.") + k, u32); };
  auto d = [&](const char* k) { return as_double(j[k], std::string("train.") + k); };
  if (j.contains("mode")) t.mode = parse_train_mode(as_string(j["mode"], "train.mode"));
  if (j.contains("pretrain_epochs")) t.pretrain_epochs = static_cast<std::uint32_t>(u("pretrain_epochs"));
  if (j.contains("finetune_epochs")) t.finetune_epochs = static_cast<std::uint32_t>(u("finetune_epochs"));
  if (j.contains("optimizer")) t.optimizer.kind = parse_optimizer(as_string(j["optimizer"], "train.optimizer"));
  if (j.contains("learning_rate")) t.optimizer.learning_rate = d("learning_rate");
  if (j.contains("beta1")) t.optimizer.beta1 = d("beta1");
  if (j.contains("beta2")) t.optimizer.beta2 = d("beta2");
  if (j.contains("epsilon")) t.optimizer.epsilon = d("epsilon");
  if (j.contains("anchors_per_batch")) t.anchors_per_batch = u("anchors_per_batch");
  if (j.contains("finetune_batch")) t.finetune_batch = u("finetune_batch");
  if (j.contains("tau")) t.loss.tau = d("tau");
  if (j.contains("lambda")) t.loss.lambda = d("lambda");
  if (j.contains("gamma")) t.loss.gamma = d("gamma");
  if (j.contains("early_stop_patience")) t.early_stop_patience = static_cast<std::uint32_t>(u("early_stop_patience"));
  if (j.contains("embed_dim")) t.encoder.embed_dim = static_cast<std::uint32_t>(u("embed_dim"));
  if (j.contains("hidden_dim")) t.encoder.hidden_dim = static_cast<std::uint32_t>(u("hidden_dim"));
  if (j.contains("output_dim")) t.encoder.output_dim = static_cast<std::uint32_t>(u("output_dim"));
}

void parse_sweep(const json& j, SweepGrid& g) {
  check_keys(j, "sweep", {"lambdas", "seeds", "taus", "anchors", "augments"});
  if (j.contains("lambdas")) g.lambdas = as_doubles(j["lambdas"], "sweep.lambdas");
  if (j.contains("taus")) g.taus = as_doubles(j["taus"], "sweep.taus");
  auto unsigned_list = [&](const char* k) {
    if (!j[k].is_array()) throw ConfigError(std::string("sweep.") + k + " must be an array");
    std::vector<std::uint64_t> out;
    for (const auto& x : j[k]) out.push_back(as_unsigned(x, std::string("sweep.") + k + "[]"));
    return out;
  };
  if (j.contains("seeds")) g.seeds = unsigned_list("seeds");
  if (j.contains("anchors")) {
    g.anchors.clear();
    for (auto v : unsigned_list("anchors")) g.anchors.push_back(v);
  }
  if (j.contains("augments")) {
    if (!j["augments"].is_array()) throw ConfigError("sweep.augments must be an array");
    g.augments.clear();
    for (const auto& a : j["augments"]) g.augments.push_back(parse_augment(a, "sweep.augments[]"));
  }
}

}  // namespace

void RunConfigFile::set_seed(std::uint64_t s) {
  seed = s;
  data.seed = s;
  train.seed = s;
}

void RunConfigFile::validate() const {
  try {
    data.validate();
    train.validate();
    for (double t : sweep.taus) {
      LossConfig l = train.loss;
      l.tau = t;
      l.validate();
    }
    for (double lam : sweep.lambdas) {
      LossConfig l = train.loss;
      l.lambda = lam;
      l.validate();
    }
    for (auto n : sweep.anchors) {
      if (n < 2) throw ConfigError("sweep.anchors entries must be >= 2");
    }
    for (const auto& a : sweep.augments) a.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (out_dir.empty()) throw ConfigError("out must be a non-empty path");
}

RunConfigFile parse_run_config(const json& j) {
  RunConfigFile rc;
  try {
    check_keys(j, "", {"seed", "out", "data", "train", "augment", "sweep"});
    if (j.contains("data")) parse_data(j["data"], rc);
    if (j.contains("train")) parse_train(j["train"], rc.train);
    if (j.contains("augment")) rc.train.augment = parse_augment(j["augment"], "augment");
    if (j.contains("sweep")) parse_sweep(j["sweep"], rc.sweep);
    if (j.contains("out")) rc.out_dir = as_string(j["out"], "out");
    rc.set_seed(j.contains("seed") ? as_unsigned(j["seed"], "seed") : rc.seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    // Unknown enum names and similar surface as config errors.
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  rc.validate();
  return rc;
}

RunConfigFile load_run_config(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file not found: " + path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::ordered_json run_config_to_json(const RunConfigFile& rc) {
  nlohmann::ordered_json j;
  j["seed"] = rc.seed;
  j["out"] = rc.out_dir;
  const SynthConfig& d = rc.data;
  j["data"] = {{"vocab_size", d.vocab_size},   {"num_classes", d.num_classes},
               {"num_groups", d.num_groups},   {"group_priors", d.group_priors},
               {"base_rates", d.base_rates},   {"leakage", d.leakage},
               {"class_signal", d.class_signal}, {"doc_len", d.doc_len},
               {"n_train", d.n_train},         {"n_val", d.n_val},
               {"n_test", d.n_test},           {"corpus_dir", rc.corpus_dir}};
  nlohmann::ordered_json t = train_config_to_json(rc.train);
  t.erase("seed");
  t.erase("augment");
  t.erase("augment_rate");
  j["train"] = t;
  j["augment"] = {{"kind", augment_kind_name(rc.train.augment.kind)},
                  {"rate", rc.train.augment.rate}};
  nlohmann::ordered_json augs = nlohmann::ordered_json::array();
  for (const auto& a : rc.sweep.augments) {
    augs.push_back({{"kind", augment_kind_name(a.kind)}, {"rate", a.rate}});
  }
  j["sweep"] = {{"lambdas", rc.sweep.lambdas}, {"seeds", rc.sweep.seeds},
                {"taus", rc.sweep.taus},       {"anchors", rc.sweep.anchors},
                {"augments", augs}};
  return j;
}

}  // namespace faircon
