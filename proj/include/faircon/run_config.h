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

// Run configuration document (JSON). Layout:
//
//   {
//     "seed": 1,
//     "out": "out",
//     "data":    { "vocab_size": 240, ..., "corpus_dir": "" },
//     "train":   { "mode": "two_stage", "pretrain_epochs": 15, ... },
//     "augment": { "kind": "synonym_replace", "rate": 0.1 },
//     "sweep":   { "lambdas": [0, 5], "seeds": [1, 2], "taus": [],
//                  "anchors": [], "augments": [] }
//   }
//
// Every section and key is optional; unknown keys are rejected. The root
// seed drives data generation and training.

#ifndef FAIRCON_RUN_CONFIG_H_
#define FAIRCON_RUN_CONFIG_H_

#include <cstdint>
#include <string>

#include "faircon/data.h"
#include "faircon/sweep.h"
#include "faircon/train.h"
#include "json.hpp"

namespace faircon {

struct RunConfigFile {
  std::uint64_t seed = 1;
  SynthConfig data;
  // Load the corpus from here instead of generating it in memory.
  std::string corpus_dir;
  TrainConfig train;
  SweepGrid sweep;
  std::string out_dir = "out";

  // Propagates the root seed into the data and training configs.
  void set_seed(std::uint64_t s);
  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError on unknown keys, wrong types or out-of-range values.
RunConfigFile parse_run_config(const nlohmann::json& j);
// Missing or unparsable files are ConfigErrors.
RunConfigFile load_run_config(const std::string& path);
nlohmann::ordered_json run_config_to_json(const RunConfigFile& cfg);

}  // namespace faircon

#endif  // FAIRCON_RUN_CONFIG_H_
