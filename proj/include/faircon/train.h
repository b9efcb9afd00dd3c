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

// Training loops.
//
// Two-stage: the encoder is pretrained on paired batches with the supervised
// plus conditional contrastive objective, then frozen while a linear-softmax
// classifier is fit with cross-entropy on un-augmented embeddings.
// One-stage: encoder and classifier are trained jointly on
// (1 - gamma) CE + gamma L_sup + lambda L_cs.
//
// Every random choice is derived from TrainConfig::seed and the epoch/batch
// index, so a run is bit-reproducible.

#ifndef FAIRCON_TRAIN_H_
#define FAIRCON_TRAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "faircon/augment.h"
#include "faircon/data.h"
#include "faircon/encoder.h"
#include "faircon/fairness.h"
#include "faircon/losses.h"
#include "json.hpp"

namespace faircon {

enum class TrainMode { kOneStage, kTwoStage };

// "one_stage" / "two_stage". Parsing also accepts the hyphenated forms.
std::string train_mode_name(TrainMode mode);
TrainMode parse_train_mode(const std::string& name);

struct TrainConfig {
  TrainMode mode = TrainMode::kTwoStage;
  std::uint32_t pretrain_epochs = 15;  // stage 1, or the one-stage epoch budget
  std::uint32_t finetune_epochs = 10;  // stage 2 only
  OptimizerConfig optimizer{OptimizerKind::kAdam, 0.003};
  std::size_t anchors_per_batch = 32;  // N; a paired batch holds 2N
  std::size_t finetune_batch = 32;
  LossConfig loss;
  AugmentStrategy augment;
  std::uint32_t early_stop_patience = 3;
  std::uint64_t seed = 1;
  // vocab_size is taken from the training data.
  EncoderConfig encoder;

  // Throws ConfigError.
  void validate() const;
};

nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg);

struct EpochLog {
  std::string stage;  // "pretrain", "finetune" or "joint"
  std::uint32_t epoch = 0;
  double train_loss = 0.0;
  // Validation loss for "pretrain", validation F1 otherwise.
  double val_metric = 0.0;
};

struct TrainedModel {
  EncoderParams encoder;
  ClassifierParams classifier;
  std::vector<EpochLog> log;
  std::uint32_t epochs_ran = 0;
  std::uint64_t encoder_checksum = 0;
};

// Raised when a loss or parameter turns non-finite. The message names the
// epoch, batch and loss components.
class TrainingDivergedError : public NumericError {
 public:
  TrainingDivergedError(const std::string& what, std::uint32_t epoch,
                        std::size_t batch)
      : NumericError(what), epoch_(epoch), batch_(batch) {}
  std::uint32_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::uint32_t epoch_;
  std::size_t batch_;
};

TrainedModel run_two_stage(const Dataset& train, const Dataset& val,
                           const TrainConfig& cfg,
                           const SynonymLexicon& lexicon);

TrainedModel run_one_stage(const Dataset& train, const Dataset& val,
                           const TrainConfig& cfg,
                           const SynonymLexicon& lexicon);

// Dispatches on cfg.mode.
TrainedModel train_model(const Dataset& train, const Dataset& val,
                         const TrainConfig& cfg, const SynonymLexicon& lexicon);

// Fresh encoder and classifier exactly as the trainers initialize them.
TrainedModel initial_model(const TrainConfig& cfg, std::uint32_t vocab_size,
                           std::uint32_t num_classes);

// Argmax predictions on un-augmented inputs.
std::vector<PredictionRecord> predict(const TrainedModel& model,
                                      const Dataset& data);
MetricsRecord evaluate(const TrainedModel& model, const Dataset& data);

// Mean of the pretraining objective over fixed augmented batches of `data`.
double pretrain_validation_loss(const EncoderParams& encoder,
                                const Dataset& data, const TrainConfig& cfg,
                                const SynonymLexicon& lexicon);

// Checkpoint I/O. The file records the training config and root seed.
void save_model(const TrainedModel& model, const TrainConfig& cfg,
                const std::string& path);
TrainedModel load_model(const std::string& path);

// Finite-difference audit of every analytic gradient in the library.
struct GradAuditEntry {
  std::string name;
  GradCheckReport report;
};

struct GradAuditReport {
  std::vector<GradAuditEntry> entries;  // one per (gradient, seed)
  double max_rel_error = 0.0;
  double tolerance = 1e-4;
  bool pass() const { return max_rel_error < tolerance; }
};

GradAuditReport grad_audit(std::size_t seeds, std::uint64_t root_seed,
                           double h = 1e-5);
nlohmann::ordered_json grad_audit_to_json(const GradAuditReport& report);

}  // namespace faircon

#endif  // FAIRCON_TRAIN_H_
