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

// Grid sweeps over lambda, seed, temperature, batch size and augmentation.
// Cells run independently (optionally in parallel); a failing cell becomes a
// flagged row and the sweep continues.

#ifndef FAIRCON_SWEEP_H_
#define FAIRCON_SWEEP_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "faircon/augment.h"
#include "faircon/data.h"
#include "faircon/fairness.h"
#include "faircon/train.h"

namespace faircon {

// Empty axes fall back to the base config's value.
struct SweepGrid {
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
  std::vector<double> taus;
  std::vector<std::size_t> anchors;
  std::vector<AugmentStrategy> augments;
};

struct SweepCell {
  std::size_t index = 0;
  TrainConfig config;
};

// Cells ordered by tau, anchors, augment, lambda, then seed (innermost).
std::vector<SweepCell> expand_grid(const TrainConfig& base, const SweepGrid& grid);

struct SweepRow {
  TrainMode mode = TrainMode::kTwoStage;
  double lambda = 0.0;
  double gamma = 0.0;
  double tau = 0.0;
  std::size_t batch = 0;  // 2N
  std::string augment;    // "<kind>:<rate>"
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsRecord metrics;  // test split; meaningful only when ok
  std::uint32_t epochs_ran = 0;
  std::optional<double> wall_seconds;
};

struct SweepAggregate {
  TrainMode mode = TrainMode::kTwoStage;
  double lambda = 0.0;
  double gamma = 0.0;
  double tau = 0.0;
  std::size_t batch = 0;
  std::string augment;
  std::size_t runs = 0;    // successful rows
  std::size_t failed = 0;
  double f1_mean = 0.0;
  double f1_std = 0.0;  // sample standard deviation, 0 for a single run
  double delta_eo_mean = 0.0;
  double delta_eo_std = 0.0;
};

struct SweepOptions {
  std::size_t threads = 1;
  // Timing makes rows machine-dependent, so it is off by default.
  bool record_time = false;
  // Invoked before training each cell; an exception fails that cell.
  std::function<void(const SweepCell&)> cell_hook;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
  std::size_t failed() const;
};

SweepResult run_sweep(const Dataset& train, const Dataset& val,
                      const Dataset& test, const TrainConfig& base,
                      const SweepGrid& grid, const SynonymLexicon& lexicon,
                      const SweepOptions& options = {});

// Groups rows by everything except the seed, in first-seen order.
std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows);

std::string sweep_rows_header();
std::string sweep_row_csv(const SweepRow& row);
std::string sweep_aggregate_header();
std::string sweep_aggregate_csv(const SweepAggregate& agg);

void write_sweep_csvs(const SweepResult& result, const std::string& rows_path,
                      const std::string& aggregate_path);

}  // namespace faircon

#endif  // FAIRCON_SWEEP_H_
