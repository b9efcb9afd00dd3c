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

// Classification quality and equalized-odds gaps.
//
// For class c (one-vs-rest) and group a:
//   TPR_a^c = P(pred = c | true = c, attr = a)
//   FPR_a^c = P(pred = c | true != c, attr = a)
//   dTPR^c  = sum_a |TPR_a^c - TPR^c|, dFPR^c likewise, with TPR^c / FPR^c
//             pooled over all groups.
// Binary tasks report class 1 only; multi-class gaps are summed over classes.
// A rate with zero support is undefined: it is skipped in the sums and a
// warning is attached to the result.

#ifndef FAIRCON_FAIRNESS_H_
#define FAIRCON_FAIRNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace faircon {

struct PredictionRecord {
  std::uint32_t y_true = 0;
  std::uint32_t y_pred = 0;
  std::uint32_t attr = 0;
};

struct RateCell {
  std::size_t true_pos = 0;   // pred = c among true = c
  std::size_t positives = 0;  // true = c
  std::size_t false_pos = 0;  // pred = c among true != c
  std::size_t negatives = 0;  // true != c

  std::optional<double> tpr() const;
  std::optional<double> fpr() const;
};

struct GroupRates {
  std::uint32_t num_classes = 0;
  std::uint32_t num_groups = 0;
  std::vector<RateCell> cells;    // [c * G + a]
  std::vector<RateCell> overall;  // [c]

  const RateCell& cell(std::uint32_t c, std::uint32_t a) const {
    return cells[static_cast<std::size_t>(c) * num_groups + a];
  }
};

struct ClassGap {
  std::uint32_t cls = 0;
  double delta_tpr = 0.0;
  double delta_fpr = 0.0;
};

struct EoGaps {
  double delta_tpr = 0.0;
  double delta_fpr = 0.0;
  double delta_eo = 0.0;
  std::vector<ClassGap> per_class;
  std::vector<std::string> warnings;
};

struct F1Result {
  double f1 = 0.0;
  std::vector<double> per_class;
  std::vector<std::string> warnings;
};

struct MetricsRecord {
  double f1 = 0.0;
  double delta_tpr = 0.0;
  double delta_fpr = 0.0;
  double delta_eo = 0.0;
  std::vector<ClassGap> per_class;
  std::vector<std::string> warnings;
  std::size_t support = 0;
};

// Throws ValidationError on empty input or out-of-range indices.
GroupRates group_confusion(const std::vector<PredictionRecord>& records,
                           std::uint32_t num_classes, std::uint32_t num_groups);

// Throws ValidationError when no considered rate cell is defined.
EoGaps eo_gaps(const GroupRates& rates);

// Binary: F1 of class 1. Multi-class: macro average of one-vs-rest F1; a
// class with no true examples contributes 0 and a warning.
F1Result f1_scores(const std::vector<PredictionRecord>& records,
                   std::uint32_t num_classes);

MetricsRecord compute_metrics(const std::vector<PredictionRecord>& records,
                              std::uint32_t num_classes,
                              std::uint32_t num_groups);

nlohmann::ordered_json metrics_to_json(const MetricsRecord& m);

// Identifies one evaluation in the flat CSV export.
struct EvalContext {
  std::uint64_t seed = 0;
  std::string split = "test";
  double lambda = 0.0;
  double gamma = 0.0;
  double tau = 0.0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const EvalContext& ctx, const MetricsRecord& m);

}  // namespace faircon

#endif  // FAIRCON_FAIRNESS_H_
