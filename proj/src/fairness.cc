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

#include "faircon/fairness.h"

#include <cmath>

#include "faircon/common.h"

namespace faircon {

std::optional<double> RateCell::tpr() const {
  if (positives == 0) return std::nullopt;
  return static_cast<double>(true_pos) / static_cast<double>(positives);
}

std::optional<double> RateCell::fpr() const {
  if (negatives == 0) return std::nullopt;
  return static_cast<double>(false_pos) / static_cast<double>(negatives);
}

GroupRates group_confusion(const std::vector<PredictionRecord>& records,
                           std::uint32_t num_classes,
                           std::uint32_t num_groups) {
  if (records.empty()) throw ValidationError("no prediction records");
  if (num_classes < 2 || num_groups < 1) {
    throw ValidationError("need >= 2 classes and >= 1 group");
  }
  GroupRates r;
  r.num_classes = num_classes;
  r.num_groups = num_groups;
  r.cells.assign(static_cast<std::size_t>(num_classes) * num_groups, {});
  r.overall.assign(num_classes, {});
  for (const auto& rec : records) {
    if (rec.y_true >= num_classes || rec.y_pred >= num_classes ||
        rec.attr >= num_groups) {
      throw ValidationError("prediction record index out of range");
    }
    for (std::uint32_t c = 0; c < num_classes; ++c) {
      RateCell& g = r.cells[static_cast<std::size_t>(c) * num_groups + rec.attr];
      RateCell& o = r.overall[c];
      const bool predicted = rec.y_pred == c;
      if (rec.y_true == c) {
        ++g.positives;
        ++o.positives;
        g.true_pos += predicted;
        o.true_pos += predicted;
      } else {
        ++g.negatives;
        ++o.negatives;
        g.false_pos += predicted;
        o.false_pos += predicted;
      }
    }
  }
  return r;
}

EoGaps eo_gaps(const GroupRates& rates) {
  EoGaps out;
  const std::uint32_t first = rates.num_classes == 2 ? 1 : 0;
  std::size_t defined = 0;
  for (std::uint32_t c = first; c < rates.num_classes; ++c) {
    ClassGap gap;
    gap.cls = c;
    const auto overall_tpr = rates.overall[c].tpr();
    const auto overall_fpr = rates.overall[c].fpr();
    for (std::uint32_t a = 0; a < rates.num_groups; ++a) {
      const RateCell& cell = rates.cell(c, a);
      if (const auto t = cell.tpr(); t && overall_tpr) {
        gap.delta_tpr += std::abs(*t - *overall_tpr);
        ++defined;
      } else {
        out.warnings.push_back("TPR undefined for class " + std::to_string(c) +
                               ", group " + std::to_string(a));
      }
      if (const auto f = cell.fpr(); f && overall_fpr) {
        gap.delta_fpr += std::abs(*f - *overall_fpr);
        ++defined;
      } else {
        out.warnings.push_back("FPR undefined for class " + std::to_string(c) +
                               ", group " + std::to_string(a));
      }
    }
    out.delta_tpr += gap.delta_tpr;
    out.delta_fpr += gap.delta_fpr;
    out.per_class.push_back(gap);
  }
  if (defined == 0) {
    throw ValidationError("every group rate is undefined; no gap to report");
  }
  out.delta_eo = out.delta_tpr + out.delta_fpr;
  return out;
}

F1Result f1_scores(const std::vector<PredictionRecord>& records,
                   std::uint32_t num_classes) {
  if (records.empty()) throw ValidationError("no prediction records");
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0),
      fn(num_classes, 0);
  for (const auto& r : records) {
    if (r.y_true >= num_classes || r.y_pred >= num_classes) {
      throw ValidationError("prediction record class out of range");
    }
    if (r.y_true == r.y_pred) {
      ++tp[r.y_true];
    } else {
      ++fp[r.y_pred];
      ++fn[r.y_true];
    }
  }
  F1Result out;
  out.per_class.assign(num_classes, 0.0);
  for (std::uint32_t c = 0; c < num_classes; ++c) {
    if (tp[c] + fn[c] == 0) {
      out.warnings.push_back("class " + std::to_string(c) +
                             " has no true examples; F1 counted as 0");
      continue;
    }
    // 2PR / (P + R) == 2TP / (2TP + FP + FN)
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    out.per_class[c] = 2.0 * static_cast<double>(tp[c]) / denom;
  }
  if (num_classes == 2) {
    out.f1 = out.per_class[1];
  } else {
    double sum = 0.0;
    for (double v : out.per_class) sum += v;
    out.f1 = sum / static_cast<double>(num_classes);
  }
  return out;
}

MetricsRecord compute_metrics(const std::vector<PredictionRecord>& records,
                              std::uint32_t num_classes,
                              std::uint32_t num_groups) {
  const GroupRates rates = group_confusion(records, num_classes, num_groups);
  EoGaps gaps = eo_gaps(rates);
  F1Result f1 = f1_scores(records, num_classes);
  MetricsRecord m;
  m.f1 = f1.f1;
  m.delta_tpr = gaps.delta_tpr;
  m.delta_fpr = gaps.delta_fpr;
  m.delta_eo = gaps.delta_eo;
  m.per_class = std::move(gaps.per_class);
  m.warnings = std::move(gaps.warnings);
  m.warnings.insert(m.warnings.end(), f1.warnings.begin(), f1.warnings.end());
  m.support = records.size();
  return m;
}

nlohmann::ordered_json metrics_to_json(const MetricsRecord& m) {
  nlohmann::ordered_json j;
  j["f1"] = m.f1;
  j["delta_tpr"] = m.delta_tpr;
  j["delta_fpr"] = m.delta_fpr;
  j["delta_eo"] = m.delta_eo;
  j["support"] = m.support;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (const auto& g : m.per_class) {
    per.push_back({{"class", g.cls},
                   {"delta_tpr", g.delta_tpr},
                   {"delta_fpr", g.delta_fpr}});
  }
  j["per_class"] = per;
  j["warnings"] = m.warnings;
  return j;
}

std::string metrics_csv_header() {
  return "seed,split,lambda,gamma,tau,f1,delta_tpr,delta_fpr,delta_eo";
}

std::string metrics_csv_row(const EvalContext& ctx, const MetricsRecord& m) {
  return std::to_string(ctx.seed) + "," + ctx.split + "," +
         format_double(ctx.lambda) + "," + format_double(ctx.gamma) + "," +
         format_double(ctx.tau) + "," + format_double(m.f1) + "," +
         format_double(m.delta_tpr) + "," + format_double(m.delta_fpr) + "," +
         format_double(m.delta_eo);
}

}  // namespace faircon
