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

// Contrastive objectives over a paired batch of 2N embeddings, where row
// i + N is the augmented view of row i.
//
// With s_ik = z_i . z_k / tau:
//
//   supervised contrastive
//     L_sup = - sum_i 1/(N_{y_i} - 1) sum_{j != i, y_j = y_i} log l_ij
//     l_ij  = exp(s_ij) / sum_{k != i} exp(s_ik)
//
//   conditional supervised InfoNCE
//     L_cs  = - sum_i 1/(N_{a_i,y_i} - 1) log l_i
//     l_i   = exp(s_{i,p(i)}) / sum_{k != i, a_k = a_i, y_k = y_i} exp(s_ik)
//     p(i)  = i + N for the first half, i - N for the second
//
// N_y and N_{a,y} count batch members (the anchor included) in the label /
// (attribute, label) cell. Both are sums over the batch, not means. Every
// log-denominator goes through max-subtracted log-sum-exp.

#ifndef FAIRCON_LOSSES_H_
#define FAIRCON_LOSSES_H_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace faircon {

struct PairedBatch {
  Eigen::MatrixXd z;  // 2N x d, one embedding per row
  std::vector<std::uint32_t> labels;
  std::vector<std::uint32_t> attrs;

  std::size_t anchors() const { return labels.size() / 2; }
  std::size_t size() const { return labels.size(); }
  // Shapes, pairing of labels/attributes and finiteness. Throws.
  void validate() const;
};

struct LossConfig {
  double tau = 0.5;
  double lambda = 0.0;
  double gamma = 0.5;

  void validate() const;  // throws ConfigError
};

struct LossResult {
  double value = 0.0;
  Eigen::MatrixXd dz;  // 2N x d
};

struct OneStageResult {
  double value = 0.0;
  double ce = 0.0;
  double sup = 0.0;
  double cs = 0.0;
  Eigen::MatrixXd dz;       // 2N x d
  Eigen::MatrixXd dlogits;  // 2N x C
};

LossResult sup_con_loss(const PairedBatch& batch, double tau);
LossResult cs_infonce_loss(const PairedBatch& batch, double tau);

// L_sup + lambda * L_cs. gamma is ignored.
LossResult two_stage_pretrain_loss(const PairedBatch& batch,
                                   const LossConfig& cfg);

// (1 - gamma) * L_ce + gamma * L_sup + lambda * L_cs, where L_ce is the mean
// cross-entropy of the 2N logit rows.
OneStageResult one_stage_loss(const PairedBatch& batch,
                              const Eigen::MatrixXd& logits,
                              const LossConfig& cfg);

// Mean cross-entropy of the logit rows against `labels`; `dz` of the result
// holds dL/dlogits.
LossResult mean_cross_entropy(const Eigen::MatrixXd& logits,
                              const std::vector<std::uint32_t>& labels);

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t coordinates = 0;
};

// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps coordinates
// whose true derivative is ~0 from reporting rounding noise as large
// relative error.
inline constexpr double kGradCheckFloor = 1e-6;
double relative_error(double analytic, double numeric);

// Central differences of a scalar function of a matrix against an analytic
// gradient of the same shape.
GradCheckReport grad_check_matrix(
    const std::function<double(const Eigen::MatrixXd&)>& f,
    const Eigen::MatrixXd& at, const Eigen::MatrixXd& analytic,
    double h = 1e-5);

// Perturbs every embedding coordinate of `batch`.
GradCheckReport grad_check(
    const std::function<LossResult(const PairedBatch&)>& loss_fn,
    const PairedBatch& batch, double h = 1e-5);

}  // namespace faircon

#endif  // FAIRCON_LOSSES_H_
