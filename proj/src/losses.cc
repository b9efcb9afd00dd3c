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

#include "faircon/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "faircon/common.h"
#include "faircon/encoder.h"

namespace faircon {
namespace {

// dL/dz from dL/dS where S = Z Z^T / tau.
Eigen::MatrixXd similarity_backward(const Eigen::MatrixXd& g,
                                    const Eigen::MatrixXd& z, double tau) {
  return (g + g.transpose()) * z / tau;
}

// log sum_{k in members} exp(row(k)) and the softmax weights over members.
double masked_logsumexp(const Eigen::RowVectorXd& row,
                        const std::vector<Eigen::Index>& members,
                        std::vector<double>& weights) {
  double mx = -std::numeric_limits<double>::infinity();
  for (auto k : members) mx = std::max(mx, row(k));
  double sum = 0.0;
  weights.resize(members.size());
  for (std::size_t t = 0; t < members.size(); ++t) {
    weights[t] = std::exp(row(members[t]) - mx);
    sum += weights[t];
  }
  for (auto& w : weights) w /= sum;
  return mx + std::log(sum);
}

}  // namespace

void PairedBatch::validate() const {
  const std::size_t n2 = labels.size();
  if (n2 < 2 || n2 % 2 != 0) {
    throw ValidationError("paired batch needs an even size >= 2, got " +
                          std::to_string(n2));
  }
  if (attrs.size() != n2 || static_cast<std::size_t>(z.rows()) != n2) {
    throw ValidationError("paired batch: z/labels/attrs row counts differ");
  }
  const std::size_t n = n2 / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != labels[i + n] || attrs[i] != attrs[i + n]) {
      throw ValidationError("paired batch: view " + std::to_string(i + n) +
                            " does not match anchor " + std::to_string(i));
    }
  }
  if (!z.allFinite()) throw NumericError("paired batch has a non-finite embedding");
}

void LossConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be >= 0");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in [0, 1]");
  }
}

LossResult sup_con_loss(const PairedBatch& batch, double tau) {
  batch.validate();
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  const Eigen::Index n2 = batch.z.rows();
  const Eigen::MatrixXd s = batch.z * batch.z.transpose() / tau;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n2, n2);

  double total = 0.0;
  std::vector<Eigen::Index> others;
  std::vector<double> w;
  for (Eigen::Index i = 0; i < n2; ++i) {
    others.clear();
    std::size_t positives = 0;
    double pos_sum = 0.0;
    for (Eigen::Index k = 0; k < n2; ++k) {
      if (k == i) continue;
      others.push_back(k);
      if (batch.labels[k] == batch.labels[i]) {
        ++positives;
        pos_sum += s(i, k);
      }
    }
    if (positives == 0) {
      throw NumericError("anchor " + std::to_string(i) +
                         " has no same-label partner");
    }
    const double inv = 1.0 / static_cast<double>(positives);
    const double lse = masked_logsumexp(s.row(i), others, w);
    total += lse - inv * pos_sum;
    for (std::size_t t = 0; t < others.size(); ++t) {
      const Eigen::Index k = others[t];
      g(i, k) = w[t] - (batch.labels[k] == batch.labels[i] ? inv : 0.0);
    }
  }
  return {total, similarity_backward(g, batch.z, tau)};
}

LossResult cs_infonce_loss(const PairedBatch& batch, double tau) {
  batch.validate();
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  const Eigen::Index n2 = batch.z.rows();
  const Eigen::Index n = n2 / 2;
  const Eigen::MatrixXd s = batch.z * batch.z.transpose() / tau;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n2, n2);

  double total = 0.0;
  std::vector<Eigen::Index> cell;
  std::vector<double> w;
  for (Eigen::Index i = 0; i < n2; ++i) {
    const Eigen::Index pos = i < n ? i + n : i - n;
    cell.clear();
    for (Eigen::Index k = 0; k < n2; ++k) {
      if (k != i && batch.labels[k] == batch.labels[i] &&
          batch.attrs[k] == batch.attrs[i]) {
        cell.push_back(k);
      }
    }
    // cell holds N_{a_i,y_i} - 1 members and always contains the positive.
    const double coef = 1.0 / static_cast<double>(cell.size());
    const double lse = masked_logsumexp(s.row(i), cell, w);
    total += coef * (lse - s(i, pos));
    for (std::size_t t = 0; t < cell.size(); ++t) {
      const Eigen::Index k = cell[t];
      g(i, k) = coef * (w[t] - (k == pos ? 1.0 : 0.0));
    }
  }
  return {total, similarity_backward(g, batch.z, tau)};
}

LossResult two_stage_pretrain_loss(const PairedBatch& batch,
                                   const LossConfig& cfg) {
  cfg.validate();
  LossResult sup = sup_con_loss(batch, cfg.tau);
  if (cfg.lambda == 0.0) return sup;
  const LossResult cs = cs_infonce_loss(batch, cfg.tau);
  sup.value += cfg.lambda * cs.value;
  sup.dz += cfg.lambda * cs.dz;
  return sup;
}

LossResult mean_cross_entropy(const Eigen::MatrixXd& logits,
                              const std::vector<std::uint32_t>& labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size() ||
      labels.empty()) {
    throw ValidationError("logits rows must match labels");
  }
  if (!logits.allFinite()) throw NumericError("non-finite logits");
  const double inv = 1.0 / static_cast<double>(labels.size());
  LossResult r{0.0, Eigen::MatrixXd::Zero(logits.rows(), logits.cols())};
  Eigen::VectorXd row_grad;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    if (labels[i] >= logits.cols()) {
      throw ValidationError("label outside logit width");
    }
    r.value += softmax_cross_entropy(logits.row(i).transpose(), labels[i],
                                     &row_grad);
    r.dz.row(i) = row_grad.transpose() * inv;
  }
  r.value *= inv;
  return r;
}

OneStageResult one_stage_loss(const PairedBatch& batch,
                              const Eigen::MatrixXd& logits,
                              const LossConfig& cfg) {
  cfg.validate();
  if (logits.rows() != batch.z.rows()) {
    throw ValidationError("one-stage loss needs one logit row per embedding");
  }
  const LossResult ce = mean_cross_entropy(logits, batch.labels);
  const LossResult sup = sup_con_loss(batch, cfg.tau);
  OneStageResult r;
  r.ce = ce.value;
  r.sup = sup.value;
  r.value = (1.0 - cfg.gamma) * ce.value + cfg.gamma * sup.value;
  r.dz = cfg.gamma * sup.dz;
  r.dlogits = (1.0 - cfg.gamma) * ce.dz;
  if (cfg.lambda != 0.0) {
    const LossResult cs = cs_infonce_loss(batch, cfg.tau);
    r.cs = cs.value;
    r.value += cfg.lambda * cs.value;
    r.dz += cfg.lambda * cs.dz;
  }
  return r;
}

double relative_error(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport grad_check_matrix(
    const std::function<double(const Eigen::MatrixXd&)>& f,
    const Eigen::MatrixXd& at, const Eigen::MatrixXd& analytic, double h) {
  GradCheckReport rep;
  Eigen::MatrixXd x = at;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double orig = x(r, c);
      x(r, c) = orig + h;
      const double fp = f(x);
      x(r, c) = orig - h;
      const double fm = f(x);
      x(r, c) = orig;
      const double numeric = (fp - fm) / (2.0 * h);
      rep.max_rel_error =
          std::max(rep.max_rel_error, relative_error(analytic(r, c), numeric));
      rep.max_abs_error =
          std::max(rep.max_abs_error, std::abs(analytic(r, c) - numeric));
      ++rep.coordinates;
    }
  }
  return rep;
}

GradCheckReport grad_check(
    const std::function<LossResult(const PairedBatch&)>& loss_fn,
    const PairedBatch& batch, double h) {
  const LossResult base = loss_fn(batch);
  PairedBatch probe = batch;
  return grad_check_matrix(
      [&](const Eigen::MatrixXd& z) {
        probe.z = z;
        return loss_fn(probe).value;
      },
      batch.z, base.dz, h);
}

}  // namespace faircon
