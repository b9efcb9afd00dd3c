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

// Text encoder f and linear-softmax classifier g with hand-written backward
// passes.
//
//   pooled = mean_t E[token_t]                      (d_e)
//   hidden = tanh(W1^T pooled + b1)                 (d_h)
//   u      = W2^T hidden + b2                       (d)
//   z      = u / |u|
//
// A zero pre-normalization output has no direction. In that case z is the
// first basis vector, the cache is flagged degenerate and backward returns
// zero gradients.

#ifndef FAIRCON_ENCODER_H_
#define FAIRCON_ENCODER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faircon/common.h"
#include "json.hpp"

namespace faircon {

struct EncoderConfig {
  std::uint32_t vocab_size = 0;
  std::uint32_t embed_dim = 32;
  std::uint32_t hidden_dim = 64;
  std::uint32_t output_dim = 32;

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

// Also used as the gradient container (same shapes).
struct EncoderParams {
  EncoderConfig config;
  Eigen::MatrixXd embedding;  // V x d_e
  Eigen::MatrixXd w1;         // d_e x d_h
  Eigen::VectorXd b1;         // d_h
  Eigen::MatrixXd w2;         // d_h x d
  Eigen::VectorXd b2;         // d

  static EncoderParams zeros(const EncoderConfig& config);
  // Weights uniform(-0.08, 0.08), biases zero.
  static EncoderParams init(const EncoderConfig& config, std::uint64_t seed);

  void set_zero();
  bool all_finite() const;

  // Visits every tensor as a flat contiguous array, in a fixed order.
  void for_each_tensor(
      const std::function<void(const char*, double*, std::size_t)>& f);
  void for_each_tensor(
      const std::function<void(const char*, const double*, std::size_t)>& f)
      const;
};

struct ClassifierParams {
  Eigen::MatrixXd w;  // d x C
  Eigen::VectorXd b;  // C

  static ClassifierParams zeros(std::uint32_t dim, std::uint32_t num_classes);
  static ClassifierParams init(std::uint32_t dim, std::uint32_t num_classes,
                               std::uint64_t seed);

  std::uint32_t num_classes() const { return static_cast<std::uint32_t>(b.size()); }
  void set_zero();
  bool all_finite() const;
  void for_each_tensor(
      const std::function<void(const char*, double*, std::size_t)>& f);
  void for_each_tensor(
      const std::function<void(const char*, const double*, std::size_t)>& f)
      const;
};

struct ForwardCache {
  std::vector<std::uint32_t> tokens;
  Eigen::VectorXd pooled;
  Eigen::VectorXd hidden;
  Eigen::VectorXd u;
  double norm = 0.0;
  Eigen::VectorXd z;  // unit-norm representation
  bool degenerate = false;
};

// Throws ValidationError for empty input or a token id >= V.
ForwardCache encode_forward(const EncoderParams& params,
                            const std::vector<std::uint32_t>& tokens);

// Adds dL/dparams for one forward call into `grads`. Returns false (and adds
// nothing) for a degenerate cache.
bool accumulate_encoder_grad(const EncoderParams& params,
                             const ForwardCache& cache,
                             const Eigen::VectorXd& dl_dz,
                             EncoderParams& grads);

struct EncoderGrad {
  EncoderParams grads;
  bool degenerate = false;
};

EncoderGrad encode_backward(const EncoderParams& params,
                            const ForwardCache& cache,
                            const Eigen::VectorXd& dl_dz);

Eigen::VectorXd classifier_logits(const ClassifierParams& clf,
                                  const Eigen::VectorXd& z);

struct ClassifyResult {
  Eigen::VectorXd logits;
  double loss = 0.0;  // -log softmax(logits)[y]
  Eigen::MatrixXd dw;
  Eigen::VectorXd db;
  Eigen::VectorXd dz;
};

// Throws ValidationError if y_true >= C.
ClassifyResult classify_forward_backward(const ClassifierParams& clf,
                                         const Eigen::VectorXd& z,
                                         std::uint32_t y_true);

// Cross-entropy of one logit row and its gradient, stabilized by
// max-subtraction.
double softmax_cross_entropy(const Eigen::VectorXd& logits, std::uint32_t y,
                             Eigen::VectorXd* dlogits);

std::uint32_t argmax(const Eigen::VectorXd& v);

enum class OptimizerKind { kSgd, kAdam };

std::string optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First-order update over the flat tensors of one parameter set. Adam keeps
// per-tensor moment buffers sized on the first step.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  template <typename Params>
  void step(Params& params, const Params& grads) {
    std::vector<const double*> g;
    grads.for_each_tensor(
        [&](const char*, const double* d, std::size_t) { g.push_back(d); });
    std::size_t k = 0;
    ++steps_;
    params.for_each_tensor([&](const char*, double* p, std::size_t n) {
      update(k, p, g[k], n);
      ++k;
    });
  }

 private:
  void update(std::size_t slot, double* param, const double* grad,
              std::size_t n);

  OptimizerConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t steps_ = 0;
};

// FNV-1a over the bytes of every tensor; used to check the frozen encoder.
std::uint64_t checksum(const EncoderParams& params);

nlohmann::ordered_json encoder_to_json(const EncoderParams& params);
EncoderParams encoder_from_json(const nlohmann::json& j);
nlohmann::ordered_json classifier_to_json(const ClassifierParams& clf);
ClassifierParams classifier_from_json(const nlohmann::json& j);

}  // namespace faircon

#endif  // FAIRCON_ENCODER_H_
