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

#include "faircon/encoder.h"

#include <cmath>
#include <cstring>
#include <limits>

namespace faircon {
namespace {

constexpr double kInitScale = 0.08;

void fill_uniform(Eigen::MatrixXd& m, Rng& rng) {
  // Row-major draw order so the stream does not depend on Eigen storage.
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rng.uniform(-kInitScale, kInitScale);
    }
  }
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json j;
  j["shape"] = {m.rows(), m.cols()};
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = data;
  return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                                 Eigen::Index cols, const char* name) {
  const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
  if (shape.size() != 2 || shape[0] != rows || shape[1] != cols) {
    throw ParseError(std::string("checkpoint tensor '") + name +
                         "' has the wrong shape",
                     0);
  }
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ParseError(std::string("checkpoint tensor '") + name +
                         "' has the wrong element count",
                     0);
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  }
  return m;
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size == 0) throw ConfigError("encoder vocab_size must be > 0");
  if (embed_dim == 0 || hidden_dim == 0 || output_dim == 0) {
    throw ConfigError("encoder dimensions must be > 0");
  }
}

EncoderParams EncoderParams::zeros(const EncoderConfig& config) {
  config.validate();
  EncoderParams p;
  p.config = config;
  p.embedding = Eigen::MatrixXd::Zero(config.vocab_size, config.embed_dim);
  p.w1 = Eigen::MatrixXd::Zero(config.embed_dim, config.hidden_dim);
  p.b1 = Eigen::VectorXd::Zero(config.hidden_dim);
  p.w2 = Eigen::MatrixXd::Zero(config.hidden_dim, config.output_dim);
  p.b2 = Eigen::VectorXd::Zero(config.output_dim);
  return p;
}

EncoderParams EncoderParams::init(const EncoderConfig& config,
                                  std::uint64_t seed) {
  EncoderParams p = zeros(config);
  Rng rng(seed);
  fill_uniform(p.embedding, rng);
  fill_uniform(p.w1, rng);
  fill_uniform(p.w2, rng);
  return p;
}

void EncoderParams::set_zero() {
  embedding.setZero();
  w1.setZero();
  b1.setZero();
  w2.setZero();
  b2.setZero();
}

bool EncoderParams::all_finite() const {
  return embedding.allFinite() && w1.allFinite() && b1.allFinite() &&
         w2.allFinite() && b2.allFinite();
}

void EncoderParams::for_each_tensor(
    const std::function<void(const char*, double*, std::size_t)>& f) {
  f("embedding", embedding.data(), static_cast<std::size_t>(embedding.size()));
  f("w1", w1.data(), static_cast<std::size_t>(w1.size()));
  f("b1", b1.data(), static_cast<std::size_t>(b1.size()));
  f("w2", w2.data(), static_cast<std::size_t>(w2.size()));
  f("b2", b2.data(), static_cast<std::size_t>(b2.size()));
}

void EncoderParams::for_each_tensor(
    const std::function<void(const char*, const double*, std::size_t)>& f)
    const {
  f("embedding", embedding.data(), static_cast<std::size_t>(embedding.size()));
  f("w1", w1.data(), static_cast<std::size_t>(w1.size()));
  f("b1", b1.data(), static_cast<std::size_t>(b1.size()));
  f("w2", w2.data(), static_cast<std::size_t>(w2.size()));
  f("b2", b2.data(), static_cast<std::size_t>(b2.size()));
}

ClassifierParams ClassifierParams::zeros(std::uint32_t dim,
                                         std::uint32_t num_classes) {
  ClassifierParams c;
  c.w = Eigen::MatrixXd::Zero(dim, num_classes);
  c.b = Eigen::VectorXd::Zero(num_classes);
  return c;
}

ClassifierParams ClassifierParams::init(std::uint32_t dim,
                                        std::uint32_t num_classes,
                                        std::uint64_t seed) {
  ClassifierParams c = zeros(dim, num_classes);
  Rng rng(seed);
  fill_uniform(c.w, rng);
  return c;
}

void ClassifierParams::set_zero() {
  w.setZero();
  b.setZero();
}

bool ClassifierParams::all_finite() const {
  return w.allFinite() && b.allFinite();
}

void ClassifierParams::for_each_tensor(
    const std::function<void(const char*, double*, std::size_t)>& f) {
  f("w", w.data(), static_cast<std::size_t>(w.size()));
  f("b", b.data(), static_cast<std::size_t>(b.size()));
}

void ClassifierParams::for_each_tensor(
    const std::function<void(const char*, const double*, std::size_t)>& f)
    const {
  f("w", w.data(), static_cast<std::size_t>(w.size()));
  f("b", b.data(), static_cast<std::size_t>(b.size()));
}

ForwardCache encode_forward(const EncoderParams& params,
                            const std::vector<std::uint32_t>& tokens) {
  if (tokens.empty()) throw ValidationError("encoder input is empty");
  ForwardCache c;
  c.tokens = tokens;
  c.pooled = Eigen::VectorXd::Zero(params.config.embed_dim);
  for (auto t : tokens) {
    if (t >= params.config.vocab_size) {
      throw ValidationError("token id " + std::to_string(t) +
                            " >= vocab_size " +
                            std::to_string(params.config.vocab_size));
    }
    c.pooled += params.embedding.row(t).transpose();
  }
  c.pooled /= static_cast<double>(tokens.size());
  c.hidden = (params.w1.transpose() * c.pooled + params.b1).array().tanh();
  c.u = params.w2.transpose() * c.hidden + params.b2;
  c.norm = c.u.norm();
  if (!(c.norm >= std::numeric_limits<double>::min())) {
    c.degenerate = true;
    c.z = Eigen::VectorXd::Zero(params.config.output_dim);
    c.z(0) = 1.0;
  } else {
    c.z = c.u / c.norm;
  }
  return c;
}

bool accumulate_encoder_grad(const EncoderParams& params,
                             const ForwardCache& cache,
                             const Eigen::VectorXd& dl_dz,
                             EncoderParams& grads) {
  if (cache.degenerate) return false;
  // Normalization Jacobian (I - z z^T) / |u|.
  const Eigen::VectorXd du =
      (dl_dz - cache.z * cache.z.dot(dl_dz)) / cache.norm;
  grads.w2.noalias() += cache.hidden * du.transpose();
  grads.b2 += du;
  const Eigen::VectorXd dpre =
      (params.w2 * du).cwiseProduct(
          (1.0 - cache.hidden.array().square()).matrix());
  grads.w1.noalias() += cache.pooled * dpre.transpose();
  grads.b1 += dpre;
  const Eigen::VectorXd dpooled =
      params.w1 * dpre / static_cast<double>(cache.tokens.size());
  for (auto t : cache.tokens) grads.embedding.row(t) += dpooled.transpose();
  return true;
}

EncoderGrad encode_backward(const EncoderParams& params,
                            const ForwardCache& cache,
                            const Eigen::VectorXd& dl_dz) {
  EncoderGrad out{EncoderParams::zeros(params.config), false};
  out.degenerate = !accumulate_encoder_grad(params, cache, dl_dz, out.grads);
  return out;
}

Eigen::VectorXd classifier_logits(const ClassifierParams& clf,
                                  const Eigen::VectorXd& z) {
  return clf.w.transpose() * z + clf.b;
}

double softmax_cross_entropy(const Eigen::VectorXd& logits, std::uint32_t y,
                             Eigen::VectorXd* dlogits) {
  const double mx = logits.maxCoeff();
  const Eigen::VectorXd e = (logits.array() - mx).exp();
  const double sum = e.sum();
  const double loss = std::log(sum) - (logits(y) - mx);
  if (dlogits != nullptr) {
    *dlogits = e / sum;
    (*dlogits)(y) -= 1.0;
  }
  return loss;
}

ClassifyResult classify_forward_backward(const ClassifierParams& clf,
                                         const Eigen::VectorXd& z,
                                         std::uint32_t y_true) {
  if (y_true >= clf.num_classes()) {
    throw ValidationError("label " + std::to_string(y_true) +
                          " outside the classifier's " +
                          std::to_string(clf.num_classes()) + " classes");
  }
  ClassifyResult r;
  r.logits = classifier_logits(clf, z);
  Eigen::VectorXd dlogits;
  r.loss = softmax_cross_entropy(r.logits, y_true, &dlogits);
  r.dw = z * dlogits.transpose();
  r.db = dlogits;
  r.dz = clf.w * dlogits;
  return r;
}

std::uint32_t argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return static_cast<std::uint32_t>(best);
}

std::string optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + name + "'");
}

void Optimizer::update(std::size_t slot, double* param, const double* grad,
                       std::size_t n) {
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < n; ++i) param[i] -= lr * grad[i];
    return;
  }
  if (m_.size() <= slot) {
    m_.resize(slot + 1);
    v_.resize(slot + 1);
  }
  if (m_[slot].size() != n) {
    m_[slot].assign(n, 0.0);
    v_[slot].assign(n, 0.0);
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  auto& m = m_[slot];
  auto& v = v_[slot];
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
    v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
    param[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
  }
}

std::uint64_t checksum(const EncoderParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  params.for_each_tensor([&](const char*, const double* d, std::size_t n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(d);
    for (std::size_t i = 0; i < n * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  });
  return h;
}

nlohmann::ordered_json encoder_to_json(const EncoderParams& params) {
  nlohmann::ordered_json j;
  j["config"] = {{"vocab_size", params.config.vocab_size},
                 {"embed_dim", params.config.embed_dim},
                 {"hidden_dim", params.config.hidden_dim},
                 {"output_dim", params.config.output_dim}};
  j["embedding"] = matrix_to_json(params.embedding);
  j["w1"] = matrix_to_json(params.w1);
  j["b1"] = matrix_to_json(params.b1);
  j["w2"] = matrix_to_json(params.w2);
  j["b2"] = matrix_to_json(params.b2);
  return j;
}

EncoderParams encoder_from_json(const nlohmann::json& j) {
  EncoderConfig cfg;
  const auto& c = j.at("config");
  cfg.vocab_size = c.at("vocab_size").get<std::uint32_t>();
  cfg.embed_dim = c.at("embed_dim").get<std::uint32_t>();
  cfg.hidden_dim = c.at("hidden_dim").get<std::uint32_t>();
  cfg.output_dim = c.at("output_dim").get<std::uint32_t>();
  EncoderParams p = EncoderParams::zeros(cfg);
  p.embedding = matrix_from_json(j.at("embedding"), cfg.vocab_size,
                                 cfg.embed_dim, "embedding");
  p.w1 = matrix_from_json(j.at("w1"), cfg.embed_dim, cfg.hidden_dim, "w1");
  p.b1 = matrix_from_json(j.at("b1"), cfg.hidden_dim, 1, "b1");
  p.w2 = matrix_from_json(j.at("w2"), cfg.hidden_dim, cfg.output_dim, "w2");
  p.b2 = matrix_from_json(j.at("b2"), cfg.output_dim, 1, "b2");
  return p;
}

nlohmann::ordered_json classifier_to_json(const ClassifierParams& clf) {
  nlohmann::ordered_json j;
  j["w"] = matrix_to_json(clf.w);
  j["b"] = matrix_to_json(clf.b);
  return j;
}

ClassifierParams classifier_from_json(const nlohmann::json& j) {
  const auto shape = j.at("w").at("shape").get<std::vector<Eigen::Index>>();
  if (shape.size() != 2) throw ParseError("classifier w must be 2-D", 0);
  ClassifierParams c;
  c.w = matrix_from_json(j.at("w"), shape[0], shape[1], "w");
  c.b = matrix_from_json(j.at("b"), shape[1], 1, "b");
  return c;
}

}  // namespace faircon
