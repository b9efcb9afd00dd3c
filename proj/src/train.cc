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

#include "faircon/train.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace faircon {
namespace {

constexpr std::uint64_t kTagEncoderInit = 0x454e;
constexpr std::uint64_t kTagClassifierInit = 0x434c;
constexpr std::uint64_t kTagTrainBatch = 0x5442;
constexpr std::uint64_t kTagAugment = 0x4147;
constexpr std::uint64_t kTagValBatch = 0x5642;
constexpr std::uint64_t kTagValAugment = 0x5641;
constexpr std::uint64_t kTagFinetune = 0x4654;
constexpr std::uint64_t kTagAudit = 0x4741;

struct EncodedPairs {
  std::vector<ForwardCache> caches;
  PairedBatch batch;
};

EncodedPairs encode_pairs(const EncoderParams& enc,
                          const std::vector<Example>& pairs) {
  EncodedPairs out;
  const auto n = static_cast<Eigen::Index>(pairs.size());
  out.batch.z.resize(n, enc.config.output_dim);
  out.caches.reserve(pairs.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Example& ex = pairs[static_cast<std::size_t>(i)];
    out.caches.push_back(encode_forward(enc, ex.tokens));
    out.batch.z.row(i) = out.caches.back().z.transpose();
    out.batch.labels.push_back(ex.label);
    out.batch.attrs.push_back(ex.attr);
  }
  return out;
}

std::vector<Example> gather(const Dataset& data,
                            const std::vector<std::size_t>& idx) {
  std::vector<Example> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(data.examples[i]);
  return out;
}

void backprop_encoder(const EncoderParams& enc, const EncodedPairs& ep,
                      const Eigen::MatrixXd& dz, EncoderParams& grads) {
  grads.set_zero();
  for (std::size_t i = 0; i < ep.caches.size(); ++i) {
    accumulate_encoder_grad(enc, ep.caches[i],
                            dz.row(static_cast<Eigen::Index>(i)).transpose(),
                            grads);
  }
}

[[noreturn]] void diverged(std::uint32_t epoch, std::size_t batch,
                           const std::string& detail) {
  throw TrainingDivergedError("training diverged at epoch " +
                                  std::to_string(epoch) + ", batch " +
                                  std::to_string(batch) + ": " + detail,
                              epoch, batch);
}

// Loss components for the divergence diagnostic; never throws.
std::string components(const PairedBatch& batch, const TrainConfig& cfg,
                       double total) {
  std::ostringstream os;
  os << "loss=" << total;
  try {
    os << " sup=" << sup_con_loss(batch, cfg.loss.tau).value
       << " cs=" << cs_infonce_loss(batch, cfg.loss.tau).value;
  } catch (const std::exception& e) {
    os << " (components unavailable: " << e.what() << ")";
  }
  os << " lambda=" << cfg.loss.lambda << " gamma=" << cfg.loss.gamma;
  return os.str();
}

Eigen::MatrixXd encode_all(const EncoderParams& enc, const Dataset& data) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(data.size()),
                    enc.config.output_dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    z.row(static_cast<Eigen::Index>(i)) =
        encode_forward(enc, data.examples[i].tokens).z.transpose();
  }
  return z;
}

double f1_on_embeddings(const ClassifierParams& clf, const Eigen::MatrixXd& z,
                        const Dataset& data) {
  std::vector<PredictionRecord> recs;
  recs.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& ex = data.examples[i];
    recs.push_back({ex.label,
                    argmax(classifier_logits(
                        clf, z.row(static_cast<Eigen::Index>(i)).transpose())),
                    ex.attr});
  }
  return f1_scores(recs, data.num_classes).f1;
}

// Patience bookkeeping. Returns true when training should stop.
struct EarlyStopper {
  std::uint32_t patience;
  bool higher_is_better;
  double best;
  std::uint32_t bad_epochs = 0;

  EarlyStopper(std::uint32_t p, bool higher)
      : patience(p),
        higher_is_better(higher),
        best(higher ? -std::numeric_limits<double>::infinity()
                    : std::numeric_limits<double>::infinity()) {}

  // Returns whether `value` improved on the best so far.
  bool observe(double value) {
    const bool better = higher_is_better ? value > best : value < best;
    if (better) {
      best = value;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
    }
    return better;
  }
  bool should_stop() const { return bad_epochs >= patience; }
};

void check_data(const Dataset& train, const Dataset& val) {
  train.validate();
  val.validate();
  if (val.examples.empty()) throw ConfigError("validation split is empty");
  if (train.vocab_size != val.vocab_size ||
      train.num_classes != val.num_classes ||
      train.num_groups != val.num_groups) {
    throw ValidationError("train and validation headers differ");
  }
}

void check_lexicon(const SynonymLexicon& lexicon, const Dataset& train) {
  if (lexicon.vocab_size() != 0 && lexicon.vocab_size() != train.vocab_size) {
    throw ConfigError("lexicon vocabulary size " +
                      std::to_string(lexicon.vocab_size()) +
                      " does not match the data (" +
                      std::to_string(train.vocab_size) + ")");
  }
}

}  // namespace

std::string train_mode_name(TrainMode mode) {
  return mode == TrainMode::kOneStage ? "one_stage" : "two_stage";
}

TrainMode parse_train_mode(const std::string& name) {
  if (name == "one_stage" || name == "one-stage") return TrainMode::kOneStage;
  if (name == "two_stage" || name == "two-stage") return TrainMode::kTwoStage;
  throw ConfigError("unknown training mode '" + name +
                    "' (expected one-stage or two-stage)");
}

void TrainConfig::validate() const {
  if (pretrain_epochs == 0) throw ConfigError("pretrain_epochs must be > 0");
  if (mode == TrainMode::kTwoStage && finetune_epochs == 0) {
    throw ConfigError("finetune_epochs must be > 0");
  }
  if (anchors_per_batch < 2) throw ConfigError("anchors_per_batch must be >= 2");
  if (finetune_batch < 1) throw ConfigError("finetune_batch must be >= 1");
  if (early_stop_patience < 1) {
    throw ConfigError("early_stop_patience must be >= 1");
  }
  if (!(optimizer.learning_rate > 0.0) || !std::isfinite(optimizer.learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (optimizer.kind == OptimizerKind::kAdam &&
      !(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0 &&
        optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0 &&
        optimizer.epsilon > 0.0)) {
    throw ConfigError("adam requires beta1, beta2 in [0, 1) and epsilon > 0");
  }
  if (encoder.embed_dim == 0 || encoder.hidden_dim == 0 ||
      encoder.output_dim == 0) {
    throw ConfigError("encoder dimensions must be > 0");
  }
  loss.validate();
  augment.validate();
}

nlohmann::ordered_json train_config_to_json(const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["mode"] = train_mode_name(cfg.mode);
  j["pretrain_epochs"] = cfg.pretrain_epochs;
  j["finetune_epochs"] = cfg.finetune_epochs;
  j["optimizer"] = optimizer_name(cfg.optimizer.kind);
  j["learning_rate"] = cfg.optimizer.learning_rate;
  j["beta1"] = cfg.optimizer.beta1;
  j["beta2"] = cfg.optimizer.beta2;
  j["epsilon"] = cfg.optimizer.epsilon;
  j["anchors_per_batch"] = cfg.anchors_per_batch;
  j["finetune_batch"] = cfg.finetune_batch;
  j["tau"] = cfg.loss.tau;
  j["lambda"] = cfg.loss.lambda;
  j["gamma"] = cfg.loss.gamma;
  j["augment"] = augment_kind_name(cfg.augment.kind);
  j["augment_rate"] = cfg.augment.rate;
  j["early_stop_patience"] = cfg.early_stop_patience;
  j["seed"] = cfg.seed;
  j["embed_dim"] = cfg.encoder.embed_dim;
  j["hidden_dim"] = cfg.encoder.hidden_dim;
  j["output_dim"] = cfg.encoder.output_dim;
  return j;
}

TrainedModel initial_model(const TrainConfig& cfg, std::uint32_t vocab_size,
                           std::uint32_t num_classes) {
  EncoderConfig ec = cfg.encoder;
  ec.vocab_size = vocab_size;
  TrainedModel m;
  m.encoder = EncoderParams::init(ec, derive_seed(cfg.seed, kTagEncoderInit));
  m.classifier = ClassifierParams::init(ec.output_dim, num_classes,
                                        derive_seed(cfg.seed, kTagClassifierInit));
  m.encoder_checksum = checksum(m.encoder);
  return m;
}

double pretrain_validation_loss(const EncoderParams& encoder,
                                const Dataset& data, const TrainConfig& cfg,
                                const SynonymLexicon& lexicon) {
  const std::size_t anchors = std::min(cfg.anchors_per_batch, data.size());
  const StratifiedBatcher batcher(data, anchors,
                                  derive_seed(cfg.seed, kTagValBatch));
  const auto batches = batcher.epoch(0);
  double total = 0.0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto pairs = make_pair_batch(gather(data, batches[b]), cfg.augment,
                                       lexicon,
                                       derive_seed(cfg.seed, kTagValAugment, b));
    const EncodedPairs ep = encode_pairs(encoder, pairs);
    total += two_stage_pretrain_loss(ep.batch, cfg.loss).value;
  }
  return total / static_cast<double>(batches.size());
}

TrainedModel run_two_stage(const Dataset& train, const Dataset& val,
                           const TrainConfig& cfg,
                           const SynonymLexicon& lexicon) {
  if (cfg.mode != TrainMode::kTwoStage) {
    throw ConfigError("run_two_stage called with mode " +
                      train_mode_name(cfg.mode));
  }
  cfg.validate();
  check_data(train, val);
  check_lexicon(lexicon, train);

  TrainedModel model = initial_model(cfg, train.vocab_size, train.num_classes);

  // Stage 1: encoder only.
  {
    const StratifiedBatcher batcher(train, cfg.anchors_per_batch,
                                    derive_seed(cfg.seed, kTagTrainBatch));
    Optimizer opt(cfg.optimizer);
    EncoderParams grads = EncoderParams::zeros(model.encoder.config);
    EncoderParams best = model.encoder;
    EarlyStopper stopper(cfg.early_stop_patience, /*higher=*/false);
    for (std::uint32_t e = 0; e < cfg.pretrain_epochs; ++e) {
      const auto batches = batcher.epoch(e);
      double epoch_loss = 0.0;
      for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto pairs =
            make_pair_batch(gather(train, batches[b]), cfg.augment, lexicon,
                            derive_seed(cfg.seed, kTagAugment, e, b));
        const EncodedPairs ep = encode_pairs(model.encoder, pairs);
        if (!ep.batch.z.allFinite()) diverged(e, b, "non-finite embedding");
        const LossResult lr = two_stage_pretrain_loss(ep.batch, cfg.loss);
        if (!std::isfinite(lr.value) || !lr.dz.allFinite()) {
          diverged(e, b, components(ep.batch, cfg, lr.value));
        }
        backprop_encoder(model.encoder, ep, lr.dz, grads);
        opt.step(model.encoder, grads);
        if (!model.encoder.all_finite()) {
          diverged(e, b, "non-finite encoder parameter after update; " +
                             components(ep.batch, cfg, lr.value));
        }
        epoch_loss += lr.value;
      }
      const double val_loss =
          pretrain_validation_loss(model.encoder, val, cfg, lexicon);
      model.log.push_back({"pretrain", e,
                           epoch_loss / static_cast<double>(batches.size()),
                           val_loss});
      ++model.epochs_ran;
      if (stopper.observe(val_loss)) best = model.encoder;
      if (stopper.should_stop()) break;
    }
    model.encoder = std::move(best);
  }
  const std::uint64_t frozen = checksum(model.encoder);

  // Stage 2: classifier on frozen, un-augmented embeddings.
  {
    const Eigen::MatrixXd z_train = encode_all(model.encoder, train);
    const Eigen::MatrixXd z_val = encode_all(model.encoder, val);
    Optimizer opt(cfg.optimizer);
    ClassifierParams grads =
        ClassifierParams::zeros(model.encoder.config.output_dim, train.num_classes);
    ClassifierParams best = model.classifier;
    EarlyStopper stopper(cfg.early_stop_patience, /*higher=*/true);
    std::vector<std::size_t> order(train.size());
    for (std::uint32_t e = 0; e < cfg.finetune_epochs; ++e) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(derive_seed(cfg.seed, kTagFinetune, e));
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.index(i)]);
      }
      double epoch_loss = 0.0;
      std::size_t batch_index = 0;
      for (std::size_t start = 0; start < order.size();
           start += cfg.finetune_batch, ++batch_index) {
        const std::size_t end = std::min(order.size(), start + cfg.finetune_batch);
        grads.set_zero();
        double loss = 0.0;
        for (std::size_t k = start; k < end; ++k) {
          const auto i = static_cast<Eigen::Index>(order[k]);
          const ClassifyResult r = classify_forward_backward(
              model.classifier, z_train.row(i).transpose(),
              train.examples[order[k]].label);
          loss += r.loss;
          grads.w += r.dw;
          grads.b += r.db;
        }
        const double inv = 1.0 / static_cast<double>(end - start);
        loss *= inv;
        grads.w *= inv;
        grads.b *= inv;
        if (!std::isfinite(loss)) {
          diverged(e, batch_index, "finetune cross-entropy=" + format_double(loss));
        }
        opt.step(model.classifier, grads);
        epoch_loss += loss;
      }
      const double val_f1 = f1_on_embeddings(model.classifier, z_val, val);
      model.log.push_back({"finetune", e,
                           epoch_loss / static_cast<double>(batch_index),
                           val_f1});
      ++model.epochs_ran;
      if (stopper.observe(val_f1)) best = model.classifier;
      if (stopper.should_stop()) break;
    }
    model.classifier = std::move(best);
  }

  model.encoder_checksum = checksum(model.encoder);
  if (model.encoder_checksum != frozen) {
    throw Error("encoder changed during classifier fine-tuning");
  }
  return model;
}

TrainedModel run_one_stage(const Dataset& train, const Dataset& val,
                           const TrainConfig& cfg,
                           const SynonymLexicon& lexicon) {
  if (cfg.mode != TrainMode::kOneStage) {
    throw ConfigError("run_one_stage called with mode " +
                      train_mode_name(cfg.mode));
  }
  cfg.validate();
  check_data(train, val);
  check_lexicon(lexicon, train);

  TrainedModel model = initial_model(cfg, train.vocab_size, train.num_classes);
  const StratifiedBatcher batcher(train, cfg.anchors_per_batch,
                                  derive_seed(cfg.seed, kTagTrainBatch));
  Optimizer enc_opt(cfg.optimizer);
  Optimizer clf_opt(cfg.optimizer);
  EncoderParams enc_grads = EncoderParams::zeros(model.encoder.config);
  ClassifierParams clf_grads = ClassifierParams::zeros(
      model.encoder.config.output_dim, train.num_classes);
  TrainedModel best = model;
  EarlyStopper stopper(cfg.early_stop_patience, /*higher=*/true);

  for (std::uint32_t e = 0; e < cfg.pretrain_epochs; ++e) {
    const auto batches = batcher.epoch(e);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto pairs =
          make_pair_batch(gather(train, batches[b]), cfg.augment, lexicon,
                          derive_seed(cfg.seed, kTagAugment, e, b));
      const EncodedPairs ep = encode_pairs(model.encoder, pairs);
      if (!ep.batch.z.allFinite()) diverged(e, b, "non-finite embedding");
      const Eigen::MatrixXd logits =
          (ep.batch.z * model.classifier.w).rowwise() +
          model.classifier.b.transpose();
      const OneStageResult r = one_stage_loss(ep.batch, logits, cfg.loss);
      if (!std::isfinite(r.value) || !r.dz.allFinite() ||
          !r.dlogits.allFinite()) {
        diverged(e, b,
                 "loss=" + format_double(r.value) + " ce=" + format_double(r.ce) +
                     " sup=" + format_double(r.sup) + " cs=" + format_double(r.cs));
      }
      clf_grads.w = ep.batch.z.transpose() * r.dlogits;
      clf_grads.b = r.dlogits.colwise().sum().transpose();
      const Eigen::MatrixXd dz =
          r.dz + r.dlogits * model.classifier.w.transpose();
      backprop_encoder(model.encoder, ep, dz, enc_grads);
      enc_opt.step(model.encoder, enc_grads);
      clf_opt.step(model.classifier, clf_grads);
      if (!model.encoder.all_finite() || !model.classifier.all_finite()) {
        diverged(e, b, "non-finite parameter after update; loss=" +
                           format_double(r.value));
      }
      epoch_loss += r.value;
    }
    const double val_f1 =
        f1_on_embeddings(model.classifier, encode_all(model.encoder, val), val);
    model.log.push_back({"joint", e,
                         epoch_loss / static_cast<double>(batches.size()),
                         val_f1});
    ++model.epochs_ran;
    if (stopper.observe(val_f1)) {
      best.encoder = model.encoder;
      best.classifier = model.classifier;
    }
    if (stopper.should_stop()) break;
  }
  model.encoder = std::move(best.encoder);
  model.classifier = std::move(best.classifier);
  model.encoder_checksum = checksum(model.encoder);
  return model;
}

TrainedModel train_model(const Dataset& train, const Dataset& val,
                         const TrainConfig& cfg, const SynonymLexicon& lexicon) {
  return cfg.mode == TrainMode::kTwoStage
             ? run_two_stage(train, val, cfg, lexicon)
             : run_one_stage(train, val, cfg, lexicon);
}

std::vector<PredictionRecord> predict(const TrainedModel& model,
                                      const Dataset& data) {
  if (data.examples.empty()) throw ValidationError("evaluation split is empty");
  if (data.vocab_size != model.encoder.config.vocab_size ||
      data.num_classes != model.classifier.num_classes()) {
    throw ValidationError("model and data disagree on vocabulary or classes");
  }
  std::vector<PredictionRecord> out;
  out.reserve(data.size());
  for (const auto& ex : data.examples) {
    const ForwardCache c = encode_forward(model.encoder, ex.tokens);
    out.push_back(
        {ex.label, argmax(classifier_logits(model.classifier, c.z)), ex.attr});
  }
  return out;
}

MetricsRecord evaluate(const TrainedModel& model, const Dataset& data) {
  return compute_metrics(predict(model, data), data.num_classes, data.num_groups);
}

void save_model(const TrainedModel& model, const TrainConfig& cfg,
                const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "faircon-model";
  j["version"] = 1;
  j["seed"] = cfg.seed;
  j["train_config"] = train_config_to_json(cfg);
  j["epochs_ran"] = model.epochs_ran;
  j["encoder_checksum"] = model.encoder_checksum;
  nlohmann::ordered_json log = nlohmann::ordered_json::array();
  for (const auto& e : model.log) {
    log.push_back({{"stage", e.stage},
                   {"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"val_metric", e.val_metric}});
  }
  j["log"] = log;
  j["encoder"] = encoder_to_json(model.encoder);
  j["classifier"] = classifier_to_json(model.classifier);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << j.dump(1) << '\n';
  if (!out) throw Error("failed writing checkpoint '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what(), 0);
  }
  TrainedModel m;
  try {
    if (j.at("format").get<std::string>() != "faircon-model") {
      throw ParseError("'" + path + "' is not a faircon checkpoint", 0);
    }
    m.encoder = encoder_from_json(j.at("encoder"));
    m.classifier = classifier_from_json(j.at("classifier"));
    m.epochs_ran = j.at("epochs_ran").get<std::uint32_t>();
    m.encoder_checksum = j.at("encoder_checksum").get<std::uint64_t>();
    for (const auto& e : j.at("log")) {
      m.log.push_back({e.at("stage").get<std::string>(),
                       e.at("epoch").get<std::uint32_t>(),
                       e.at("train_loss").get<double>(),
                       e.at("val_metric").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what(), 0);
  }
  if (checksum(m.encoder) != m.encoder_checksum) {
    throw ValidationError("checkpoint '" + path + "': encoder checksum mismatch");
  }
  if (m.classifier.w.rows() != m.encoder.config.output_dim) {
    throw ValidationError("checkpoint '" + path +
                          "': classifier does not match encoder output");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Gradient audit

namespace {

PairedBatch random_paired_batch(Rng& rng, std::size_t n, Eigen::Index d) {
  PairedBatch b;
  b.z.resize(static_cast<Eigen::Index>(2 * n), d);
  for (Eigen::Index i = 0; i < b.z.rows(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) b.z(i, k) = rng.uniform(-1.0, 1.0);
    b.z.row(i).normalize();
  }
  b.labels.resize(2 * n);
  b.attrs.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    b.labels[i] = b.labels[i + n] = static_cast<std::uint32_t>(rng.index(2));
    b.attrs[i] = b.attrs[i + n] = static_cast<std::uint32_t>(rng.index(2));
  }
  return b;
}

template <typename Params>
std::vector<std::pair<double*, std::size_t>> flat_views(Params& p) {
  std::vector<std::pair<double*, std::size_t>> v;
  p.for_each_tensor([&](const char*, double* d, std::size_t n) { v.push_back({d, n}); });
  return v;
}

template <typename Params>
std::vector<std::pair<const double*, std::size_t>> flat_views_const(const Params& p) {
  std::vector<std::pair<const double*, std::size_t>> v;
  p.for_each_tensor(
      [&](const char*, const double* d, std::size_t n) { v.push_back({d, n}); });
  return v;
}

// Central differences over every parameter coordinate.
template <typename Params, typename F>
GradCheckReport check_params(Params& params, const Params& analytic, F f,
                             double h) {
  GradCheckReport r;
  auto views = flat_views(params);
  auto grads = flat_views_const(analytic);
  for (std::size_t t = 0; t < views.size(); ++t) {
    for (std::size_t k = 0; k < views[t].second; ++k) {
      double& x = views[t].first[k];
      const double saved = x;
      x = saved + h;
      const double fp = f();
      x = saved - h;
      const double fm = f();
      x = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = grads[t].first[k];
      r.max_abs_error = std::max(r.max_abs_error, std::abs(a - numeric));
      r.max_rel_error = std::max(r.max_rel_error, relative_error(a, numeric));
      ++r.coordinates;
    }
  }
  return r;
}

}  // namespace

GradAuditReport grad_audit(std::size_t seeds, std::uint64_t root_seed,
                           double h) {
  GradAuditReport out;
  auto add = [&](const std::string& name, const GradCheckReport& r) {
    out.entries.push_back({name, r});
    out.max_rel_error = std::max(out.max_rel_error, r.max_rel_error);
  };
  for (std::size_t s = 0; s < seeds; ++s) {
    Rng rng(derive_seed(root_seed, kTagAudit, s));
    const std::size_t n = 3 + rng.index(3);
    const Eigen::Index d = 4;
    const PairedBatch batch = random_paired_batch(rng, n, d);
    LossConfig cfg;
    cfg.tau = rng.uniform(0.3, 1.5);
    cfg.lambda = rng.uniform(0.0, 3.0);
    cfg.gamma = rng.uniform(0.0, 1.0);

    add("sup_con", grad_check(
                       [&](const PairedBatch& b) { return sup_con_loss(b, cfg.tau); },
                       batch, h));
    add("cs_infonce",
        grad_check([&](const PairedBatch& b) { return cs_infonce_loss(b, cfg.tau); },
                   batch, h));
    add("pretrain_objective",
        grad_check(
            [&](const PairedBatch& b) { return two_stage_pretrain_loss(b, cfg); },
            batch, h));

    const std::uint32_t classes = 2 + static_cast<std::uint32_t>(rng.index(2));
    Eigen::MatrixXd logits(batch.z.rows(), classes);
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      logits.data()[i] = rng.uniform(-2.0, 2.0);
    }
    std::vector<std::uint32_t> ce_labels(batch.size());
    for (auto& y : ce_labels) y = static_cast<std::uint32_t>(rng.index(classes));
    PairedBatch cls_batch = batch;
    for (std::size_t i = 0; i < n; ++i) {
      cls_batch.labels[i] = cls_batch.labels[i + n] = ce_labels[i];
    }
    const OneStageResult os = one_stage_loss(cls_batch, logits, cfg);
    add("one_stage_z", grad_check_matrix(
                           [&](const Eigen::MatrixXd& z) {
                             PairedBatch b = cls_batch;
                             b.z = z;
                             return one_stage_loss(b, logits, cfg).value;
                           },
                           cls_batch.z, os.dz, h));
    add("one_stage_logits", grad_check_matrix(
                                [&](const Eigen::MatrixXd& l) {
                                  return one_stage_loss(cls_batch, l, cfg).value;
                                },
                                logits, os.dlogits, h));
    const LossResult ce = mean_cross_entropy(logits, ce_labels);
    add("cross_entropy", grad_check_matrix(
                             [&](const Eigen::MatrixXd& l) {
                               return mean_cross_entropy(l, ce_labels).value;
                             },
                             logits, ce.dz, h));

    // Encoder: L = c . f(x) for a random direction c.
    EncoderConfig ec;
    ec.vocab_size = 10;
    ec.embed_dim = 4;
    ec.hidden_dim = 5;
    ec.output_dim = 3;
    EncoderParams enc = EncoderParams::init(ec, rng.next());
    // Larger weights than the default init keep the tanh units non-trivial.
    enc.for_each_tensor([&](const char*, double* p, std::size_t m) {
      for (std::size_t k = 0; k < m; ++k) p[k] = rng.uniform(-1.0, 1.0);
    });
    std::vector<std::uint32_t> tokens(4 + rng.index(4));
    for (auto& t : tokens) t = static_cast<std::uint32_t>(rng.index(ec.vocab_size));
    Eigen::VectorXd c(ec.output_dim);
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = rng.uniform(-1.0, 1.0);
    const EncoderGrad eg = encode_backward(enc, encode_forward(enc, tokens), c);
    add("encoder_backward",
        check_params(enc, eg.grads,
                     [&] { return c.dot(encode_forward(enc, tokens).z); }, h));

    ClassifierParams clf = ClassifierParams::init(ec.output_dim, classes, rng.next());
    Eigen::VectorXd z(ec.output_dim);
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.uniform(-1.0, 1.0);
    const std::uint32_t y = static_cast<std::uint32_t>(rng.index(classes));
    const ClassifyResult cr = classify_forward_backward(clf, z, y);
    ClassifierParams cgrad = clf;
    cgrad.w = cr.dw;
    cgrad.b = cr.db;
    add("classifier_backward",
        check_params(clf, cgrad,
                     [&] { return classify_forward_backward(clf, z, y).loss; }, h));
    add("classifier_input",
        grad_check_matrix(
            [&](const Eigen::MatrixXd& zz) {
              return classify_forward_backward(clf, zz.col(0), y).loss;
            },
            z, cr.dz, h));
  }
  return out;
}

nlohmann::ordered_json grad_audit_to_json(const GradAuditReport& report) {
  nlohmann::ordered_json j;
  j["tolerance"] = report.tolerance;
  j["max_rel_error"] = report.max_rel_error;
  j["pass"] = report.pass();
  // Worst case per gradient name, in first-seen order.
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& e : report.entries) {
    auto& slot = per[e.name];
    if (slot.is_null()) {
      slot = {{"checks", 0}, {"coordinates", 0}, {"max_rel_error", 0.0},
              {"max_abs_error", 0.0}};
    }
    slot["checks"] = slot["checks"].get<std::size_t>() + 1;
    slot["coordinates"] = slot["coordinates"].get<std::size_t>() + e.report.coordinates;
    slot["max_rel_error"] =
        std::max(slot["max_rel_error"].get<double>(), e.report.max_rel_error);
    slot["max_abs_error"] =
        std::max(slot["max_abs_error"].get<double>(), e.report.max_abs_error);
  }
  j["gradients"] = per;
  return j;
}

}  // namespace faircon
