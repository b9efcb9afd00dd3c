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

// Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Reference values come from the oracles in
// info_oracle.h and fairness_oracle.h, not from the library under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "faircon/cli.h"
#include "faircon/common.h"
#include "faircon/data.h"
#include "faircon/fairness.h"
#include "faircon/infobounds.h"
#include "faircon/losses.h"
#include "faircon/train.h"
#include "fairness_oracle.h"
#include "info_oracle.h"
#include "test_util.h"

namespace faircon {
namespace {

using namespace info;  // NOLINT
using testing::oracle_cmi;
using testing::oracle_entropy;

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

// Rotates through the four regimes the suite cares about, with dimensions
// drawn inside the enumeration caps.
GenerativeSpec regime_spec(Rng& rng, int regime) {
  RandomSpecOptions o;
  o.na = static_cast<std::uint32_t>(2 + rng.index(2));
  o.ny = static_cast<std::uint32_t>(2 + rng.index(2));
  o.nx = static_cast<std::uint32_t>(2 + rng.index(kMaxX - 1));
  o.nz = static_cast<std::uint32_t>(2 + rng.index(kMaxZ - 1));
  switch (regime) {
    case 0:
      return random_spec(rng, o);
    case 1:
      o.kernel_sparsity = 0.6;
      return random_spec(rng, o);
    case 2:
      o.inputs_independent_of_cell = true;
      return random_spec(rng, o);
    default:
      return identity_spec(rng, o.na, o.ny, std::min(o.nx, kMaxZ));
  }
}

DiscreteJoint checked_joint(const GenerativeSpec& spec, Outcome& out) {
  const DiscreteJoint j = joint_from_spec(spec);
  const std::vector<double> ref = testing::oracle_joint_table(spec);
  double diff = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    diff = std::max(diff, std::abs(ref[i] - j.table()[i]));
  }
  out.require(diff <= 1e-12, "joint table differs from direct sum");
  return j;
}

// -E_y E_{z'|y} E_{z|y} log p(z'|z,y), summed directly.
double oracle_upper_rhs(const DiscreteJoint& j) {
  const std::uint32_t na = j.na(), ny = j.ny(), nz = j.nz();
  double rhs = 0.0;
  for (std::uint32_t y = 0; y < ny; ++y) {
    std::vector<double> pzzp(static_cast<std::size_t>(nz) * nz, 0.0);
    double py = 0.0;
    for (std::uint32_t a = 0; a < na; ++a) {
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          pzzp[z * nz + zp] += j(a, y, z, zp);
          py += j(a, y, z, zp);
        }
      }
    }
    if (py == 0.0) continue;
    for (std::uint32_t z = 0; z < nz; ++z) {
      double pz = 0.0;
      for (std::uint32_t zp = 0; zp < nz; ++zp) pz += pzzp[z * nz + zp];
      for (std::uint32_t zp = 0; zp < nz; ++zp) {
        double pzp = 0.0;
        for (std::uint32_t w = 0; w < nz; ++w) pzp += pzzp[w * nz + zp];
        const double weight = (pz / py) * (pzp / py) * py;
        if (weight == 0.0) continue;
        if (pzzp[z * nz + zp] == 0.0) return kInf;
        rhs -= weight * std::log(pzzp[z * nz + zp] / pz);
      }
    }
  }
  return rhs;
}

// KL(P_{Z',Z} || sum_{a,y} p(a,y) p(z'|a,y) p(z|a,y)), summed directly.
double oracle_mixture_lhs(const DiscreteJoint& j) {
  const std::uint32_t nz = j.nz();
  std::vector<double> p(static_cast<std::size_t>(nz) * nz, 0.0), m = p;
  for (std::uint32_t a = 0; a < j.na(); ++a) {
    for (std::uint32_t y = 0; y < j.ny(); ++y) {
      double pay = 0.0;
      std::vector<double> pz(nz, 0.0), pzp(nz, 0.0);
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          const double v = j(a, y, z, zp);
          pay += v;
          pz[z] += v;
          pzp[zp] += v;
          p[zp * nz + z] += v;
        }
      }
      if (pay == 0.0) continue;
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t zp = 0; zp < nz; ++zp) {
          m[zp * nz + z] += pzp[zp] * pz[z] / pay;
        }
      }
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / m[i]);
  }
  return kl;
}

std::vector<double> dirichlet(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = -std::log(1.0 - rng.uniform());
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

void criterion_sandwich(Outcome& out) {
  Rng rng(derive_seed(2026, 1));
  std::size_t held = 0, eps_zero = 0;
  double worst = -kInf, worst_eq = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int regime = t % 4;
    const DiscreteJoint j = checked_joint(regime_spec(rng, regime), out);
    const double i_za = oracle_cmi(j, kZ, kA, kY);
    const double i_y = oracle_cmi(j, kZp, kZ, kY);
    const double i_ay = oracle_cmi(j, kZp, kZ, kA | kY);
    const double eps = oracle_entropy(j, kZ | kZp | kY) - oracle_entropy(j, kZp | kY);
    const double lower = i_y - i_ay - eps, upper = i_y - i_ay + eps;
    const double violation = std::max(lower - i_za, i_za - upper);
    worst = std::max(worst, violation);
    const BoundReport r = check_sandwich(j);
    const bool agree = std::abs(r.i_za_given_y - i_za) <= kTol &&
                       std::abs(r.epsilon - eps) <= kTol &&
                       std::abs(r.lower - lower) <= kTol &&
                       std::abs(r.upper - upper) <= kTol;
    out.require(agree, "library quantities differ from oracle at trial " +
                           std::to_string(t));
    out.require(r.pass, "library check failed at trial " + std::to_string(t));
    if (violation <= kTol) ++held;
    if (regime == 3) {
      ++eps_zero;
      worst_eq = std::max({worst_eq, std::abs(eps), std::abs(lower - i_za),
                           std::abs(upper - i_za)});
    }
  }
  out.require(held == 1000, "sandwich violated");
  out.require(worst_eq <= kTol, "eps = 0 case is not an equality");
  out.detail << held << "/1000 held, max violation " << worst
             << "; eps=0 cases " << eps_zero << ", max |gap| " << worst_eq;
}

void criterion_upper(Outcome& out) {
  Rng rng(derive_seed(2026, 2));
  std::size_t held = 0, infinite = 0;
  double worst = -kInf;
  for (int t = 0; t < 500; ++t) {
    const DiscreteJoint j = checked_joint(regime_spec(rng, t % 4), out);
    const double lhs = oracle_cmi(j, kZp, kZ, kY);
    const double rhs = oracle_upper_rhs(j);
    const UpperBoundReport r = check_upper_bound(j);
    out.require(r.rhs_infinite == std::isinf(rhs),
                "infinite-rhs flag differs at trial " + std::to_string(t));
    if (std::isinf(rhs)) {
      ++infinite;
      ++held;
      out.require(r.pass, "library check failed at trial " + std::to_string(t));
      continue;
    }
    out.require(std::abs(r.rhs - rhs) <= kTol && std::abs(r.lhs - lhs) <= kTol,
                "library quantities differ from oracle at trial " +
                    std::to_string(t));
    out.require(r.pass, "library check failed at trial " + std::to_string(t));
    worst = std::max(worst, lhs - rhs);
    if (lhs <= rhs + kTol) ++held;
  }
  out.require(held == 500, "upper bound violated");
  out.detail << held << "/500 held (" << infinite
             << " with infinite rhs), max lhs - rhs " << worst;
}

void criterion_lower(Outcome& out) {
  Rng rng(derive_seed(2026, 3));
  std::size_t held = 0;
  double worst = -kInf;
  for (int t = 0; t < 20; ++t) {
    const DiscreteJoint j = checked_joint(regime_spec(rng, t % 3), out);
    const double cmi = oracle_cmi(j, kZp, kZ, kA | kY);
    for (int c = 0; c < 100; ++c) {
      const Critic critic = random_critic(rng, j.nz());
      const double v = cs_infonce_exact(j, critic, 2);
      out.require(std::abs(v - testing::oracle_cs_infonce_n2(j, critic)) <= kTol,
                  "N=2 value differs from nested-loop oracle");
      out.require(cs_infonce_exact(j, critic, 1) == 0.0, "N=1 value is not 0");
      worst = std::max(worst, v - cmi);
      if (v <= cmi + kTol) ++held;
    }
  }
  out.require(held == 2000, "lower bound violated");

  std::size_t monotone = 0;
  for (int t = 0; t < 20; ++t) {
    RandomSpecOptions o;
    o.inputs_independent_of_cell = true;
    const DiscreteJoint j = checked_joint(random_spec(rng, o), out);
    const Critic critic = pmi_critic(j);
    const double v1 = cs_infonce_exact(j, critic, 1);
    const double v2 = cs_infonce_exact(j, critic, 2);
    const double v3 = cs_infonce_exact(j, critic, 3);
    const bool ok = v1 == 0.0 && v1 <= v2 + 1e-12 && v2 <= v3 + 1e-12 &&
                    v3 <= oracle_cmi(j, kZp, kZ, kA | kY) + kTol;
    if (ok) ++monotone;
  }
  out.require(monotone == 20, "not monotone in N");
  out.detail << held << "/2000 below I(Z';Z|A,Y), max excess " << worst
             << "; monotone over N=1..3 on " << monotone << "/20 joints";
}

void criterion_kl(Outcome& out) {
  Rng rng(derive_seed(2026, 4));
  double worst_gap = 0.0, worst_excess = -kInf;
  std::size_t violations = 0;
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> p = dirichlet(rng, 6), q = dirichlet(rng, 6);
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) kl += p[i] * std::log(p[i] / q[i]);
    auto objective = [&](const std::vector<double>& s) {
      double v = 1.0;
      for (std::size_t i = 0; i < p.size(); ++i) v += p[i] * s[i] - q[i] * std::exp(s[i]);
      return v;
    };
    std::vector<double> opt(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) opt[i] = std::log(p[i] / q[i]);
    worst_gap = std::max(worst_gap, std::abs(objective(opt) - kl));
    worst_gap = std::max(worst_gap, std::abs(variational_objective(p, q, opt) - kl));
    out.require(std::abs(kl_divergence(p, q) - kl) <= 1e-12, "KL differs from oracle");
    for (int c = 0; c < 100; ++c) {
      std::vector<double> s(p.size());
      for (auto& v : s) v = rng.uniform(-3.0, 3.0);
      const double v = objective(s);
      worst_excess = std::max(worst_excess, v - kl);
      if (v > kl + kTol) ++violations;
    }
    Rng lib_rng(derive_seed(2026, 40, static_cast<std::uint64_t>(t)));
    const KlVariationalReport r = kl_variational_check(p, q, lib_rng, 100);
    out.require(r.pass && r.random_violations == 0, "library check failed");
  }
  out.require(worst_gap <= kTol, "optimal critic misses KL");
  out.require(violations == 0, "random critic exceeds KL");
  out.detail << "max |objective(s*) - KL| " << worst_gap << "; " << violations
             << "/5000 random critics above KL (max excess " << worst_excess << ")";
}

void criterion_mixture(Outcome& out) {
  Rng rng(derive_seed(2026, 5));
  std::size_t held = 0;
  double worst = -kInf;
  for (int t = 0; t < 500; ++t) {
    const DiscreteJoint j = checked_joint(regime_spec(rng, t % 4), out);
    const double lhs = oracle_mixture_lhs(j);
    const double rhs = oracle_cmi(j, kZp, kZ, kA | kY);
    const MixtureBoundReport r = check_mixture_bound(j);
    out.require(std::abs(r.lhs - lhs) <= kTol && std::abs(r.rhs - rhs) <= kTol,
                "library quantities differ from oracle at trial " +
                    std::to_string(t));
    out.require(r.pass, "library check failed at trial " + std::to_string(t));
    worst = std::max(worst, lhs - rhs);
    if (lhs <= rhs + kTol) ++held;
  }
  out.require(held == 500, "mixture bound violated");
  double worst_eq = 0.0;
  for (int t = 0; t < 20; ++t) {
    RandomSpecOptions o;
    o.inputs_independent_of_cell = true;
    const DiscreteJoint j = checked_joint(random_spec(rng, o), out);
    worst_eq = std::max(worst_eq, std::abs(oracle_mixture_lhs(j) -
                                           oracle_cmi(j, kZp, kZ, kA | kY)));
  }
  out.require(worst_eq <= kTol, "degenerate case is not an equality");
  out.detail << held << "/500 held, max lhs - rhs " << worst
             << "; degenerate (A,Y) max |lhs - rhs| " << worst_eq;
}

void criterion_gradients(Outcome& out) {
  const GradAuditReport r = grad_audit(20, 2026, 1e-5);
  std::map<std::string, std::size_t> per_name;
  for (const auto& e : r.entries) ++per_name[e.name];
  for (const char* required : {"sup_con", "cs_infonce", "pretrain_objective",
                               "one_stage_z", "one_stage_logits", "cross_entropy",
                               "encoder_backward"}) {
    out.require(per_name[required] == 20,
                std::string("missing 20 seeds for ") + required);
  }
  out.require(r.max_rel_error < 1e-4, "relative error too large");
  out.detail << per_name.size() << " gradients x 20 seeds, max relative error "
             << r.max_rel_error;
}

PairedBatch identical_batch(std::size_t n_anchors) {
  PairedBatch b;
  b.z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n_anchors), 3);
  b.z.col(0).setOnes();
  b.labels.assign(2 * n_anchors, 1);
  b.attrs.assign(2 * n_anchors, 0);
  return b;
}

void criterion_closed_forms(Outcome& out) {
  const PairedBatch b = identical_batch(2);
  double worst = 0.0;
  for (double tau : {0.1, 0.5, 1.0}) {
    const double sup = sup_con_loss(b, tau).value;
    const double cs = cs_infonce_loss(b, tau).value;
    worst = std::max({worst, std::abs(sup - 4.0 * std::log(3.0)),
                      std::abs(cs - 4.0 / 3.0 * std::log(3.0))});
  }
  out.require(worst <= kTol, "closed form missed");

  Rng rng(derive_seed(2026, 7));
  bool zero = true;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng.index(6);
    PairedBatch s;
    s.z.resize(static_cast<Eigen::Index>(2 * n), 4);
    for (Eigen::Index i = 0; i < s.z.size(); ++i) s.z.data()[i] = rng.uniform(-1, 1);
    s.z.rowwise().normalize();
    s.labels.resize(2 * n);
    s.attrs.resize(2 * n);
    // Every anchor gets its own (a, y) cell.
    for (std::size_t i = 0; i < n; ++i) {
      s.labels[i] = s.labels[i + n] = static_cast<std::uint32_t>(i % 2);
      s.attrs[i] = s.attrs[i + n] = static_cast<std::uint32_t>(i / 2);
    }
    zero = zero && cs_infonce_loss(s, 0.1 + rng.uniform()).value == 0.0;
  }
  out.require(zero, "singleton cells do not give exactly 0");
  out.detail << "max |L - closed form| " << worst
             << "; 20 singleton-cell batches exactly 0: " << (zero ? "yes" : "no");
}

void criterion_fairness(Outcome& out) {
  Rng rng(derive_seed(2026, 8));
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::uint32_t C = 0, G = 0;
    const auto recs = testing::random_records(rng, &C, &G);
    const MetricsRecord m = compute_metrics(recs, C, G);
    const testing::OracleMetrics o = testing::oracle_metrics(recs, C, G);
    worst = std::max({worst, std::abs(m.f1 - o.f1), std::abs(m.delta_tpr - o.delta_tpr),
                      std::abs(m.delta_fpr - o.delta_fpr),
                      std::abs(m.delta_eo - o.delta_eo)});
    const GroupRates r = group_confusion(recs, C, G);
    for (std::uint32_t c = 0; c < C; ++c) {
      for (std::uint32_t a = 0; a < G; ++a) {
        const auto tpr = r.cell(c, a).tpr(), fpr = r.cell(c, a).fpr();
        out.require(tpr.has_value() == o.tpr[c][a].has_value() &&
                        fpr.has_value() == o.fpr[c][a].has_value(),
                    "rate definedness differs");
        if (tpr && o.tpr[c][a]) worst = std::max(worst, std::abs(*tpr - *o.tpr[c][a]));
        if (fpr && o.fpr[c][a]) worst = std::max(worst, std::abs(*fpr - *o.fpr[c][a]));
      }
    }
    if (C > 2) {
      double sum = 0.0;
      for (const auto& g : m.per_class) sum += g.delta_tpr + g.delta_fpr;
      worst = std::max(worst, std::abs(m.delta_eo - sum));
      out.require(m.per_class.size() == C, "multi-class gap is not per class");
    }
  }
  out.require(worst <= 1e-12, "metrics differ from brute-force counter");
  out.detail << "200 prediction sets, max |library - oracle| " << worst;
}

void criterion_direction(Outcome& out) {
  SynthConfig data_cfg;  // leakage 0.5, base rates 0.8/0.2 vs 0.3/0.7, 5000 train
  const SplitDatasets data = generate_synthetic(data_cfg);
  const SynonymLexicon lexicon = SynonymLexicon::from_synth_config(data_cfg);
  double eo[2] = {0, 0}, f1[2] = {0, 0};
  const double lambdas[2] = {0.0, 5.0};
  for (int l = 0; l < 2; ++l) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TrainConfig cfg;
      cfg.mode = TrainMode::kTwoStage;
      cfg.anchors_per_batch = 8;
      cfg.loss.tau = 0.5;
      cfg.loss.lambda = lambdas[l];
      cfg.seed = seed;
      const TrainedModel m = train_model(data.train, data.val, cfg, lexicon);
      const MetricsRecord r = evaluate(m, data.test);
      eo[l] += r.delta_eo / 5.0;
      f1[l] += r.f1 / 5.0;
    }
  }
  out.require(eo[1] < eo[0], "mean delta_eo did not decrease");
  out.require(f1[0] - f1[1] <= 0.15, "F1 dropped by more than 0.15");
  out.detail << "mean delta_eo " << eo[0] << " (lambda 0) -> " << eo[1]
             << " (lambda 5); mean F1 " << f1[0] << " -> " << f1[1];
}

void criterion_reproducible(Outcome& out) {
  testing::TempDir dir;
  testing::write_file(dir.file("config.json"), R"({
    "seed": 11,
    "data": {"n_train": 1000, "n_val": 200, "n_test": 400},
    "train": {"pretrain_epochs": 3, "finetune_epochs": 3, "anchors_per_batch": 8},
    "sweep": {"seeds": [1, 2, 3], "taus": [0.2, 0.5]}
  })");
  const std::string cfg = dir.file("config.json");
  struct Case {
    std::vector<std::string> args;
    std::vector<std::string> artifacts;
  };
  const std::vector<Case> cases = {
      {{"train", "--config", cfg, "--lambda", "1"}, {"model.json", "metrics.json"}},
      {{"train", "--config", cfg, "--mode", "one-stage"}, {"model.json", "metrics.json"}},
      {{"sweep", "--config", cfg, "--lambda", "0", "--lambda", "2"},
       {"sweep_runs.csv", "sweep_aggregate.csv"}},
      {{"verify-bounds", "--trials", "200", "--seed", "3"}, {"bounds_report.json"}},
  };
  std::size_t identical = 0, total = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    std::vector<std::string> runs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const std::string out_dir = dir.file("case" + std::to_string(c));
      std::filesystem::remove_all(out_dir);
      std::vector<std::string> args = cases[c].args;
      args.push_back("--out");
      args.push_back(out_dir);
      std::ostringstream sink_out, sink_err;
      const int code = run_cli(args, sink_out, sink_err);
      out.require(code == kExitOk, args.front() + " exited " + std::to_string(code) +
                                       ": " + sink_err.str());
      for (const auto& a : cases[c].artifacts) {
        runs[rep].push_back(testing::read_file(out_dir + "/" + a));
      }
    }
    for (std::size_t a = 0; a < runs[0].size(); ++a) {
      ++total;
      if (!runs[0][a].empty() && runs[0][a] == runs[1][a]) ++identical;
    }
  }
  out.require(identical == total, "artifact bytes differ between reruns");
  out.detail << identical << "/" << total
             << " artifacts byte-identical across train, sweep and verify-bounds reruns";
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace
}  // namespace faircon

int main() {
  using faircon::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "conditional MI sandwich", faircon::criterion_sandwich},
      {2, "conditional MI upper bound", faircon::criterion_upper},
      {3, "CS-InfoNCE lower bound", faircon::criterion_lower},
      {4, "KL variational identity", faircon::criterion_kl},
      {5, "mixture KL bound", faircon::criterion_mixture},
      {6, "gradient audit", faircon::criterion_gradients},
      {7, "closed-form loss values", faircon::criterion_closed_forms},
      {8, "fairness metric oracle", faircon::criterion_fairness},
      {9, "fairness term lowers EO gap", faircon::criterion_direction},
      {10, "byte-identical reruns", faircon::criterion_reproducible},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    faircon::Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("%s criterion %2d  %-28s %7.1fs  %s\n", out.pass ? "PASS" : "FAIL",
                c.id, c.name, secs, out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
