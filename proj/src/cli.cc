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

#include "faircon/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "faircon/augment.h"
#include "faircon/data.h"
#include "faircon/infobounds.h"
#include "faircon/run_config.h"
#include "faircon/sweep.h"
#include "faircon/train.h"

namespace faircon {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string data_dir;
  std::string mode;
  std::vector<double> lambdas;
  std::string model;
  std::string split = "test";
  std::size_t trials = 0;
  bool record_time = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
};

// Returns the --seed option so callers can tell whether it was given.
CLI::Option* add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Run configuration (JSON)");
  CLI::Option* seed = sub->add_option("--seed", f.seed, "Root seed");
  sub->add_option("--out", f.out, "Output directory");
  return seed;
}

void add_training(CLI::App* sub, Flags& f, bool repeat_lambda) {
  sub->add_option("--data", f.data_dir,
                  "Corpus directory written by gen-data (default: generate)");
  sub->add_option("--mode", f.mode, "one-stage or two-stage")
      ->check(CLI::IsMember({"one-stage", "two-stage", "one_stage", "two_stage"}));
  auto* lam = sub->add_option("--lambda", f.lambdas,
                              repeat_lambda ? "Lambda value (repeatable)"
                                            : "Lambda value");
  if (!repeat_lambda) lam->expected(1);
}

RunConfigFile resolve(const Flags& f, bool allow_many_lambdas) {
  RunConfigFile rc = f.config.empty() ? RunConfigFile{} : load_run_config(f.config);
  if (*f.seed_opt) rc.set_seed(f.seed);
  if (!f.out.empty()) rc.out_dir = f.out;
  if (!f.data_dir.empty()) rc.corpus_dir = f.data_dir;
  if (!f.mode.empty()) rc.train.mode = parse_train_mode(f.mode);
  if (!f.lambdas.empty()) {
    if (allow_many_lambdas) {
      rc.sweep.lambdas = f.lambdas;
    } else {
      rc.train.loss.lambda = f.lambdas.front();
    }
  }
  rc.validate();
  return rc;
}

struct Corpus {
  SplitDatasets data;
  SynonymLexicon lexicon;
};

Corpus obtain_corpus(const RunConfigFile& rc) {
  Corpus c;
  if (rc.corpus_dir.empty()) {
    c.data = generate_synthetic(rc.data);
    c.lexicon = SynonymLexicon::from_synth_config(rc.data);
    return c;
  }
  const fs::path dir(rc.corpus_dir);
  c.data.train = load_jsonl((dir / "train.jsonl").string());
  c.data.val = load_jsonl((dir / "val.jsonl").string());
  c.data.test = load_jsonl((dir / "test.jsonl").string());
  const fs::path lex = dir / "lexicon.json";
  c.lexicon = fs::exists(lex)
                  ? SynonymLexicon::load_json(lex.string(), c.data.train.vocab_size)
                  : SynonymLexicon::from_synth_config(rc.data);
  return c;
}

fs::path ensure_out(const RunConfigFile& rc) {
  fs::path dir(rc.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

int cmd_gen_data(const Flags& f, std::ostream& out) {
  const RunConfigFile rc = resolve(f, false);
  const fs::path dir = ensure_out(rc);
  const SplitDatasets d = generate_synthetic(rc.data);
  save_jsonl(d.train, (dir / "train.jsonl").string());
  save_jsonl(d.val, (dir / "val.jsonl").string());
  save_jsonl(d.test, (dir / "test.jsonl").string());
  SynonymLexicon::from_synth_config(rc.data).save_json((dir / "lexicon.json").string());
  write_json(dir / "config.json", run_config_to_json(rc));
  out << "seed " << rc.seed << ": wrote " << d.train.size() << "/"
      << d.val.size() << "/" << d.test.size()
      << " train/val/test examples to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_train(const Flags& f, std::ostream& out) {
  const RunConfigFile rc = resolve(f, false);
  const Corpus c = obtain_corpus(rc);
  const fs::path dir = ensure_out(rc);
  const TrainedModel model = train_model(c.data.train, c.data.val, rc.train, c.lexicon);
  const MetricsRecord val = evaluate(model, c.data.val);
  const MetricsRecord test = evaluate(model, c.data.test);
  save_model(model, rc.train, (dir / "model.json").string());
  nlohmann::ordered_json j;
  j["seed"] = rc.seed;
  j["mode"] = train_mode_name(rc.train.mode);
  j["epochs_ran"] = model.epochs_ran;
  j["encoder_checksum"] = model.encoder_checksum;
  j["val"] = metrics_to_json(val);
  j["test"] = metrics_to_json(test);
  j["config"] = run_config_to_json(rc);
  write_json(dir / "metrics.json", j);
  out << "seed " << rc.seed << " " << train_mode_name(rc.train.mode)
      << " lambda=" << format_double(rc.train.loss.lambda)
      << ": test f1=" << format_double(test.f1)
      << " delta_eo=" << format_double(test.delta_eo) << " ("
      << model.epochs_ran << " epochs)\n";
  return kExitOk;
}

int cmd_eval(const Flags& f, std::ostream& out) {
  const RunConfigFile rc = resolve(f, false);
  const Corpus c = obtain_corpus(rc);
  const std::string model_path =
      f.model.empty() ? (fs::path(rc.out_dir) / "model.json").string() : f.model;
  const TrainedModel model = load_model(model_path);
  const Split split = parse_split(f.split);
  const Dataset& data = split == Split::kTrain ? c.data.train
                        : split == Split::kVal ? c.data.val
                                               : c.data.test;
  nlohmann::ordered_json j;
  j["seed"] = rc.seed;
  j["split"] = split_name(split);
  j["metrics"] = metrics_to_json(evaluate(model, data));
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_sweep(const Flags& f, std::ostream& out) {
  const RunConfigFile rc = resolve(f, true);
  const Corpus c = obtain_corpus(rc);
  const fs::path dir = ensure_out(rc);
  SweepOptions opts;
  opts.threads = worker_threads();
  opts.record_time = f.record_time;
  const SweepResult r = run_sweep(c.data.train, c.data.val, c.data.test,
                                  rc.train, rc.sweep, c.lexicon, opts);
  write_sweep_csvs(r, (dir / "sweep_runs.csv").string(),
                   (dir / "sweep_aggregate.csv").string());
  out << "seed " << rc.seed << ": " << r.rows.size() - r.failed() << "/"
      << r.rows.size() << " runs succeeded\n";
  out << sweep_aggregate_header() << "\n";
  for (const auto& a : r.aggregates) out << sweep_aggregate_csv(a) << "\n";
  return r.failed() == 0 ? kExitOk : kExitFailure;
}

int cmd_verify_bounds(const Flags& f, std::ostream& out) {
  RunConfigFile rc = f.config.empty() ? RunConfigFile{} : load_run_config(f.config);
  if (!f.out.empty()) rc.out_dir = f.out;
  info::SuiteConfig sc;
  sc.seed = *f.seed_opt ? f.seed : sc.seed;
  if (*f.trials_opt) sc.trials = f.trials;
  sc.threads = worker_threads();
  const info::SuiteReport r = info::run_suite(sc);
  const fs::path dir = ensure_out(rc);
  nlohmann::ordered_json j;
  j["seed"] = sc.seed;
  j.update(info::suite_to_json(r));
  write_json(dir / "bounds_report.json", j);
  const std::size_t n = r.trials.size();
  out << "sandwich:       " << r.sandwich_passed << "/" << n << "\n"
      << "upper bound:    " << r.upper_passed << "/" << n << " ("
      << r.upper_infinite << " with infinite rhs)\n"
      << "mixture bound:  " << r.mixture_passed << "/" << n << "\n"
      << "cs-infonce:     " << r.cs_infonce_passed << "/" << n << "\n"
      << "kl variational: " << r.kl_passed << "/" << n << "\n"
      << r.passed << "/" << n << " passed\n";
  return r.all_passed() ? kExitOk : kExitFailure;
}

int cmd_grad_check(const Flags& f, std::ostream& out) {
  RunConfigFile rc = f.config.empty() ? RunConfigFile{} : load_run_config(f.config);
  if (!f.out.empty()) rc.out_dir = f.out;
  const std::uint64_t seed = *f.seed_opt ? f.seed : rc.seed;
  const std::size_t seeds = *f.trials_opt ? f.trials : 20;
  const GradAuditReport r = grad_audit(seeds, seed);
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["seeds"] = seeds;
  j.update(grad_audit_to_json(r));
  const fs::path dir = ensure_out(rc);
  write_json(dir / "grad_check.json", j);
  out << j.dump(2) << "\n";
  return r.pass() ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Fair contrastive text classification toolkit", "faircon"};
  app.require_subcommand(1, 1);
  Flags f;

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic corpus");
  auto* gen_seed = add_common(gen, f);

  auto* train = app.add_subcommand("train", "Train one model and write a checkpoint");
  auto* train_seed = add_common(train, f);
  add_training(train, f, false);

  auto* sweep = app.add_subcommand("sweep", "Train a grid of models");
  auto* sweep_seed = add_common(sweep, f);
  add_training(sweep, f, true);
  sweep->add_flag("--record-time", f.record_time,
                  "Fill the wall_seconds column (breaks byte-identical output)");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  auto* eval_seed = add_common(eval, f);
  eval->add_option("--data", f.data_dir, "Corpus directory written by gen-data");
  eval->add_option("--model", f.model, "Checkpoint path (default: <out>/model.json)");
  eval->add_option("--split", f.split, "train, val or test")
      ->check(CLI::IsMember({"train", "val", "test"}));

  auto* verify = app.add_subcommand("verify-bounds", "Check the information bounds");
  auto* verify_seed = add_common(verify, f);
  f.trials_opt = verify->add_option("--trials", f.trials, "Number of random trials");

  auto* grad = app.add_subcommand("grad-check", "Finite-difference gradient audit");
  auto* grad_seed = add_common(grad, f);
  auto* grad_trials =
      grad->add_option("--trials", f.trials, "Number of random seeds (default 20)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*gen) {
      f.seed_opt = gen_seed;
      return cmd_gen_data(f, out);
    }
    if (*train) {
      f.seed_opt = train_seed;
      return cmd_train(f, out);
    }
    if (*sweep) {
      f.seed_opt = sweep_seed;
      return cmd_sweep(f, out);
    }
    if (*eval) {
      f.seed_opt = eval_seed;
      return cmd_eval(f, out);
    }
    if (*verify) {
      f.seed_opt = verify_seed;
      return cmd_verify_bounds(f, out);
    }
    f.seed_opt = grad_seed;
    f.trials_opt = grad_trials;
    return cmd_grad_check(f, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace faircon
