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

#include "faircon/sweep.h"

#include <chrono>
#include <cmath>
#include <fstream>

namespace faircon {
namespace {

std::string augment_label(const AugmentStrategy& a) {
  return augment_kind_name(a.kind) + ":" + format_double(a.rate);
}

// Keeps free text inside one CSV field.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return s;
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool same_cell(const SweepAggregate& a, const SweepRow& r) {
  return a.mode == r.mode && a.lambda == r.lambda && a.gamma == r.gamma &&
         a.tau == r.tau && a.batch == r.batch && a.augment == r.augment;
}

}  // namespace

std::size_t SweepResult::failed() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += !r.ok;
  return n;
}

std::vector<SweepCell> expand_grid(const TrainConfig& base,
                                   const SweepGrid& grid) {
  const auto taus = grid.taus.empty() ? std::vector<double>{base.loss.tau} : grid.taus;
  const auto anchors = grid.anchors.empty()
                           ? std::vector<std::size_t>{base.anchors_per_batch}
                           : grid.anchors;
  const auto augments = grid.augments.empty()
                            ? std::vector<AugmentStrategy>{base.augment}
                            : grid.augments;
  const auto lambdas =
      grid.lambdas.empty() ? std::vector<double>{base.loss.lambda} : grid.lambdas;
  const auto seeds =
      grid.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : grid.seeds;

  std::vector<SweepCell> cells;
  for (double tau : taus) {
    for (std::size_t n : anchors) {
      for (const auto& aug : augments) {
        for (double lambda : lambdas) {
          for (std::uint64_t seed : seeds) {
            SweepCell c;
            c.index = cells.size();
            c.config = base;
            c.config.loss.tau = tau;
            c.config.anchors_per_batch = n;
            c.config.augment = aug;
            c.config.loss.lambda = lambda;
            c.config.seed = seed;
            cells.push_back(std::move(c));
          }
        }
      }
    }
  }
  return cells;
}

SweepResult run_sweep(const Dataset& train, const Dataset& val,
                      const Dataset& test, const TrainConfig& base,
                      const SweepGrid& grid, const SynonymLexicon& lexicon,
                      const SweepOptions& options) {
  const auto cells = expand_grid(base, grid);
  // Bad grid values are configuration errors, not cell failures.
  for (const auto& c : cells) c.config.validate();

  SweepResult result;
  result.rows.resize(cells.size());
  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    const SweepCell& cell = cells[i];
    const TrainConfig& cfg = cell.config;
    SweepRow& row = result.rows[i];
    row.mode = cfg.mode;
    row.lambda = cfg.loss.lambda;
    row.gamma = cfg.loss.gamma;
    row.tau = cfg.loss.tau;
    row.batch = 2 * cfg.anchors_per_batch;
    row.augment = augment_label(cfg.augment);
    row.seed = cfg.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (options.cell_hook) options.cell_hook(cell);
      const TrainedModel model = train_model(train, val, cfg, lexicon);
      row.metrics = evaluate(model, test);
      row.epochs_ran = model.epochs_ran;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = sanitize(e.what());
    }
    if (options.record_time) {
      row.wall_seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    }
  });
  result.aggregates = aggregate_rows(result.rows);
  return result;
}

std::vector<SweepAggregate> aggregate_rows(const std::vector<SweepRow>& rows) {
  std::vector<SweepAggregate> out;
  std::vector<std::vector<double>> f1s, eos;
  for (const auto& r : rows) {
    std::size_t k = 0;
    while (k < out.size() && !same_cell(out[k], r)) ++k;
    if (k == out.size()) {
      SweepAggregate a;
      a.mode = r.mode;
      a.lambda = r.lambda;
      a.gamma = r.gamma;
      a.tau = r.tau;
      a.batch = r.batch;
      a.augment = r.augment;
      out.push_back(a);
      f1s.emplace_back();
      eos.emplace_back();
    }
    if (r.ok) {
      ++out[k].runs;
      f1s[k].push_back(r.metrics.f1);
      eos[k].push_back(r.metrics.delta_eo);
    } else {
      ++out[k].failed;
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    mean_std(f1s[k], out[k].f1_mean, out[k].f1_std);
    mean_std(eos[k], out[k].delta_eo_mean, out[k].delta_eo_std);
  }
  return out;
}

std::string sweep_rows_header() {
  return "mode,lambda,gamma,tau,batch,augment,seed,f1,delta_tpr,delta_fpr,"
         "delta_eo,epochs_ran,wall_seconds,status,error";
}

std::string sweep_row_csv(const SweepRow& r) {
  std::string s = train_mode_name(r.mode) + "," + format_double(r.lambda) + "," +
                  format_double(r.gamma) + "," + format_double(r.tau) + "," +
                  std::to_string(r.batch) + "," + r.augment + "," +
                  std::to_string(r.seed) + ",";
  if (r.ok) {
    s += format_double(r.metrics.f1) + "," + format_double(r.metrics.delta_tpr) +
         "," + format_double(r.metrics.delta_fpr) + "," +
         format_double(r.metrics.delta_eo) + "," + std::to_string(r.epochs_ran);
  } else {
    s += ",,,,";
  }
  s += ",";
  if (r.wall_seconds) s += format_double(*r.wall_seconds);
  s += r.ok ? std::string(",ok,") : ",failed," + r.error;
  return s;
}

std::string sweep_aggregate_header() {
  return "mode,lambda,gamma,tau,batch,augment,runs,failed,f1_mean,f1_std,"
         "delta_eo_mean,delta_eo_std";
}

std::string sweep_aggregate_csv(const SweepAggregate& a) {
  std::string s = train_mode_name(a.mode) + "," + format_double(a.lambda) + "," +
                  format_double(a.gamma) + "," + format_double(a.tau) + "," +
                  std::to_string(a.batch) + "," + a.augment + "," +
                  std::to_string(a.runs) + "," + std::to_string(a.failed) + ",";
  if (a.runs == 0) return s + ",,,";
  return s + format_double(a.f1_mean) + "," + format_double(a.f1_std) + "," +
         format_double(a.delta_eo_mean) + "," + format_double(a.delta_eo_std);
}

void write_sweep_csvs(const SweepResult& result, const std::string& rows_path,
                      const std::string& aggregate_path) {
  {
    std::ofstream out(rows_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + rows_path + "'");
    out << sweep_rows_header() << '\n';
    for (const auto& r : result.rows) out << sweep_row_csv(r) << '\n';
  }
  std::ofstream out(aggregate_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + aggregate_path + "'");
  out << sweep_aggregate_header() << '\n';
  for (const auto& a : result.aggregates) out << sweep_aggregate_csv(a) << '\n';
}

}  // namespace faircon
