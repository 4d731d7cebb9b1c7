// Copyright 2026 The compo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "compo/cli/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include <nlohmann/json.hpp>

#include "compo/bench.hpp"
#include "compo/cli/export.hpp"
#include "compo/errors.hpp"
#include "compo/policy/pipeline.hpp"

namespace compo {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_ + "': " + ec.message());
  }

  void text(const std::string& name, const std::string& body) {
    const std::string path = (fs::path(dir_) / name).string();
    write_text_file(path, body);
    paths_.push_back(path);
  }
  void csv(const std::string& name, const Table& table) { text(name, to_csv(table)); }

  const std::string& dir() const { return dir_; }
  std::vector<std::string>& paths() { return paths_; }

 private:
  std::string dir_;
  std::vector<std::string> paths_;
};

SyntheticObjective make_objective(const RunConfig& c) {
  if (c.objective == "quadratic") return make_sparse_quadratic(c.d, c.s, c.seed);
  if (c.objective == "nonconvex") return make_nonconvex_sparse(c.d, c.s, c.seed, c.alpha);
  return make_sparse_linear(c.d, c.s, c.seed);
}

ojson trajectory_summary(const Trajectory& t) {
  ojson out = ojson::object();
  out["iterations"] = t.records.size();
  out["oracle_calls"] = t.total_oracle_calls();
  out["skipped"] = t.skipped_count();
  out["initial_f"] = opt_json(t.initial_f);
  out["initial_grad_norm"] = opt_json(t.initial_grad_norm);
  out["final_f"] = t.records.empty() ? opt_json(t.initial_f) : opt_json(t.records.back().f);
  out["final_grad_norm"] = t.records.empty() ? opt_json(t.initial_grad_norm) : opt_json(t.records.back().grad_norm);
  out["best_grad_norm"] = opt_json(t.best_grad_norm());
  return out;
}

ojson run_basic_mode(const RunConfig& c, ArtifactWriter& w) {
  const SyntheticObjective f = make_objective(c);
  Rng rng(c.seed, /*stream=*/1);
  ParamVector theta0(f.point_with_gradient_norm(c.initial_grad_norm, rng));
  if (c.scope) theta0 = theta0.with_scope(ScopeMask(*c.scope, c.d));

  const double ell = c.ell.value_or(f.ell());
  double Delta = 0.0;
  if (c.Delta) {
    Delta = *c.Delta;
  } else if (std::isfinite(f.infimum())) {
    Delta = std::max(f.gap(theta0.values()), std::numeric_limits<double>::min());
  } else {
    throw ConfigError("objective '" + c.objective + "' is unbounded below; set 'Delta' explicitly");
  }
  const std::size_t dim = theta0.scope_dim();
  const TheoremSchedule sched = schedule_from_theorem(c.epsilon, c.Lambda, ell, Delta, std::min(c.s, dim), dim, c.c_m);

  const Diagnostics diag = f.diagnostics();
  RunOptions options;
  options.workers = c.workers;
  options.diagnostics = &diag;
  if (c.stop_at_epsilon) options.stop_below = c.epsilon;
  const RunResult run = run_basic(f.oracle(), theta0, sched, rng, options);
  w.csv("trajectory.csv", to_table(run.trajectory));

  ojson out = trajectory_summary(run.trajectory);
  out["schedule"] = {{"T", sched.T}, {"eta", sched.eta}, {"radius", sched.radius}, {"m", sched.m},
                     {"ell", sched.ell}, {"Delta", sched.Delta}, {"s", sched.s},   {"d", sched.d}};
  const auto calls = run.trajectory.calls_to_reach(c.epsilon);
  out["reached_epsilon"] = calls.has_value();
  out["calls_to_epsilon"] = calls ? ojson(*calls) : ojson(nullptr);
  return out;
}

ojson run_practical_mode(const RunConfig& c, ArtifactWriter& w) {
  const SyntheticObjective f = make_objective(c);
  Rng rng(c.seed, /*stream=*/1);
  const ParamVector theta0(f.point_with_gradient_norm(c.initial_grad_norm, rng));
  const Diagnostics diag = f.diagnostics();
  RunOptions options;
  options.workers = c.workers;
  options.diagnostics = &diag;
  const RunResult run = run_practical(f.oracle(), theta0, practical_config(c), options);
  w.csv("trajectory.csv", to_table(run.trajectory));
  return trajectory_summary(run.trajectory);
}

ojson run_pipeline_mode(const RunConfig& c, ArtifactWriter& w, std::vector<std::string>& warnings) {
  PolicyShape shape;
  shape.vocab_size = c.vocab_size;
  shape.features = c.features;
  shape.embedding_seed = c.seed;
  const ToyPolicy ref = ToyPolicy::random(shape, c.seed, c.policy_scale);

  PreferenceDataset data;
  if (c.dataset) {
    data = read_preference_jsonl(*c.dataset);
  } else {
    SyntheticDatasetSpec spec;
    spec.n_clean = c.n_clean;
    spec.n_noisy = c.n_noisy;
    spec.delta = c.delta;
    spec.seed = c.seed;
    data = make_synthetic_dataset(ref, spec);
    const std::string path = (fs::path(w.dir()) / "dataset.jsonl").string();
    write_preference_jsonl(data, path);
    w.paths().push_back(path);
  }

  PipelineConfig pc;
  pc.delta = c.delta;
  pc.dpo = DpoConfig{c.beta, c.dpo_learning_rate, c.dpo_epochs};
  pc.compo = practical_config(c);
  pc.compo.scope.reset();
  pc.compo_epochs = c.compo_epochs;
  pc.output_layer_only = c.output_layer_only;
  pc.lambda_quantile = c.lambda_quantile;
  RunOptions options;
  options.workers = c.workers;
  const PipelineResult res = run_pipeline(ref, data, pc, options);
  warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());

  w.csv("split_report.csv", to_table(res.split));
  w.csv("likelihood_report.csv", to_table(res.noisy_report));
  w.csv("trajectory.csv", to_table(res.trajectory));
  w.text("dpo_clean_policy.json", policy_to_json(res.dpo_clean));
  w.text("final_policy.json", policy_to_json(res.final_policy));

  std::size_t avoided = 0;
  for (const auto& r : res.noisy_report) avoided += r.displacement_avoided() ? 1 : 0;
  ojson out = trajectory_summary(res.trajectory);
  out["pairs"] = data.size();
  out["clean"] = res.split.clean.size();
  out["noisy"] = res.split.noisy.size();
  out["lambda"] = res.lambda;
  out["noisy_pairs_up_down"] = avoided;
  return out;
}

ojson run_lemma_mode(const RunConfig& c, ArtifactWriter& w, std::vector<CriterionResult>& criteria) {
  const SyntheticObjective f = make_sparse_quadratic(c.d, c.s, c.seed);
  Rng rng(c.seed, /*stream=*/1);
  const Vector theta = f.point_with_gradient_norm(c.initial_grad_norm, rng);
  const SignAgreementReport r = check_sign_agreement(f, theta, c.epsilon, c.samples, rng);
  w.csv("sign_agreement.csv", to_table(r));
  char detail[128];
  std::snprintf(detail, sizeof detail, "agreement %.4f (floor %.2f, %zu samples)", r.fraction, kLemmaAgreementFloor,
                r.samples);
  criteria.push_back({"sign_agreement", r.fraction >= kLemmaAgreementFloor, detail});
  return ojson{{"fraction", r.fraction}, {"std_error", r.std_error}, {"radius", r.radius}, {"grad_norm", r.grad_norm},
               {"samples", r.samples}};
}

ojson run_proposition_mode(const RunConfig& c, ArtifactWriter& w, std::vector<CriterionResult>& criteria) {
  Rng rng(c.seed, /*stream=*/2);
  const EstimatorErrorReport r = check_estimator_error(c.d, c.s, c.kept_probability, c.m, c.trials, rng);
  w.csv("estimator_error.csv", to_table(r));
  const std::size_t within = r.count_within(c.tau);
  const auto needed = static_cast<std::size_t>(std::ceil(kRecoveryFractionFloor * static_cast<double>(c.trials)));
  char detail[160];
  std::snprintf(detail, sizeof detail, "%zu/%zu trials with error <= %.3g (need %zu), m = %zu", within, c.trials, c.tau,
                needed, c.m);
  criteria.push_back({"one_bit_recovery", within >= needed, detail});
  return ojson{{"m", r.m},
               {"within_tau", within},
               {"mean_error", r.mean_error()},
               {"max_error", r.max_error()},
               {"implied_constant", r.implied_constant(c.tau)}};
}

ojson run_sweep_mode(const RunConfig& c, ArtifactWriter& w, std::vector<CriterionResult>& criteria) {
  SweepConfig sc;
  sc.dims = c.dims;
  sc.s = c.s;
  sc.epsilon = c.epsilon;
  sc.Lambda = c.Lambda;
  sc.c_m = c.c_m;
  sc.seeds = c.bench_seeds;
  sc.initial_grad_norm = c.initial_grad_norm;
  sc.workers = c.workers;
  const ScalingReport r = sweep_convergence(sc);
  w.csv("sweep_cells.csv", to_table(r));
  w.csv("sweep_rows.csv", scaling_rows_table(r));
  criteria.push_back({"sweep_converged", r.all_converged, r.all_converged ? "every cell reached epsilon"
                                                                           : "some cells were censored"});
  char detail[96];
  std::snprintf(detail, sizeof detail, "max consecutive ratio %.3f (ceiling %.1f)", r.max_ratio, kSweepRatioCeiling);
  criteria.push_back({"sweep_ratio", r.all_converged && r.max_ratio <= kSweepRatioCeiling, detail});
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"d", row.d}, {"mean_calls", row.mean_calls}, {"converged", row.converged}, {"runs", row.runs}});
  }
  return ojson{{"rows", rows}, {"max_ratio", r.max_ratio}, {"all_converged", r.all_converged}};
}

ojson criteria_json(const std::vector<CriterionResult>& criteria) {
  ojson out = ojson::array();
  for (const auto& k : criteria) out.push_back({{"name", k.name}, {"pass", k.pass}, {"detail", k.detail}});
  return out;
}

}  // namespace

std::optional<bool> RunManifest::pass() const {
  if (criteria.empty()) return std::nullopt;
  for (const auto& k : criteria) {
    if (!k.pass) return false;
  }
  return true;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest run_experiment(const RunConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.mode = to_string(config.mode);
  manifest.config_hash = config_hash(config);
  manifest.seed = config.seed;

  ArtifactWriter w(config.out_dir);
  w.text("config.json", config_to_json(config));

  ojson results;
  switch (config.mode) {
    case Mode::basic:
      results = run_basic_mode(config, w);
      break;
    case Mode::practical:
      results = run_practical_mode(config, w);
      break;
    case Mode::pipeline:
      results = run_pipeline_mode(config, w, manifest.warnings);
      break;
    case Mode::bench_lemma:
      results = run_lemma_mode(config, w, manifest.criteria);
      break;
    case Mode::bench_proposition:
      results = run_proposition_mode(config, w, manifest.criteria);
      break;
    case Mode::bench_sweep:
      results = run_sweep_mode(config, w, manifest.criteria);
      break;
  }

  const auto pass = manifest.pass();
  ojson summary = ojson::object();
  summary["mode"] = manifest.mode;
  summary["seed"] = config.seed;
  summary["pass"] = pass ? ojson(*pass) : ojson(nullptr);
  summary["criteria"] = criteria_json(manifest.criteria);
  summary["results"] = std::move(results);
  summary["warnings"] = manifest.warnings;
  w.text("summary.json", summary.dump(2) + "\n");

  manifest.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string manifest_path = (fs::path(w.dir()) / "manifest.json").string();
  manifest.artifacts = w.paths();
  manifest.artifacts.push_back(manifest_path);

  ojson doc = ojson::object();
  doc["mode"] = manifest.mode;
  doc["config_hash"] = manifest.config_hash;
  doc["seed"] = manifest.seed;
  doc["artifacts"] = manifest.artifacts;
  doc["wall_clock_seconds"] = manifest.wall_clock_seconds;
  doc["pass"] = pass ? ojson(*pass) : ojson(nullptr);
  doc["criteria"] = criteria_json(manifest.criteria);
  write_text_file(manifest_path, doc.dump(2) + "\n");
  return manifest;
}

}  // namespace compo
