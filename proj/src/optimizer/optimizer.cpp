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

#include <algorithm>
#include <cmath>
#include <string>

#include "compo/errors.hpp"
#include "compo/optimizer.hpp"
#include "compo/sparse_grad.hpp"

namespace compo {
namespace {

void attach_diagnostics(IterationRecord& rec, const ParamVector& theta, const RunOptions& options) {
  if (options.diagnostics == nullptr) return;
  if (options.diagnostics->value) rec.f = options.diagnostics->value(theta.values());
  if (options.diagnostics->gradient) rec.grad_norm = options.diagnostics->gradient(theta.values()).norm();
}

std::optional<double> initial_grad_norm(const ParamVector& theta, const RunOptions& options) {
  if (options.diagnostics == nullptr || !options.diagnostics->gradient) return std::nullopt;
  return options.diagnostics->gradient(theta.values()).norm();
}

bool reached(const std::optional<double>& grad_norm, const RunOptions& options) {
  return options.stop_below && grad_norm && *grad_norm < *options.stop_below;
}

}  // namespace

std::size_t Trajectory::total_oracle_calls() const {
  std::size_t total = 0;
  for (const auto& r : records) total += r.oracle_calls;
  return total;
}

std::size_t Trajectory::skipped_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const IterationRecord& r) { return r.skipped; }));
}

std::optional<double> Trajectory::best_grad_norm() const {
  std::optional<double> best = initial_grad_norm;
  for (const auto& r : records) {
    if (r.grad_norm && (!best || *r.grad_norm < *best)) best = r.grad_norm;
  }
  return best;
}

std::optional<std::size_t> Trajectory::calls_to_reach(double threshold) const {
  if (initial_grad_norm && *initial_grad_norm < threshold) return 0;
  std::size_t calls = 0;
  for (const auto& r : records) {
    calls += r.oracle_calls;
    if (r.grad_norm && *r.grad_norm < threshold) return calls;
  }
  return std::nullopt;
}

RunResult run_basic(const ComparisonOracle& oracle, const ParamVector& theta0, const TheoremSchedule& schedule,
                    Rng& rng, const RunOptions& options) {
  if (schedule.d != theta0.scope_dim()) {
    throw ShapeError("schedule built for dimension " + std::to_string(schedule.d) + " but the perturbation scope has " +
                     std::to_string(theta0.scope_dim()));
  }
  RunResult out{theta0, {}};
  Trajectory& traj = out.trajectory;
  traj.initial_hash = theta0.hash();
  traj.initial_f = options.diagnostics && options.diagnostics->value
                       ? std::optional<double>(options.diagnostics->value(theta0.values()))
                       : std::nullopt;
  traj.initial_grad_norm = initial_grad_norm(theta0, options);
  if (options.keep_snapshots) traj.snapshots.push_back(theta0.values());
  if (reached(traj.initial_grad_norm, options)) return out;

  const MeasureOptions measure{options.workers};
  for (std::size_t t = 1; t <= schedule.T; ++t) {
    IterationRecord rec;
    rec.iteration = t;
    BitMeasurementBatch bits;
    try {
      bits = measure_bits(oracle, out.theta, schedule.radius, schedule.m, rng, measure);
    } catch (const Error& e) {
      throw OracleFailure("iteration " + std::to_string(t) + ": " + e.what());
    }
    rec.oracle_calls = bits.oracle_calls;
    rec.negative_fraction = bits.negative_fraction();
    try {
      const GradientEstimate g = solve_1bge_exact(bits, schedule.s);
      out.theta = out.theta.shifted(-schedule.eta * g.direction);
      rec.step = schedule.eta;
    } catch (const DegenerateMeasurement&) {
      rec.degenerate = true;
      rec.skipped = true;
    }
    rec.theta_hash = out.theta.hash();
    attach_diagnostics(rec, out.theta, options);
    if (options.keep_snapshots) traj.snapshots.push_back(out.theta.values());
    const bool done = reached(rec.grad_norm, options);
    traj.records.push_back(std::move(rec));
    if (done) break;
  }
  return out;
}

void PracticalConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("practical config: " + what); };
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("gamma must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) fail("radius must be positive");
  if (m < 1) fail("m must be at least 1");
  if (!(lambda_g >= 0.0) || !std::isfinite(lambda_g)) fail("lambda_g must be non-negative");
  if (!(lambda >= 0.0 && lambda < 1.0)) fail("lambda must lie in [0, 1)");
  if (T < 1) fail("T must be at least 1");
  if (pairs_per_iteration < 1) fail("pairs_per_iteration must be at least 1");
}

PracticalConfig practical_preset(const std::string& name) {
  PracticalConfig c;
  c.lambda = 0.2;
  if (name == "mistral-7b") {
    c.radius = 0.0005;
    c.m = 1600;
    c.lambda_g = 0.00022;
  } else if (name == "llama-3-8b" || name == "gemma-2-9b") {
    c.radius = 0.00075;
    c.m = 1800;
    c.lambda_g = 0.00008;
  } else {
    throw ConfigError("unknown preset '" + name + "' (known: mistral-7b, llama-3-8b, gemma-2-9b)");
  }
  return c;
}

IterationRecord step_practical(PracticalState& state, const ComparisonOracle& oracle, const PracticalConfig& config,
                               Rng& rng, const RunOptions& options) {
  IterationRecord rec;
  rec.iteration = ++state.iteration;
  BitMeasurementBatch bits;
  try {
    bits = measure_bits(oracle, state.theta, config.radius, config.m, rng, MeasureOptions{options.workers});
  } catch (const Error& e) {
    throw OracleFailure("iteration " + std::to_string(rec.iteration) + ": " + e.what());
  }
  rec.oracle_calls = bits.oracle_calls;
  rec.negative_fraction = bits.negative_fraction();

  if (rec.negative_fraction > config.lambda) {
    try {
      const GradientEstimate g = estimate_normalized_clip(bits, config.lambda_g);
      rec.step = config.gamma * rec.negative_fraction;
      state.theta = state.theta.shifted(-rec.step * g.direction);
    } catch (const DegenerateMeasurement&) {
      rec.degenerate = true;
      rec.skipped = true;
    }
  } else {
    rec.skipped = true;
  }
  rec.theta_hash = state.theta.hash();
  attach_diagnostics(rec, state.theta, options);
  return rec;
}

RunResult run_practical(const OracleProvider& oracles, const ParamVector& theta0, const PracticalConfig& config,
                        const RunOptions& options) {
  config.validate();
  PracticalState state{config.scope ? theta0.with_scope(config.scope) : theta0, 0};
  Rng rng(config.seed);

  Trajectory traj;
  traj.initial_hash = state.theta.hash();
  traj.initial_f = options.diagnostics && options.diagnostics->value
                       ? std::optional<double>(options.diagnostics->value(state.theta.values()))
                       : std::nullopt;
  traj.initial_grad_norm = initial_grad_norm(state.theta, options);
  if (options.keep_snapshots) traj.snapshots.push_back(state.theta.values());

  if (!reached(traj.initial_grad_norm, options)) {
    for (std::size_t t = 0; t < config.T; ++t) {
      IterationRecord rec = step_practical(state, oracles(t), config, rng, options);
      if (options.keep_snapshots) traj.snapshots.push_back(state.theta.values());
      const bool done = reached(rec.grad_norm, options);
      traj.records.push_back(std::move(rec));
      if (done) break;
    }
  }
  return RunResult{std::move(state.theta), std::move(traj)};
}

RunResult run_practical(const ComparisonOracle& oracle, const ParamVector& theta0, const PracticalConfig& config,
                        const RunOptions& options) {
  return run_practical([&oracle](std::size_t) { return oracle; }, theta0, config, options);
}

}  // namespace compo
