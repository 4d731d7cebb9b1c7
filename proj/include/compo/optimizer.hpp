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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "compo/core/param_vector.hpp"
#include "compo/core/rng.hpp"
#include "compo/oracles.hpp"

namespace compo {

/// Parameters of the basic scheme derived from (epsilon, Lambda, ell, Delta, s, d, c_m):
///   T   = ceil(10 ell Delta / epsilon^2)
///   eta = sqrt(2 Delta / (ell T))
///   r   = epsilon / (40 ell sqrt(d))
///   m   = ceil(c_m (s log(2d/s) + log(ell Delta / (Lambda epsilon^2))))
struct TheoremSchedule {
  double epsilon = 0.0;
  double Lambda = 0.0;
  double ell = 0.0;
  double Delta = 0.0;
  std::size_t s = 0;
  std::size_t d = 0;
  double c_m = 1.0;

  std::size_t T = 0;
  double eta = 0.0;
  double radius = 0.0;
  std::size_t m = 0;
};

/// Throws InvalidSchedule unless epsilon, Lambda in (0,1), ell, Delta, c_m > 0 and 1 <= s <= d.
TheoremSchedule schedule_from_theorem(double epsilon, double Lambda, double ell, double Delta, std::size_t s,
                                      std::size_t d, double c_m = 1.0);

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t oracle_calls = 0;
  double negative_fraction = 0.0;
  /// Length multiplier applied to the estimate (eta, or gamma * rho); 0 when skipped.
  double step = 0.0;
  bool skipped = false;
  /// The signed direction sum was exactly zero.
  bool degenerate = false;
  /// Hash of theta after this iteration.
  std::uint64_t theta_hash = 0;
  /// Objective value and gradient norm at theta after this iteration (synthetic objectives only).
  std::optional<double> f;
  std::optional<double> grad_norm;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

class Trajectory {
 public:
  std::uint64_t initial_hash = 0;
  std::optional<double> initial_f;
  std::optional<double> initial_grad_norm;
  std::vector<IterationRecord> records;
  /// Filled only when snapshots are requested; snapshots[0] is theta_1.
  std::vector<Vector> snapshots;

  std::size_t total_oracle_calls() const;
  std::size_t skipped_count() const;
  /// min_t ||grad f(theta_t)|| over the initial point and every record carrying diagnostics.
  std::optional<double> best_grad_norm() const;
  /// Cumulative oracle calls spent before the first iterate with grad_norm < threshold.
  std::optional<std::size_t> calls_to_reach(double threshold) const;
};

/// Objective value and gradient of a synthetic test function, used only for telemetry.
struct Diagnostics {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

struct RunOptions {
  std::size_t workers = 1;
  const Diagnostics* diagnostics = nullptr;
  /// Stop once the diagnosed gradient norm at theta_t is below this value.
  std::optional<double> stop_below;
  bool keep_snapshots = false;
};

struct RunResult {
  ParamVector theta;
  Trajectory trajectory;
};

/// Basic scheme: T rounds of m sphere directions -> oracle signs -> exact
/// sparse estimate -> theta <- theta - eta * g. Works in theta0's scope and
/// requires schedule.d == theta0.scope_dim(). A round whose signed sum is zero
/// leaves theta unchanged and is flagged degenerate.
RunResult run_basic(const ComparisonOracle& oracle, const ParamVector& theta0, const TheoremSchedule& schedule,
                    Rng& rng, const RunOptions& options = {});

struct PracticalConfig {
  double gamma = 1.0;
  double radius = 1e-3;
  std::size_t m = 100;
  double lambda_g = 0.0;
  /// Skip threshold: a step is taken only if rho > lambda.
  double lambda = 0.2;
  std::size_t T = 1;
  std::optional<ScopeMask> scope;
  std::uint64_t seed = 0;
  /// Preference pairs bound to each iteration's oracle when driven by a dataset.
  std::size_t pairs_per_iteration = 1;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;

  friend bool operator==(const PracticalConfig&, const PracticalConfig&) = default;
};

/// Operating points reported for 7B-9B models: "mistral-7b", "llama-3-8b", "gemma-2-9b".
/// Fills radius, m, lambda_g and lambda; throws ConfigError for unknown names.
PracticalConfig practical_preset(const std::string& name);

struct PracticalState {
  ParamVector theta;
  std::size_t iteration = 0;
};

/// One practical-scheme round in theta's scope: measure m bits, estimate with
/// normalize-then-clip, and move theta[S] by -gamma * rho * g when rho > lambda.
/// Otherwise (and on a zero signed sum) theta is left untouched.
IterationRecord step_practical(PracticalState& state, const ComparisonOracle& oracle, const PracticalConfig& config,
                               Rng& rng, const RunOptions& options = {});

/// Oracle for iteration t (e.g. bound to the t-th preference batch).
using OracleProvider = std::function<ComparisonOracle(std::size_t iteration)>;

/// Runs config.T practical rounds starting from theta0 restricted to config.scope
/// (theta0's own scope if config.scope is empty), seeded by config.seed.
RunResult run_practical(const OracleProvider& oracles, const ParamVector& theta0, const PracticalConfig& config,
                        const RunOptions& options = {});
RunResult run_practical(const ComparisonOracle& oracle, const ParamVector& theta0, const PracticalConfig& config,
                        const RunOptions& options = {});

}  // namespace compo
