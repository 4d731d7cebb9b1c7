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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compo/optimizer.hpp"

namespace compo {

enum class Mode { basic, practical, pipeline, bench_lemma, bench_proposition, bench_sweep };

/// "basic", "practical", "pipeline", "bench-lemma", "bench-proposition", "bench-sweep".
std::string to_string(Mode mode);
/// Throws ConfigError on an unknown name.
Mode parse_mode(const std::string& name);

/// Everything one run needs. Field names match the JSON keys.
struct RunConfig {
  Mode mode = Mode::basic;
  std::uint64_t seed = 0;
  std::string out_dir = "compo_out";
  std::optional<std::string> preset;
  std::size_t workers = 1;

  // Synthetic objective (basic, practical, bench modes).
  std::string objective = "quadratic";  // quadratic | nonconvex | linear
  std::size_t d = 200;
  std::size_t s = 5;
  double alpha = 3.0;
  double initial_grad_norm = 1.0;

  // Basic scheme schedule.
  double epsilon = 0.1;
  double Lambda = 0.1;
  std::optional<double> ell;    // defaults to the objective's constant
  std::optional<double> Delta;  // defaults to the exact gap at theta_1
  double c_m = 1.0;
  bool stop_at_epsilon = true;

  // Practical scheme.
  double gamma = 1.0;
  double radius = 1e-3;
  std::size_t m = 100;
  double lambda_g = 0.0;
  double lambda = 0.2;
  /// Pipeline only: replace lambda by this lower quantile of the noisy pairs' rho profile.
  std::optional<double> lambda_quantile;
  std::size_t T = 100;
  std::optional<std::vector<std::size_t>> scope;

  // Pipeline.
  std::optional<std::string> dataset;  // synthetic data when absent
  std::size_t n_clean = 50;
  std::size_t n_noisy = 10;
  double delta = 3.0;
  double beta = 0.1;
  double dpo_learning_rate = 1.0;
  std::size_t dpo_epochs = 1;
  std::size_t compo_epochs = 1;
  std::size_t pairs_per_iteration = 1;
  std::size_t vocab_size = 8;
  std::size_t features = 8;
  double policy_scale = 0.5;
  bool output_layer_only = true;

  // Bench modes.
  std::size_t samples = 100000;
  std::size_t trials = 100;
  double kept_probability = 0.8;
  double tau = 0.5;
  std::vector<std::size_t> dims{200, 400, 800};
  std::vector<std::uint64_t> bench_seeds{1, 2, 3};

  /// Where each field's value came from: "default", "default:<mode>",
  /// "preset:<name>", "config" or "cli". Not part of equality.
  std::map<std::string, std::string> provenance;

  /// Equal iff both serialize to the same JSON.
  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Command-line overrides, applied last.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> preset;
};

/// Default output directory: $COMPO_OUT_DIR if set and non-empty, else "compo_out".
std::string default_out_dir();

/// Parses the flat JSON layout. Layering: built-in defaults, mode defaults,
/// the config's preset, explicit fields, then `overrides` (a CLI preset
/// overwrites the explicit preset fields). Required: "mode" and "seed".
/// Throws MissingFieldError (naming every missing field), RangeError (with
/// bounds) or ConfigError (bad types, unknown keys).
RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides = {});
/// Reads `path` and parses it; IoError if unreadable.
RunConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Throws RangeError naming the field and its admissible range.
void validate(const RunConfig& config);

/// Every field, keys sorted; parse_config_text(config_to_json(c)) == c.
std::string config_to_json(const RunConfig& config);

/// Practical-scheme settings carried by the config.
PracticalConfig practical_config(const RunConfig& config);

}  // namespace compo
