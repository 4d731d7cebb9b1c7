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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "compo/cli/config.hpp"

namespace compo {

/// Bench thresholds checked by the bench modes.
inline constexpr double kLemmaAgreementFloor = 0.69;
inline constexpr double kRecoveryFractionFloor = 0.95;
inline constexpr double kSweepRatioCeiling = 2.0;

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunManifest {
  std::string mode;
  /// FNV-1a of config_to_json, as 16 hex digits.
  std::string config_hash;
  std::uint64_t seed = 0;
  /// Paths of every file written, the manifest itself last.
  std::vector<std::string> artifacts;
  double wall_clock_seconds = 0.0;
  std::vector<CriterionResult> criteria;
  std::vector<std::string> warnings;

  /// Conjunction of the criteria; empty for modes without assertions.
  std::optional<bool> pass() const;
  /// 1 iff some criterion failed.
  int exit_code() const { return pass().value_or(true) ? 0 : 1; }
};

std::string config_hash(const RunConfig& config);

/// Creates config.out_dir, runs the selected mode and writes its artifacts,
/// config.json, summary.json and manifest.json there.
RunManifest run_experiment(const RunConfig& config);

}  // namespace compo
