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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "compo/bench.hpp"
#include "compo/optimizer.hpp"
#include "compo/policy/pipeline.hpp"
#include "compo/policy/toy_policy.hpp"

namespace compo {

enum class ExportFormat { csv, json };

/// Empty, integer, real, boolean or text.
using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

/// Column-named rows; the common shape of every exported report.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

/// iter, oracle_calls, neg_fraction, step, skipped, f, grad_norm (one row per
/// iteration; f and grad_norm empty without diagnostics).
Table to_table(const Trajectory& trajectory);
/// index, subset, ref_margin (rows in dataset order).
Table to_table(const SplitDataset& split);
/// pair_index, before_preferred, before_dispreferred, after_preferred,
/// after_dispreferred, delta_preferred, delta_dispreferred.
Table to_table(std::span<const LikelihoodRow> rows);
/// d, seed, m, T, iterations, calls, best_grad_norm (calls empty when censored).
Table to_table(const ScalingReport& report);
/// d, mean_calls, converged, runs.
Table scaling_rows_table(const ScalingReport& report);
/// trial, error.
Table to_table(const EstimatorErrorReport& report);
/// samples, radius, grad_norm, fraction, std_error.
Table to_table(const SignAgreementReport& report);

/// RFC 4180 CSV with a header line; reals printed with %.17g, booleans as 0/1.
std::string to_csv(const Table& table);
/// {"columns": [...], "rows": [{column: value, ...}, ...]}; empty cells become null.
std::string to_json(const Table& table);
/// Inverse of to_json. Throws ConfigError on malformed input.
Table table_from_json(const std::string& text);

/// Writes `table` to `path`; IoError names the path on failure.
void export_results(const Table& table, const std::string& path, ExportFormat format);

/// {"shape": {...}, "params": [...]}.
std::string policy_to_json(const ToyPolicy& policy);
ToyPolicy policy_from_json(const std::string& text);

/// Writes `text` to `path` verbatim; IoError on failure.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace compo
