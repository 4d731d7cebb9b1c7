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
#include <span>
#include <string>
#include <vector>

#include "compo/optimizer.hpp"
#include "compo/policy/dpo.hpp"
#include "compo/policy/preference.hpp"
#include "compo/policy/toy_policy.hpp"

namespace compo {

struct SplitDataset {
  PreferenceDataset clean;
  PreferenceDataset noisy;
  /// Positions of each subset's pairs in the input dataset.
  std::vector<std::size_t> clean_indices;
  std::vector<std::size_t> noisy_indices;
  double delta = 0.0;
};

/// A pair is noisy iff |log pi_ref(y+|x) - log pi_ref(y-|x)| <= delta (boundary
/// included). Every output pair carries its ref_margin. Throws InvalidArgument
/// unless delta > 0.
SplitDataset split_by_margin(const ToyPolicy& ref, const PreferenceDataset& dataset, double delta);

struct LikelihoodRow {
  std::size_t pair_index = 0;
  double before_preferred = 0.0;
  double before_dispreferred = 0.0;
  double after_preferred = 0.0;
  double after_dispreferred = 0.0;

  double delta_preferred() const { return after_preferred - before_preferred; }
  double delta_dispreferred() const { return after_dispreferred - before_dispreferred; }
  /// Preferred likelihood went up and dispreferred went down.
  bool displacement_avoided() const { return delta_preferred() > 0.0 && delta_dispreferred() < 0.0; }
};

std::vector<LikelihoodRow> likelihood_report(const ToyPolicy& before, const ToyPolicy& after,
                                             std::span<const PreferencePair> pairs);

struct PipelineConfig {
  double delta = 3.0;
  DpoConfig dpo;
  /// Practical-scheme settings; T is derived from compo_epochs and the noisy-set size.
  PracticalConfig compo;
  std::size_t compo_epochs = 1;
  /// Perturb only the output layer (otherwise every parameter).
  bool output_layer_only = true;
  /// When set, compo.lambda is replaced by tail_threshold of the noisy pairs'
  /// rho profile at the DPO_clean policy.
  std::optional<double> lambda_quantile;
};

struct PipelineResult {
  SplitDataset split;
  ToyPolicy dpo_clean;
  ToyPolicy final_policy;
  Trajectory trajectory;
  /// Per noisy pair, DPO_clean vs final policy.
  std::vector<LikelihoodRow> noisy_report;
  /// Skip threshold actually used by the comparison-oracle stage.
  double lambda = 0.0;
  std::vector<std::string> warnings;
};

/// Split by reference margin, DPO on the clean subset starting from `ref`,
/// then the practical scheme on the noisy subset starting from the DPO result.
/// Iteration t binds the oracle to noisy batch (t mod batches), so one epoch is
/// one pass. An empty subset skips its stage and adds a warning.
PipelineResult run_pipeline(const ToyPolicy& ref, const PreferenceDataset& dataset, const PipelineConfig& config,
                            const RunOptions& options = {});

/// Fraction of -1 answers from one measurement round per pair (no update), at
/// `policy` with config's radius, m, scope (output layer when empty) and seed.
/// Pair i uses an independent substream.
std::vector<double> negative_fraction_profile(const ToyPolicy& policy, std::span<const PreferencePair> pairs,
                                              const PracticalConfig& config, const RunOptions& options = {});

/// Lower q-quantile (nearest rank) of a skip-rule profile; a step is then taken
/// for every pair above the excluded tail. Throws InvalidArgument on an empty
/// profile or q outside [0, 1].
double tail_threshold(std::vector<double> profile, double q);

struct SyntheticDatasetSpec {
  std::size_t n_clean = 50;
  std::size_t n_noisy = 10;
  double delta = 3.0;
  std::size_t prompt_length = 3;
  std::size_t response_length = 4;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 1'000'000;
};

/// Random pairs sorted into clean/noisy quotas by their margin under `ref`.
/// Which response is preferred is decided by a hidden random target policy,
/// so labels are consistent but unrelated to the reference margin.
/// Throws InvalidArgument if the quotas cannot be filled within max_attempts.
PreferenceDataset make_synthetic_dataset(const ToyPolicy& ref, const SyntheticDatasetSpec& spec);

}  // namespace compo
