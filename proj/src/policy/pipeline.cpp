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

#include "compo/policy/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "compo/errors.hpp"

namespace compo {

SplitDataset split_by_margin(const ToyPolicy& ref, const PreferenceDataset& dataset, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("margin threshold delta must be positive");
  SplitDataset out;
  out.delta = delta;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    PreferencePair pair = dataset[i];
    const double margin =
        ref.log_likelihood(pair.prompt, pair.preferred) - ref.log_likelihood(pair.prompt, pair.dispreferred);
    pair.ref_margin = margin;
    if (std::abs(margin) <= delta) {
      out.noisy.push_back(std::move(pair));
      out.noisy_indices.push_back(i);
    } else {
      out.clean.push_back(std::move(pair));
      out.clean_indices.push_back(i);
    }
  }
  return out;
}

std::vector<LikelihoodRow> likelihood_report(const ToyPolicy& before, const ToyPolicy& after,
                                             std::span<const PreferencePair> pairs) {
  std::vector<LikelihoodRow> rows;
  rows.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    rows.push_back({i, before.log_likelihood(p.prompt, p.preferred), before.log_likelihood(p.prompt, p.dispreferred),
                    after.log_likelihood(p.prompt, p.preferred), after.log_likelihood(p.prompt, p.dispreferred)});
  }
  return rows;
}

PipelineResult run_pipeline(const ToyPolicy& ref, const PreferenceDataset& dataset, const PipelineConfig& config,
                            const RunOptions& options) {
  PipelineResult out{split_by_margin(ref, dataset, config.delta), ref, ref, {}, {}, config.compo.lambda, {}};

  if (out.split.clean.empty()) {
    out.warnings.push_back("clean subset is empty; DPO stage skipped");
  } else {
    out.dpo_clean = train_dpo(ref, ref, out.split.clean, config.dpo);
  }
  out.final_policy = out.dpo_clean;

  if (out.split.noisy.empty()) {
    out.warnings.push_back("noisy subset is empty; comparison-oracle stage skipped");
    return out;
  }

  const std::size_t per_batch = std::max<std::size_t>(1, config.compo.pairs_per_iteration);
  const std::size_t n_noisy = out.split.noisy.size();
  const std::size_t batches = (n_noisy + per_batch - 1) / per_batch;

  PracticalConfig compo = config.compo;
  compo.T = config.compo_epochs * batches;
  if (compo.T == 0) {
    out.warnings.push_back("compo_epochs is zero; comparison-oracle stage skipped");
    return out;
  }
  compo.scope = config.output_layer_only ? std::optional<ScopeMask>(ref.output_layer_scope())
                                         : std::optional<ScopeMask>(ScopeMask::range(0, ref.num_params(), ref.num_params()));
  if (config.lambda_quantile) {
    compo.lambda = tail_threshold(negative_fraction_profile(out.dpo_clean, out.split.noisy, compo, options),
                                  *config.lambda_quantile);
  }
  out.lambda = compo.lambda;

  std::vector<PreferenceDataset> bound(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const auto first = out.split.noisy.begin() + static_cast<std::ptrdiff_t>(b * per_batch);
    const auto last = out.split.noisy.begin() + static_cast<std::ptrdiff_t>(std::min(n_noisy, (b + 1) * per_batch));
    bound[b].assign(first, last);
  }
  const LikelihoodEvaluator evaluator = make_likelihood_evaluator(out.dpo_clean);
  OracleProvider provider = [&](std::size_t t) { return make_preference_oracle(evaluator, bound[t % batches]); };

  RunResult run = run_practical(provider, ParamVector(out.dpo_clean.params()), compo, options);
  out.final_policy = out.dpo_clean.with_params(run.theta.values());
  out.trajectory = std::move(run.trajectory);
  out.noisy_report = likelihood_report(out.dpo_clean, out.final_policy, out.split.noisy);
  return out;
}

std::vector<double> negative_fraction_profile(const ToyPolicy& policy, std::span<const PreferencePair> pairs,
                                              const PracticalConfig& config, const RunOptions& options) {
  config.validate();
  const ParamVector theta(policy.params(), config.scope ? config.scope : std::optional(policy.output_layer_scope()));
  const LikelihoodEvaluator evaluator = make_likelihood_evaluator(policy);
  const Rng base(config.seed, /*stream=*/0x9F0F);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Rng rng = base.substream(i);
    const auto oracle = make_preference_oracle(evaluator, PreferenceDataset{pairs[i]});
    out.push_back(measure_bits(oracle, theta, config.radius, config.m, rng, {options.workers}).negative_fraction());
  }
  return out;
}

double tail_threshold(std::vector<double> profile, double q) {
  if (profile.empty()) throw InvalidArgument("skip-rule profile is empty");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile must lie in [0, 1]");
  std::sort(profile.begin(), profile.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(profile.size())));
  return profile[rank == 0 ? 0 : rank - 1];
}

PreferenceDataset make_synthetic_dataset(const ToyPolicy& ref, const SyntheticDatasetSpec& spec) {
  if (!(spec.delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (spec.prompt_length == 0 || spec.response_length == 0) throw InvalidArgument("sequence lengths must be positive");

  const auto vocab = ref.shape().vocab_size;
  const ToyPolicy target = ToyPolicy::random(ref.shape(), spec.seed ^ 0x7A67E7ULL, 1.0);
  Rng rng(spec.seed, /*stream=*/0xDA7A);
  auto draw = [&](std::size_t n) {
    TokenSequence seq(n);
    for (auto& t : seq) t = static_cast<int>(rng.next_u64() % vocab);
    return seq;
  };

  PreferenceDataset out;
  std::size_t clean = 0;
  std::size_t noisy = 0;
  for (std::size_t attempt = 0; attempt < spec.max_attempts && (clean < spec.n_clean || noisy < spec.n_noisy);
       ++attempt) {
    PreferencePair pair{draw(spec.prompt_length), draw(spec.response_length), draw(spec.response_length), {}};
    if (pair.preferred == pair.dispreferred) continue;
    if (target.log_likelihood(pair.prompt, pair.preferred) < target.log_likelihood(pair.prompt, pair.dispreferred)) {
      std::swap(pair.preferred, pair.dispreferred);
    }
    const double margin =
        ref.log_likelihood(pair.prompt, pair.preferred) - ref.log_likelihood(pair.prompt, pair.dispreferred);
    const bool is_noisy = std::abs(margin) <= spec.delta;
    if (is_noisy && noisy < spec.n_noisy) {
      ++noisy;
      out.push_back(std::move(pair));
    } else if (!is_noisy && clean < spec.n_clean) {
      ++clean;
      out.push_back(std::move(pair));
    }
  }
  if (clean < spec.n_clean || noisy < spec.n_noisy) {
    throw InvalidArgument("could not fill synthetic dataset quotas (clean " + std::to_string(clean) + "/" +
                          std::to_string(spec.n_clean) + ", noisy " + std::to_string(noisy) + "/" +
                          std::to_string(spec.n_noisy) + ")");
  }
  return out;
}

}  // namespace compo
