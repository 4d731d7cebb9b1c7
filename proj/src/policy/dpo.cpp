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

#include "compo/policy/dpo.hpp"

#include <cmath>

#include "compo/errors.hpp"

namespace compo {
namespace {

// -log sigmoid(x), without overflow for large |x|.
double neg_log_sigmoid(double x) {
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
}

}  // namespace

double dpo_margin(const ToyPolicy& policy, const ToyPolicy& ref, const PreferencePair& pair) {
  const double pos = policy.log_likelihood(pair.prompt, pair.preferred) - ref.log_likelihood(pair.prompt, pair.preferred);
  const double neg =
      policy.log_likelihood(pair.prompt, pair.dispreferred) - ref.log_likelihood(pair.prompt, pair.dispreferred);
  return pos - neg;
}

double dpo_loss(const ToyPolicy& policy, const ToyPolicy& ref, std::span<const PreferencePair> batch, double beta) {
  check_beta(beta);
  if (batch.empty()) throw InvalidBatch("DPO batch is empty");
  double total = 0.0;
  for (const auto& pair : batch) total += neg_log_sigmoid(beta * dpo_margin(policy, ref, pair));
  return total / static_cast<double>(batch.size());
}

Vector dpo_grad(const ToyPolicy& policy, const ToyPolicy& ref, std::span<const PreferencePair> batch, double beta) {
  check_beta(beta);
  if (batch.empty()) throw InvalidBatch("DPO batch is empty");
  Vector grad = Vector::Zero(policy.params().size());
  for (const auto& pair : batch) {
    const double weight = -sigmoid(-beta * dpo_margin(policy, ref, pair)) * beta;
    grad += weight * (policy.grad_log_likelihood(pair.prompt, pair.preferred) -
                      policy.grad_log_likelihood(pair.prompt, pair.dispreferred));
  }
  return grad / static_cast<double>(batch.size());
}

ToyPolicy train_dpo(const ToyPolicy& policy, const ToyPolicy& ref, std::span<const PreferencePair> dataset,
                    const DpoConfig& config, std::vector<double>* loss_history) {
  check_beta(config.beta);
  if (dataset.empty()) throw InvalidBatch("DPO dataset is empty");
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  ToyPolicy current = policy;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (loss_history) loss_history->push_back(dpo_loss(current, ref, dataset, config.beta));
    current = current.with_params(current.params() - config.learning_rate * dpo_grad(current, ref, dataset, config.beta));
  }
  if (loss_history) loss_history->push_back(dpo_loss(current, ref, dataset, config.beta));
  return current;
}

}  // namespace compo
