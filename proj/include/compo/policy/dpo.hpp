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
#include <span>
#include <vector>

#include "compo/policy/preference.hpp"
#include "compo/policy/toy_policy.hpp"

namespace compo {

struct DpoConfig {
  double beta = 0.1;
  double learning_rate = 1.0;
  /// Full-batch gradient steps.
  std::size_t epochs = 1;

  friend bool operator==(const DpoConfig&, const DpoConfig&) = default;
};

/// Implicit reward margin h = [log pi(y+) - log pi_ref(y+)] - [log pi(y-) - log pi_ref(y-)].
double dpo_margin(const ToyPolicy& policy, const ToyPolicy& ref, const PreferencePair& pair);

/// mean over the batch of -log sigmoid(beta * h). Throws InvalidBatch when empty.
double dpo_loss(const ToyPolicy& policy, const ToyPolicy& ref, std::span<const PreferencePair> batch, double beta);

/// Gradient of dpo_loss with respect to policy.params():
/// mean of -sigmoid(-beta h) * beta * (grad log pi(y+) - grad log pi(y-)).
Vector dpo_grad(const ToyPolicy& policy, const ToyPolicy& ref, std::span<const PreferencePair> batch, double beta);

/// Plain full-batch gradient descent on dpo_loss. If `loss_history` is given it
/// receives the loss before each step and after the last one.
ToyPolicy train_dpo(const ToyPolicy& policy, const ToyPolicy& ref, std::span<const PreferencePair> dataset,
                    const DpoConfig& config, std::vector<double>* loss_history = nullptr);

}  // namespace compo
