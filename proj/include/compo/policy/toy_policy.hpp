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

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

#include "compo/core/param_vector.hpp"
#include "compo/oracles.hpp"

namespace compo {

struct PolicyShape {
  std::size_t vocab_size = 8;
  /// Feature width F; the last feature is a constant 1.
  std::size_t features = 8;
  /// Longest prompt + response accepted.
  std::size_t max_context = 64;
  /// Recency weight of the context embedding.
  double decay = 0.5;
  std::uint64_t embedding_seed = 0;

  friend bool operator==(const PolicyShape&, const PolicyShape&) = default;
};

/// Small auto-regressive softmax policy.
///
/// A frozen random token embedding turns the context (prompt followed by the
/// response prefix) into features phi = [tanh(sum_j decay^(L-1-j) E[t_j]); 1].
/// Two trainable blocks follow: a residual adapter h = phi + tanh(U phi)
/// (F x F) and the output layer logits = W h (V x F). Parameters are laid out
/// as [U row-major; W row-major], so the output layer is the trailing V*F block.
class ToyPolicy {
 public:
  /// All-zero parameters, i.e. the uniform policy.
  explicit ToyPolicy(PolicyShape shape);
  ToyPolicy(PolicyShape shape, Vector params);

  /// Parameters drawn i.i.d. N(0, scale^2).
  static ToyPolicy random(PolicyShape shape, std::uint64_t seed, double scale);

  const PolicyShape& shape() const { return shape_; }
  const Vector& params() const { return params_; }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }
  static std::size_t num_params(const PolicyShape& shape);

  ToyPolicy with_params(Vector params) const;

  /// Coordinates of the output layer W inside params().
  ScopeMask output_layer_scope() const;

  /// log pi(. | context) over the vocabulary.
  Vector next_token_log_probs(std::span<const int> context) const;

  /// sum_k log pi(y_k | x, y_<k). Throws VocabularyError on out-of-range tokens.
  double log_likelihood(std::span<const int> prompt, std::span<const int> response) const;

  /// Same, evaluated at an arbitrary parameter vector of this shape.
  double log_likelihood_at(const Vector& params, std::span<const int> prompt, std::span<const int> response) const;

  /// Gradient of log_likelihood with respect to params().
  Vector grad_log_likelihood(std::span<const int> prompt, std::span<const int> response) const;

 private:
  struct Forward;
  Forward forward(const Vector& params, std::span<const int> context) const;
  void check_tokens(std::span<const int> prompt, std::span<const int> response) const;

  PolicyShape shape_;
  std::shared_ptr<const Eigen::MatrixXd> embedding_;
  Vector params_;
};

/// Free-function form of ToyPolicy::log_likelihood.
double log_likelihood(const ToyPolicy& policy, std::span<const int> prompt, std::span<const int> response);

/// Likelihood evaluator over parameter vectors shaped like `policy`.
LikelihoodEvaluator make_likelihood_evaluator(const ToyPolicy& policy);

}  // namespace compo
