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

#include "compo/policy/toy_policy.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "compo/core/rng.hpp"
#include "compo/errors.hpp"

namespace compo {
namespace {

using Matrix = Eigen::MatrixXd;
using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

std::shared_ptr<const Matrix> make_embedding(const PolicyShape& shape) {
  const auto v = static_cast<Eigen::Index>(shape.vocab_size);
  const auto f = static_cast<Eigen::Index>(shape.features - 1);
  auto e = std::make_shared<Matrix>(v, f);
  Rng rng(shape.embedding_seed, /*stream=*/0xE3B);
  for (Eigen::Index i = 0; i < v; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) (*e)(i, j) = rng.normal();
  }
  return e;
}

void validate_shape(const PolicyShape& shape) {
  if (shape.vocab_size < 2) throw InvalidArgument("policy vocabulary must have at least 2 tokens");
  if (shape.features < 2) throw InvalidArgument("policy needs at least 2 features");
  if (!(shape.decay > 0.0 && shape.decay < 1.0)) throw InvalidArgument("embedding decay must lie in (0, 1)");
  if (shape.max_context < 1) throw InvalidArgument("max_context must be at least 1");
}

Vector log_softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  return logits.array() - lse;
}

}  // namespace

struct ToyPolicy::Forward {
  Vector phi;
  Vector adapter;  // tanh(U phi)
  Vector hidden;
  Vector log_probs;
};

std::size_t ToyPolicy::num_params(const PolicyShape& shape) {
  return shape.features * shape.features + shape.vocab_size * shape.features;
}

ToyPolicy::ToyPolicy(PolicyShape shape) : ToyPolicy(shape, Vector::Zero(static_cast<Eigen::Index>(num_params(shape)))) {}

ToyPolicy::ToyPolicy(PolicyShape shape, Vector params) : shape_(shape), params_(std::move(params)) {
  validate_shape(shape_);
  if (static_cast<std::size_t>(params_.size()) != num_params(shape_)) {
    throw ShapeError("policy expects " + std::to_string(num_params(shape_)) + " parameters, got " +
                     std::to_string(params_.size()));
  }
  if (!params_.allFinite()) throw InvalidArgument("policy parameters must be finite");
  embedding_ = make_embedding(shape_);
}

ToyPolicy ToyPolicy::random(PolicyShape shape, std::uint64_t seed, double scale) {
  validate_shape(shape);
  Vector p(static_cast<Eigen::Index>(num_params(shape)));
  Rng rng(seed, /*stream=*/0x70C);
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = scale * rng.normal();
  return ToyPolicy(shape, std::move(p));
}

ToyPolicy ToyPolicy::with_params(Vector params) const {
  ToyPolicy out = *this;
  if (params.size() != params_.size()) throw ShapeError("parameter vector has the wrong length");
  if (!params.allFinite()) throw InvalidArgument("policy parameters must be finite");
  out.params_ = std::move(params);
  return out;
}

ScopeMask ToyPolicy::output_layer_scope() const {
  const std::size_t f2 = shape_.features * shape_.features;
  return ScopeMask::range(f2, shape_.vocab_size * shape_.features, num_params());
}

ToyPolicy::Forward ToyPolicy::forward(const Vector& params, std::span<const int> context) const {
  const auto f = static_cast<Eigen::Index>(shape_.features);
  const auto v = static_cast<Eigen::Index>(shape_.vocab_size);

  Vector acc = Vector::Zero(f - 1);
  for (int token : context) acc = shape_.decay * acc + embedding_->row(token).transpose();

  Forward out;
  out.phi.resize(f);
  out.phi.head(f - 1) = acc.array().tanh();
  out.phi[f - 1] = 1.0;

  const RowMajorMap adapter_w(params.data(), f, f);
  const RowMajorMap output_w(params.data() + f * f, v, f);
  out.adapter = (adapter_w * out.phi).array().tanh();
  out.hidden = out.phi + out.adapter;
  out.log_probs = log_softmax(output_w * out.hidden);
  return out;
}

void ToyPolicy::check_tokens(std::span<const int> prompt, std::span<const int> response) const {
  const auto v = static_cast<int>(shape_.vocab_size);
  auto check = [v](std::span<const int> seq) {
    for (int t : seq) {
      if (t < 0 || t >= v) {
        throw VocabularyError("token " + std::to_string(t) + " outside vocabulary [0, " + std::to_string(v) + ")");
      }
    }
  };
  check(prompt);
  check(response);
  if (prompt.size() + response.size() > shape_.max_context) {
    throw InvalidArgument("sequence of length " + std::to_string(prompt.size() + response.size()) +
                          " exceeds max_context " + std::to_string(shape_.max_context));
  }
}

Vector ToyPolicy::next_token_log_probs(std::span<const int> context) const {
  check_tokens(context, {});
  return forward(params_, context).log_probs;
}

double ToyPolicy::log_likelihood_at(const Vector& params, std::span<const int> prompt,
                                    std::span<const int> response) const {
  if (params.size() != params_.size()) throw ShapeError("parameter vector has the wrong length");
  check_tokens(prompt, response);
  std::vector<int> context(prompt.begin(), prompt.end());
  context.reserve(prompt.size() + response.size());
  double total = 0.0;
  for (int token : response) {
    total += forward(params, context).log_probs[token];
    context.push_back(token);
  }
  return total;
}

double ToyPolicy::log_likelihood(std::span<const int> prompt, std::span<const int> response) const {
  return log_likelihood_at(params_, prompt, response);
}

Vector ToyPolicy::grad_log_likelihood(std::span<const int> prompt, std::span<const int> response) const {
  check_tokens(prompt, response);
  const auto f = static_cast<Eigen::Index>(shape_.features);
  const auto v = static_cast<Eigen::Index>(shape_.vocab_size);
  const RowMajorMap output_w(params_.data() + f * f, v, f);

  Vector grad = Vector::Zero(params_.size());
  auto grad_adapter = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(grad.data(), f, f);
  auto grad_output =
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(grad.data() + f * f, v, f);

  std::vector<int> context(prompt.begin(), prompt.end());
  for (int token : response) {
    const Forward fw = forward(params_, context);
    // d log p_y / d logits = e_y - p
    Vector err = -fw.log_probs.array().exp();
    err[token] += 1.0;
    grad_output.noalias() += err * fw.hidden.transpose();
    const Vector d_hidden = output_w.transpose() * err;
    const Vector d_pre = d_hidden.array() * (1.0 - fw.adapter.array().square());
    grad_adapter.noalias() += d_pre * fw.phi.transpose();
    context.push_back(token);
  }
  return grad;
}

double log_likelihood(const ToyPolicy& policy, std::span<const int> prompt, std::span<const int> response) {
  return policy.log_likelihood(prompt, response);
}

LikelihoodEvaluator make_likelihood_evaluator(const ToyPolicy& policy) {
  return [policy](const ParamVector& theta, const PreferencePair& pair) {
    return PairLogLikelihood{policy.log_likelihood_at(theta.values(), pair.prompt, pair.preferred),
                             policy.log_likelihood_at(theta.values(), pair.prompt, pair.dispreferred)};
  };
}

}  // namespace compo
