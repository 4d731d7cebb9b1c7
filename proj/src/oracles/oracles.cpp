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

#include "compo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include "compo/errors.hpp"

namespace compo {

Sign compare_function(const Objective& f, const ParamVector& theta, const ParamVector& theta_prime) {
  if (theta.dim() != theta_prime.dim()) {
    throw ShapeError("compared points have dimensions " + std::to_string(theta.dim()) + " and " +
                     std::to_string(theta_prime.dim()));
  }
  const double base = f(theta.values());
  const double moved = f(theta_prime.values());
  if (std::isnan(base) || std::isnan(moved)) throw OracleFailure("objective evaluated to NaN");
  return moved < base ? Sign::minus : Sign::plus;
}

ComparisonOracle make_function_oracle(Objective f) {
  return [f = std::move(f)](const ParamVector& a, const ParamVector& b) { return compare_function(f, a, b); };
}

Sign compare_preference(const LikelihoodEvaluator& policy_at, const ParamVector& theta,
                        const ParamVector& theta_prime, std::span<const PreferencePair> batch) {
  if (batch.empty()) throw InvalidBatch("preference batch is empty");
  if (theta.dim() != theta_prime.dim()) throw ShapeError("compared points differ in dimension");
  for (const auto& pair : batch) {
    const PairLogLikelihood before = policy_at(theta, pair);
    const PairLogLikelihood after = policy_at(theta_prime, pair);
    if (std::isnan(before.preferred) || std::isnan(before.dispreferred) || std::isnan(after.preferred) ||
        std::isnan(after.dispreferred)) {
      throw OracleFailure("policy log-likelihood evaluated to NaN");
    }
    const bool improves = after.preferred > before.preferred && after.dispreferred < before.dispreferred;
    if (!improves) return Sign::plus;
  }
  return Sign::minus;
}

ComparisonOracle make_preference_oracle(LikelihoodEvaluator policy_at, PreferenceDataset batch) {
  if (batch.empty()) throw InvalidBatch("preference batch is empty");
  return [policy_at = std::move(policy_at), batch = std::move(batch)](const ParamVector& a, const ParamVector& b) {
    return compare_preference(policy_at, a, b, batch);
  };
}

std::size_t BitMeasurementBatch::negative_count() const {
  return static_cast<std::size_t>(std::count(signs.begin(), signs.end(), Sign::minus));
}

double BitMeasurementBatch::negative_fraction() const {
  if (signs.empty()) return 0.0;
  return static_cast<double>(negative_count()) / static_cast<double>(signs.size());
}

BitMeasurementBatch measure_bits(const ComparisonOracle& oracle, const ParamVector& theta, double radius,
                                 std::size_t m, Rng& rng, const MeasureOptions& options) {
  if (m == 0) throw InvalidArgument("number of measurements must be at least 1");
  if (!(radius > 0.0)) throw InvalidArgument("sampling radius must be positive");

  const std::uint64_t iteration = rng.counter();
  rng.discard(1);
  const std::size_t k = theta.scope_dim();

  std::vector<std::optional<UnitVector>> directions(m);
  std::vector<Sign> signs(m, Sign::plus);
  std::vector<std::exception_ptr> failures(m);

  auto query = [&](std::size_t i) {
    try {
      Rng stream = rng.substream(iteration, i);
      directions[i] = sample_unit_sphere(k, stream);
      signs[i] = oracle(theta, embed_perturbation(theta, *directions[i], radius));
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, m);
  if (workers == 1) {
    for (std::size_t i = 0; i < m; ++i) query(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < m; i += workers) query(i);
      });
    }
  }

  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  BitMeasurementBatch batch;
  batch.directions.reserve(m);
  for (auto& d : directions) batch.directions.push_back(std::move(*d));
  batch.signs = std::move(signs);
  batch.radius = radius;
  batch.iteration = iteration;
  batch.oracle_calls = m;
  return batch;
}

}  // namespace compo
