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
#include <functional>
#include <span>
#include <vector>

#include "compo/core/param_vector.hpp"
#include "compo/core/rng.hpp"
#include "compo/policy/preference.hpp"

namespace compo {

/// Oracle answer. -1 means the second point is strictly better.
enum class Sign : int { minus = -1, plus = 1 };

inline int to_int(Sign s) { return static_cast<int>(s); }

/// C(theta, theta') -> {-1, +1}. Implementations must be pure so they can be
/// queried concurrently.
using ComparisonOracle = std::function<Sign(const ParamVector& theta, const ParamVector& theta_prime)>;

using Objective = std::function<double(const Vector&)>;

/// -1 iff f(theta') < f(theta); ties and everything else give +1.
/// Throws OracleFailure if f returns NaN, ShapeError on a dimension mismatch.
Sign compare_function(const Objective& f, const ParamVector& theta, const ParamVector& theta_prime);

ComparisonOracle make_function_oracle(Objective f);

struct PairLogLikelihood {
  double preferred;
  double dispreferred;
};

/// (log pi_theta(y+|x), log pi_theta(y-|x)) for one pair at a parameter point.
using LikelihoodEvaluator = std::function<PairLogLikelihood(const ParamVector&, const PreferencePair&)>;

/// -1 iff, for every pair in `batch`, theta' strictly raises log pi(y+|x) and
/// strictly lowers log pi(y-|x) relative to theta. Any equality gives +1.
/// Throws InvalidBatch on an empty batch, OracleFailure on NaN likelihoods.
Sign compare_preference(const LikelihoodEvaluator& policy_at, const ParamVector& theta,
                        const ParamVector& theta_prime, std::span<const PreferencePair> batch);

/// Binds compare_preference to a fixed batch.
ComparisonOracle make_preference_oracle(LikelihoodEvaluator policy_at, PreferenceDataset batch);

/// m perturbation directions and the oracle's answer for each.
struct BitMeasurementBatch {
  std::vector<UnitVector> directions;
  std::vector<Sign> signs;
  double radius = 0.0;
  std::uint64_t iteration = 0;
  std::size_t oracle_calls = 0;

  std::size_t size() const { return signs.size(); }
  std::size_t negative_count() const;
  /// |{i : y_i = -1}| / m.
  double negative_fraction() const;
};

struct MeasureOptions {
  /// Number of threads querying the oracle; results do not depend on it.
  std::size_t workers = 1;
};

/// Draws m unit directions in theta's scope and records
/// y_i = oracle(theta, embed_perturbation(theta, z_i, radius)).
///
/// Direction i is generated from rng.substream(t, i), where t is the counter
/// value of `rng` on entry; `rng` then advances by one. Queries run on
/// `options.workers` threads and are collected by index.
BitMeasurementBatch measure_bits(const ComparisonOracle& oracle, const ParamVector& theta, double radius,
                                 std::size_t m, Rng& rng, const MeasureOptions& options = {});

}  // namespace compo
