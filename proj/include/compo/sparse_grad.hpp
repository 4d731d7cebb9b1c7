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

#include "compo/core/param_vector.hpp"
#include "compo/oracles.hpp"

namespace compo {

enum class EstimatorMethod { exact_1bge, normalized_clip };

struct GradientEstimate {
  Vector direction;
  double l1_norm = 0.0;
  double l2_norm = 0.0;
  std::size_t nonzero_count = 0;
  EstimatorMethod method = EstimatorMethod::exact_1bge;
};

/// c = sum_i y_i z_i, accumulated in ascending index order.
Vector signed_direction_sum(const BitMeasurementBatch& batch);

/// argmax c^T g subject to ||g||_1 <= sqrt(s), ||g||_2 <= 1.
///
/// If ||c||_1 / ||c||_2 <= sqrt(s) the answer is c / ||c||_2. Otherwise it is
/// S_tau(c) / ||S_tau(c)||_2 for the soft-threshold level tau at which the
/// l1/l2 ratio of S_tau(c) drops to sqrt(s); tau is bracketed between
/// consecutive sorted magnitudes and refined by bisection. When at least s
/// entries tie for the largest magnitude the l2 constraint is slack and the
/// answer spreads sqrt(s) of l1 mass evenly over all tied entries.
///
/// Throws DegenerateMeasurement if c == 0, InvalidArgument if s == 0.
GradientEstimate solve_1bge_exact(const Vector& c, std::size_t s);
GradientEstimate solve_1bge_exact(const BitMeasurementBatch& batch, std::size_t s);

/// Normalized signed sum, then entries with |g_i| < lambda_g zeroed. Not renormalized.
GradientEstimate estimate_normalized_clip(const BitMeasurementBatch& batch, double lambda_g);

/// v_i if |v_i| >= lambda_g, else 0.
Vector clip_small_entries(Vector v, double lambda_g);

/// Norms and support size of an arbitrary direction.
GradientEstimate describe_direction(Vector direction, EstimatorMethod method);

}  // namespace compo
