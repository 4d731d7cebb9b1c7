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

#include "compo/sparse_grad.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "compo/errors.hpp"

namespace compo {
namespace {

// l1/l2 ratio of S_tau restricted to the `count` largest magnitudes.
double soft_threshold_ratio(const std::vector<double>& sorted_mag, std::size_t count, double tau) {
  double l1 = 0.0;
  double l2sq = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = sorted_mag[i] - tau;
    l1 += v;
    l2sq += v * v;
  }
  return l1 / std::sqrt(l2sq);
}

Vector soft_threshold(const Vector& c, double tau) {
  Vector out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double mag = std::abs(c[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, c[i]) : 0.0;
  }
  return out;
}

}  // namespace

Vector signed_direction_sum(const BitMeasurementBatch& batch) {
  if (batch.size() == 0 || batch.directions.size() != batch.signs.size()) {
    throw InvalidBatch("measurement batch is empty or malformed");
  }
  Vector c = Vector::Zero(static_cast<Eigen::Index>(batch.directions.front().size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.directions[i].size() != static_cast<std::size_t>(c.size())) {
      throw ShapeError("measurement directions differ in length");
    }
    c += static_cast<double>(to_int(batch.signs[i])) * batch.directions[i].values();
  }
  return c;
}

GradientEstimate describe_direction(Vector direction, EstimatorMethod method) {
  GradientEstimate out;
  out.l1_norm = direction.lpNorm<1>();
  out.l2_norm = direction.norm();
  out.nonzero_count = static_cast<std::size_t>((direction.array() != 0.0).count());
  out.direction = std::move(direction);
  out.method = method;
  return out;
}

GradientEstimate solve_1bge_exact(const Vector& c, std::size_t s) {
  if (s == 0) throw InvalidArgument("sparsity level must be at least 1");
  const double l2 = c.norm();
  if (l2 == 0.0) throw DegenerateMeasurement("signed measurement sum is zero");
  if (!std::isfinite(l2)) throw InvalidArgument("measurement sum is not finite");

  const double root_s = std::sqrt(static_cast<double>(s));
  if (c.lpNorm<1>() <= root_s * l2) return describe_direction(c / l2, EstimatorMethod::exact_1bge);

  std::vector<double> mag(static_cast<std::size_t>(c.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(c[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());

  const double top = mag.front();
  const std::size_t tied = static_cast<std::size_t>(std::count(mag.begin(), mag.end(), top));
  if (tied >= s) {
    // Every feasible g has c^T g <= top * ||g||_1 <= top * sqrt(s); spreading
    // the l1 budget over the tied entries attains it with ||g||_2 <= 1.
    Vector g = Vector::Zero(c.size());
    const double weight = root_s / static_cast<double>(tied);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (std::abs(c[i]) == top) g[i] = std::copysign(weight, c[i]);
    }
    return describe_direction(std::move(g), EstimatorMethod::exact_1bge);
  }

  // The ratio is non-increasing in tau. Walk breakpoints downwards until it
  // first exceeds sqrt(s); the crossing lies between that breakpoint and the
  // previous one, where the support is fixed.
  double upper = top;
  std::size_t support = tied;
  std::size_t next = tied;
  for (;;) {
    const double breakpoint = next < mag.size() ? mag[next] : 0.0;
    if (soft_threshold_ratio(mag, support, breakpoint) > root_s) {
      double lo = breakpoint;
      double hi = upper;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (soft_threshold_ratio(mag, support, mid) > root_s) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      Vector g = soft_threshold(c, hi);
      g /= g.norm();
      return describe_direction(std::move(g), EstimatorMethod::exact_1bge);
    }
    if (breakpoint == 0.0) break;
    upper = breakpoint;
    while (next < mag.size() && mag[next] == breakpoint) ++next;
    support = next;
  }
  // Unreachable: the ratio at tau = 0 exceeds sqrt(s) by the first check.
  throw Error("1-bit estimator failed to bracket the soft threshold");
}

GradientEstimate solve_1bge_exact(const BitMeasurementBatch& batch, std::size_t s) {
  return solve_1bge_exact(signed_direction_sum(batch), s);
}

Vector clip_small_entries(Vector v, double lambda_g) {
  if (lambda_g < 0.0) throw InvalidArgument("clip threshold must be non-negative");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < lambda_g) v[i] = 0.0;
  }
  return v;
}

GradientEstimate estimate_normalized_clip(const BitMeasurementBatch& batch, double lambda_g) {
  Vector c = signed_direction_sum(batch);
  const double norm = c.norm();
  if (norm == 0.0) throw DegenerateMeasurement("signed measurement sum is zero");
  return describe_direction(clip_small_entries(c / norm, lambda_g), EstimatorMethod::normalized_clip);
}

}  // namespace compo
