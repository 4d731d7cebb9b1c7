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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "compo/bench.hpp"
#include "compo/errors.hpp"

namespace compo {
namespace {

// Global minimum of x^2 + alpha cos x over the real line.
double min_quadratic_cosine(double alpha) {
  if (alpha <= 2.0) return alpha;  // 2 - alpha cos x >= 0 and x = 0 is stationary
  // Minimizers satisfy 2x = alpha sin x, so |x| <= alpha / 2.
  const double hi = 0.5 * alpha + 1.0;
  auto g = [alpha](double x) { return x * x + alpha * std::cos(x); };
  constexpr int kGrid = 20000;
  double best_x = 0.0;
  double best = g(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = hi * i / kGrid;
    if (g(x) < best) {
      best = g(x);
      best_x = x;
    }
  }
  // Golden-section refinement around the grid minimum.
  double a = std::max(0.0, best_x - hi / kGrid);
  double b = best_x + hi / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - inv_phi * (b - a);
    const double d = a + inv_phi * (b - a);
    if (g(c) < g(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::min(best, g(0.5 * (a + b)));
}

std::vector<std::size_t> random_support(std::size_t d, std::size_t s, Rng& rng) {
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_u64() % (d - i));
    std::swap(all[i], all[j]);
  }
  all.resize(s);
  std::sort(all.begin(), all.end());
  return all;
}

void check_sizes(std::size_t d, std::size_t s) {
  if (s < 1 || s > d) {
    throw InvalidArgument("sparsity must satisfy 1 <= s <= d (s=" + std::to_string(s) + ", d=" + std::to_string(d) +
                          ")");
  }
}

}  // namespace

SyntheticObjective::SyntheticObjective(ObjectiveKind kind, std::size_t dim, std::vector<std::size_t> support,
                                       Vector coeffs, double alpha)
    : kind_(kind), dim_(dim), support_(std::move(support)), coeffs_(std::move(coeffs)), alpha_(alpha) {
  static_cast<void>(ScopeMask(support_, dim_));  // sorted, unique, in range
  if (static_cast<std::size_t>(coeffs_.size()) != support_.size()) {
    throw ShapeError("objective needs one coefficient per support coordinate");
  }
  switch (kind_) {
    case ObjectiveKind::linear:
      ell_ = 1.0;
      infimum_ = -std::numeric_limits<double>::infinity();
      break;
    case ObjectiveKind::quadratic:
      if ((coeffs_.array() <= 0.0).any()) throw InvalidArgument("quadratic coefficients must be positive");
      ell_ = coeffs_.maxCoeff();
      infimum_ = 0.0;
      break;
    case ObjectiveKind::quadratic_cosine:
      if (alpha_ < 0.0) throw InvalidArgument("alpha must be non-negative");
      ell_ = 2.0 + alpha_;
      infimum_ = static_cast<double>(support_.size()) * min_quadratic_cosine(alpha_);
      break;
  }
}

double SyntheticObjective::value(const Vector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dim_) throw ShapeError("objective evaluated at wrong dimension");
  double total = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const double x = theta[static_cast<Eigen::Index>(support_[k])];
    const double a = coeffs_[static_cast<Eigen::Index>(k)];
    switch (kind_) {
      case ObjectiveKind::linear:
        total += a * x;
        break;
      case ObjectiveKind::quadratic:
        total += 0.5 * a * x * x;
        break;
      case ObjectiveKind::quadratic_cosine:
        total += x * x + alpha_ * std::cos(x);
        break;
    }
  }
  return total;
}

Vector SyntheticObjective::gradient(const Vector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dim_) throw ShapeError("objective evaluated at wrong dimension");
  Vector g = Vector::Zero(theta.size());
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const auto j = static_cast<Eigen::Index>(support_[k]);
    const double x = theta[j];
    const double a = coeffs_[static_cast<Eigen::Index>(k)];
    switch (kind_) {
      case ObjectiveKind::linear:
        g[j] = a;
        break;
      case ObjectiveKind::quadratic:
        g[j] = a * x;
        break;
      case ObjectiveKind::quadratic_cosine:
        g[j] = 2.0 * x - alpha_ * std::sin(x);
        break;
    }
  }
  return g;
}

Objective SyntheticObjective::as_objective() const {
  return [self = *this](const Vector& theta) { return self.value(theta); };
}

ComparisonOracle SyntheticObjective::oracle() const { return make_function_oracle(as_objective()); }

Diagnostics SyntheticObjective::diagnostics() const {
  return Diagnostics{as_objective(), [self = *this](const Vector& theta) { return self.gradient(theta); }};
}

Vector SyntheticObjective::point_with_gradient_norm(double grad_norm, Rng& rng) const {
  if (!(grad_norm > 0.0)) throw InvalidArgument("target gradient norm must be positive");
  Vector dir = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t j : support_) dir[static_cast<Eigen::Index>(j)] = rng.normal();
  dir /= dir.norm();
  if (kind_ == ObjectiveKind::linear) return dir;

  auto norm_at = [&](double t) { return gradient(t * dir).norm(); };
  double hi = 1.0;
  while (norm_at(hi) < grad_norm) {
    hi *= 2.0;
    if (hi > 1e12) throw InvalidArgument("could not reach the requested gradient norm");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (norm_at(mid) < grad_norm ? lo : hi) = mid;
  }
  return hi * dir;
}

SyntheticObjective make_sparse_quadratic(std::size_t d, std::size_t s, std::uint64_t seed) {
  check_sizes(d, s);
  Rng rng(seed, /*stream=*/0x5A);
  auto support = random_support(d, s, rng);
  Vector a(static_cast<Eigen::Index>(s));
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = 0.5 + 0.5 * rng.uniform();
  return SyntheticObjective(ObjectiveKind::quadratic, d, std::move(support), std::move(a));
}

SyntheticObjective make_nonconvex_sparse(std::size_t d, std::size_t s, std::uint64_t seed, double alpha) {
  check_sizes(d, s);
  Rng rng(seed, /*stream=*/0x5B);
  auto support = random_support(d, s, rng);
  return SyntheticObjective(ObjectiveKind::quadratic_cosine, d, std::move(support),
                            Vector::Ones(static_cast<Eigen::Index>(s)), alpha);
}

SyntheticObjective make_sparse_linear(std::size_t d, std::size_t s, std::uint64_t seed) {
  check_sizes(d, s);
  Rng rng(seed, /*stream=*/0x5C);
  auto support = random_support(d, s, rng);
  Vector a(static_cast<Eigen::Index>(s));
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = rng.normal();
  return SyntheticObjective(ObjectiveKind::linear, d, std::move(support), std::move(a));
}

double sampled_lipschitz_ratio(const SyntheticObjective& f, std::size_t pairs, double spread, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  double worst = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    Vector x(n);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = spread * rng.normal();
      y[i] = spread * rng.normal();
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    worst = std::max(worst, (f.gradient(x) - f.gradient(y)).norm() / dist);
  }
  return worst;
}

}  // namespace compo
