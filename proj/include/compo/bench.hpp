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
#include <optional>
#include <vector>

#include "compo/core/param_vector.hpp"
#include "compo/core/rng.hpp"
#include "compo/optimizer.hpp"
#include "compo/oracles.hpp"

namespace compo {

enum class ObjectiveKind { linear, quadratic, quadratic_cosine };

/// Test function whose gradient is supported on a fixed coordinate set S.
///   linear:           f = sum_{j in S} a_j theta_j
///   quadratic:        f = 1/2 sum_{j in S} a_j theta_j^2
///   quadratic_cosine: f = sum_{j in S} (theta_j^2 + alpha cos theta_j)
class SyntheticObjective {
 public:
  SyntheticObjective(ObjectiveKind kind, std::size_t dim, std::vector<std::size_t> support, Vector coeffs,
                     double alpha = 0.0);

  ObjectiveKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t sparsity() const { return support_.size(); }
  const std::vector<std::size_t>& support() const { return support_; }
  const Vector& coeffs() const { return coeffs_; }
  double alpha() const { return alpha_; }
  /// Gradient Lipschitz constant.
  double ell() const { return ell_; }
  /// inf_theta f (-infinity for linear).
  double infimum() const { return infimum_; }

  double value(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;
  /// f(theta) - inf f.
  double gap(const Vector& theta) const { return value(theta) - infimum_; }

  Objective as_objective() const;
  ComparisonOracle oracle() const;
  Diagnostics diagnostics() const;

  /// A point supported on S with ||grad f|| == grad_norm (to ~1e-12 relative).
  Vector point_with_gradient_norm(double grad_norm, Rng& rng) const;

 private:
  ObjectiveKind kind_;
  std::size_t dim_;
  std::vector<std::size_t> support_;
  Vector coeffs_;
  double alpha_;
  double ell_;
  double infimum_;
};

/// s distinct random coordinates, a_j ~ U[0.5, 1], ell = max a_j.
SyntheticObjective make_sparse_quadratic(std::size_t d, std::size_t s, std::uint64_t seed);

/// sum_{j in S}(theta_j^2 + alpha cos theta_j) with ell = 2 + alpha. The Hessian
/// 2 - alpha cos theta_j is indefinite near the origin only when alpha > 2.
SyntheticObjective make_nonconvex_sparse(std::size_t d, std::size_t s, std::uint64_t seed, double alpha = 3.0);

/// f = a^T theta on s random coordinates with a ~ N(0,1); ell reported as 1.
SyntheticObjective make_sparse_linear(std::size_t d, std::size_t s, std::uint64_t seed);

/// Largest ||grad f(x) - grad f(y)|| / ||x - y|| over `pairs` random point pairs.
double sampled_lipschitz_ratio(const SyntheticObjective& f, std::size_t pairs, double spread, Rng& rng);

struct SignAgreementReport {
  double fraction = 0.0;
  std::size_t samples = 0;
  double radius = 0.0;
  double grad_norm = 0.0;
  /// Binomial standard error of `fraction`.
  double std_error = 0.0;
};

/// Fraction of sphere directions z for which the function oracle at radius
/// r = epsilon / (40 ell sqrt(d)) agrees with sign(z^T grad f(theta)) (zero
/// counted as +1). `ell_override` replaces the objective's ell in r.
/// Throws InvalidTest unless ||grad f(theta)|| > epsilon / 2.
SignAgreementReport check_sign_agreement(const SyntheticObjective& f, const Vector& theta, double epsilon,
                                         std::size_t samples, Rng& rng, std::optional<double> ell_override = {});

struct EstimatorErrorReport {
  std::size_t d = 0;
  std::size_t s = 0;
  std::size_t m = 0;
  double kept_probability = 0.0;
  /// ||g_hat - g_bar||_2 per trial.
  std::vector<double> errors;
  std::size_t replanted = 0;

  std::size_t count_within(double tau) const;
  double mean_error() const;
  double max_error() const;
  /// c such that m = c * tau^-4 (p - 1/2)^-2 s log(2d/s).
  double implied_constant(double tau) const;
};

/// ceil(40 s log(2d/s)).
std::size_t default_recovery_measurements(std::size_t d, std::size_t s);

/// Plants an s-sparse unit g_bar (re-drawn if ||g_bar||_1 > sqrt(s)), takes m
/// sign measurements sign(z_i^T g_bar) each kept with probability p and flipped
/// otherwise, solves the constrained estimator and records ||g_hat - g_bar||.
/// Trial k uses rng.substream(k). Throws InvalidTest unless 1/2 < p <= 1.
EstimatorErrorReport check_estimator_error(std::size_t d, std::size_t s, double kept_probability, std::size_t m,
                                           std::size_t trials, Rng& rng);

struct SweepConfig {
  std::vector<std::size_t> dims{200, 400, 800};
  std::size_t s = 5;
  double epsilon = 0.1;
  double Lambda = 0.1;
  double c_m = 1.0;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  /// ||grad f(theta_1)||; the gap Delta is computed exactly from theta_1.
  double initial_grad_norm = 1.0;
  /// Gradient support size equals d (the dense comparison).
  bool dense = false;
  std::size_t workers = 1;
};

struct SweepCell {
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::size_t T = 0;
  std::size_t iterations = 0;
  /// Oracle calls spent before the first iterate with ||grad f|| < epsilon; empty when censored.
  std::optional<std::size_t> calls;
  double best_grad_norm = 0.0;
};

struct ScalingRow {
  std::size_t d = 0;
  double mean_calls = 0.0;
  std::size_t converged = 0;
  std::size_t runs = 0;
};

struct ScalingReport {
  std::vector<SweepCell> cells;
  std::vector<ScalingRow> rows;
  /// Largest mean_calls[i+1] / mean_calls[i]; 0 with fewer than two converged rows.
  double max_ratio = 0.0;
  bool all_converged = true;
};

/// For each d and seed, runs the basic scheme with the theorem schedule on a
/// fresh sparse quadratic until ||grad f(theta_t)|| < epsilon or T rounds.
ScalingReport sweep_convergence(const SweepConfig& config);

struct DescentReport {
  /// Mean of [f(theta_{t+1}) - f(theta_t)] - [-eta ||grad f(theta_t)|| / 2 + ell eta^2 / 2].
  double mean_excess = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  /// mean_excess - 1.96 * std_error <= 0.
  bool holds = false;
};

/// Descent-inequality check over the non-skipped rounds of basic-scheme runs
/// (one per seed) whose iterate still has ||grad f|| > epsilon / 2.
DescentReport check_descent(std::size_t d, std::size_t s, double epsilon, double Lambda, double c_m,
                            const std::vector<std::uint64_t>& seeds, std::size_t max_rounds = 200);

struct CalibrationRow {
  double c_m = 0.0;
  std::size_t m = 0;
  /// Fraction of trials with ||g_hat - grad f / ||grad f|| || <= 1/2.
  double success = 0.0;
};

struct CalibrationReport {
  std::vector<CalibrationRow> rows;
  /// Smallest candidate with success >= 1 - Lambda, if any.
  std::optional<double> chosen;
};

/// Estimator quality at random points of a sparse quadratic for each candidate c_m.
CalibrationReport calibrate_cm(std::size_t d, std::size_t s, double epsilon, double Lambda,
                               const std::vector<double>& candidates, std::size_t trials, std::uint64_t seed);

}  // namespace compo
