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
#include <numeric>
#include <string>

#include "compo/bench.hpp"
#include "compo/errors.hpp"
#include "compo/sparse_grad.hpp"

namespace compo {
namespace {

Sign sign_of(double v) { return v < 0.0 ? Sign::minus : Sign::plus; }

// Uniformly random s-sparse unit vector.
Vector planted_direction(std::size_t d, std::size_t s, Rng& rng) {
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_u64() % (d - i));
    std::swap(idx[i], idx[j]);
    g[static_cast<Eigen::Index>(idx[i])] = rng.normal();
  }
  return g / g.norm();
}

}  // namespace

SignAgreementReport check_sign_agreement(const SyntheticObjective& f, const Vector& theta, double epsilon,
                                         std::size_t samples, Rng& rng, std::optional<double> ell_override) {
  if (!(epsilon > 0.0)) throw InvalidTest("epsilon must be positive");
  if (samples == 0) throw InvalidTest("need at least one sample");
  const Vector grad = f.gradient(theta);
  const double grad_norm = grad.norm();
  if (!(grad_norm > 0.5 * epsilon)) {
    throw InvalidTest("sign agreement requires ||grad f|| > epsilon/2 (got " + std::to_string(grad_norm) + ")");
  }
  const double ell = ell_override.value_or(f.ell());
  if (!(ell > 0.0)) throw InvalidTest("smoothness constant must be positive");

  SignAgreementReport out;
  out.samples = samples;
  out.grad_norm = grad_norm;
  out.radius = epsilon / (40.0 * ell * std::sqrt(static_cast<double>(f.dim())));

  const Objective objective = f.as_objective();
  const ParamVector base(theta);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const UnitVector z = sample_unit_sphere(f.dim(), rng);
    const Sign observed = compare_function(objective, base, embed_perturbation(base, z, out.radius));
    if (observed == sign_of(z.values().dot(grad))) ++agree;
  }
  const double n = static_cast<double>(samples);
  out.fraction = static_cast<double>(agree) / n;
  out.std_error = std::sqrt(out.fraction * (1.0 - out.fraction) / n);
  return out;
}

std::size_t EstimatorErrorReport::count_within(double tau) const {
  return static_cast<std::size_t>(std::count_if(errors.begin(), errors.end(), [tau](double e) { return e <= tau; }));
}

double EstimatorErrorReport::mean_error() const {
  if (errors.empty()) return 0.0;
  return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
}

double EstimatorErrorReport::max_error() const {
  return errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
}

double EstimatorErrorReport::implied_constant(double tau) const {
  const double sd = static_cast<double>(s);
  const double margin = kept_probability - 0.5;
  return static_cast<double>(m) * std::pow(tau, 4) * margin * margin /
         (sd * std::log(2.0 * static_cast<double>(d) / sd));
}

std::size_t default_recovery_measurements(std::size_t d, std::size_t s) {
  if (s < 1 || s > d) throw InvalidArgument("sparsity must satisfy 1 <= s <= d");
  const double sd = static_cast<double>(s);
  return static_cast<std::size_t>(std::ceil(40.0 * sd * std::log(2.0 * static_cast<double>(d) / sd)));
}

EstimatorErrorReport check_estimator_error(std::size_t d, std::size_t s, double kept_probability, std::size_t m,
                                           std::size_t trials, Rng& rng) {
  if (!(kept_probability > 0.5 && kept_probability <= 1.0)) {
    throw InvalidTest("kept probability must lie in (1/2, 1]");
  }
  if (s < 1 || s > d) throw InvalidTest("sparsity must satisfy 1 <= s <= d");
  if (m == 0 || trials == 0) throw InvalidTest("need at least one measurement and one trial");

  EstimatorErrorReport out;
  out.d = d;
  out.s = s;
  out.m = m;
  out.kept_probability = kept_probability;
  out.errors.reserve(trials);

  const Rng base = rng.substream(rng.counter());
  rng.discard(1);
  const double root_s = std::sqrt(static_cast<double>(s));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng tr = base.substream(trial);
    Vector planted = planted_direction(d, s, tr);
    while (planted.lpNorm<1>() > root_s) {  // cannot happen for s-sparse unit vectors; kept as a guard
      ++out.replanted;
      planted = planted_direction(d, s, tr);
    }
    Vector c = Vector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < m; ++i) {
      const UnitVector z = sample_unit_sphere(d, tr);
      double y = z.values().dot(planted) < 0.0 ? -1.0 : 1.0;
      if (tr.uniform() >= kept_probability) y = -y;
      c += y * z.values();
    }
    double err = 2.0;  // a zero signed sum carries no information
    try {
      err = (solve_1bge_exact(c, s).direction - planted).norm();
    } catch (const DegenerateMeasurement&) {
    }
    out.errors.push_back(err);
  }
  return out;
}

ScalingReport sweep_convergence(const SweepConfig& config) {
  if (config.dims.empty()) throw InvalidTest("dimension grid is empty");
  if (config.seeds.empty()) throw InvalidTest("need at least one seed");

  ScalingReport out;
  for (std::size_t d : config.dims) {
    ScalingRow row;
    row.d = d;
    double total = 0.0;
    for (std::uint64_t seed : config.seeds) {
      const std::size_t s = config.dense ? d : config.s;
      const SyntheticObjective f = make_sparse_quadratic(d, s, mix64(seed) ^ d);
      Rng rng(seed, d);
      const ParamVector theta0(f.point_with_gradient_norm(config.initial_grad_norm, rng));
      const TheoremSchedule sched =
          schedule_from_theorem(config.epsilon, config.Lambda, f.ell(), f.gap(theta0.values()), s, d, config.c_m);
      const Diagnostics diag = f.diagnostics();
      RunOptions options;
      options.diagnostics = &diag;
      options.stop_below = config.epsilon;
      options.workers = config.workers;
      const RunResult run = run_basic(f.oracle(), theta0, sched, rng, options);

      SweepCell cell;
      cell.d = d;
      cell.seed = seed;
      cell.m = sched.m;
      cell.T = sched.T;
      cell.iterations = run.trajectory.records.size();
      cell.calls = run.trajectory.calls_to_reach(config.epsilon);
      cell.best_grad_norm = run.trajectory.best_grad_norm().value_or(0.0);
      ++row.runs;
      if (cell.calls) {
        ++row.converged;
        total += static_cast<double>(*cell.calls);
      } else {
        out.all_converged = false;
      }
      out.cells.push_back(cell);
    }
    row.mean_calls = row.converged > 0 ? total / static_cast<double>(row.converged) : 0.0;
    out.rows.push_back(row);
  }
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i - 1].converged == 0 || out.rows[i].converged == 0) continue;
    out.max_ratio = std::max(out.max_ratio, out.rows[i].mean_calls / out.rows[i - 1].mean_calls);
  }
  return out;
}

DescentReport check_descent(std::size_t d, std::size_t s, double epsilon, double Lambda, double c_m,
                            const std::vector<std::uint64_t>& seeds, std::size_t max_rounds) {
  if (seeds.empty()) throw InvalidTest("need at least one seed");
  std::vector<double> excess;
  for (std::uint64_t seed : seeds) {
    const SyntheticObjective f = make_sparse_quadratic(d, s, mix64(seed) ^ 0xDE5C);
    Rng rng(seed, 0xDE5C);
    const ParamVector theta0(f.point_with_gradient_norm(1.0, rng));
    TheoremSchedule sched = schedule_from_theorem(epsilon, Lambda, f.ell(), f.gap(theta0.values()), s, d, c_m);
    sched.T = std::min(sched.T, max_rounds);  // eta keeps its full-horizon value
    const Diagnostics diag = f.diagnostics();
    RunOptions options;
    options.diagnostics = &diag;
    const RunResult run = run_basic(f.oracle(), theta0, sched, rng, options);

    double f_prev = *run.trajectory.initial_f;
    double g_prev = *run.trajectory.initial_grad_norm;
    for (const auto& rec : run.trajectory.records) {
      if (!rec.skipped && g_prev > 0.5 * epsilon) {
        const double bound = -0.5 * sched.eta * g_prev + 0.5 * f.ell() * sched.eta * sched.eta;
        excess.push_back((*rec.f - f_prev) - bound);
      }
      f_prev = *rec.f;
      g_prev = *rec.grad_norm;
    }
  }

  DescentReport out;
  out.samples = excess.size();
  if (excess.empty()) return out;
  const double n = static_cast<double>(excess.size());
  out.mean_excess = std::accumulate(excess.begin(), excess.end(), 0.0) / n;
  double var = 0.0;
  for (double e : excess) var += (e - out.mean_excess) * (e - out.mean_excess);
  var = excess.size() > 1 ? var / (n - 1.0) : 0.0;
  out.std_error = std::sqrt(var / n);
  out.holds = out.mean_excess - 1.96 * out.std_error <= 0.0;
  return out;
}

CalibrationReport calibrate_cm(std::size_t d, std::size_t s, double epsilon, double Lambda,
                               const std::vector<double>& candidates, std::size_t trials, std::uint64_t seed) {
  if (candidates.empty() || trials == 0) throw InvalidTest("calibration needs candidates and trials");
  CalibrationReport out;
  for (double c_m : candidates) {
    CalibrationRow row;
    row.c_m = c_m;
    std::size_t ok = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const SyntheticObjective f = make_sparse_quadratic(d, s, mix64(seed + trial));
      Rng rng(seed, trial);
      // Hardest regime covered by the analysis: ||grad f|| just above epsilon / 2.
      const ParamVector theta(f.point_with_gradient_norm(epsilon, rng));
      const TheoremSchedule sched = schedule_from_theorem(epsilon, Lambda, f.ell(), f.gap(theta.values()), s, d, c_m);
      row.m = sched.m;
      const BitMeasurementBatch bits = measure_bits(f.oracle(), theta, sched.radius, sched.m, rng);
      const Vector grad = f.gradient(theta.values());
      try {
        if ((solve_1bge_exact(bits, s).direction - grad / grad.norm()).norm() <= 0.5) ++ok;
      } catch (const DegenerateMeasurement&) {
      }
    }
    row.success = static_cast<double>(ok) / static_cast<double>(trials);
    out.rows.push_back(row);
    if (!out.chosen && row.success >= 1.0 - Lambda) out.chosen = c_m;
  }
  return out;
}

}  // namespace compo
