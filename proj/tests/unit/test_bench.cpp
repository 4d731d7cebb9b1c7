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

#include <cmath>

#include "compo/bench.hpp"
#include "compo/errors.hpp"
#include "compo/sparse_grad.hpp"
#include "doctest.h"

using namespace compo;

TEST_CASE("sparse quadratic with s = d and unit coefficients is half the squared norm") {
  const SyntheticObjective f(ObjectiveKind::quadratic, 4, {0, 1, 2, 3}, Vector::Ones(4));
  Vector x(4);
  x << 1, -2, 0.5, 3;
  CHECK(f.value(x) == doctest::Approx(0.5 * x.squaredNorm()));
  CHECK(f.gradient(x) == x);
  CHECK(f.ell() == 1.0);
  CHECK(f.infimum() == 0.0);
}

TEST_CASE("sparse quadratic: origin is the global minimum") {
  const SyntheticObjective f = make_sparse_quadratic(50, 5, 1);
  CHECK(f.gradient(Vector::Zero(50)).norm() == 0.0);
  CHECK(f.gap(Vector::Zero(50)) == 0.0);
  CHECK(f.support().size() == 5);
  for (double a : f.coeffs()) CHECK((a >= 0.5 && a <= 1.0));
}

TEST_CASE("claimed ell bounds the sampled Lipschitz ratio on 1e3 pairs") {
  Rng rng(2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SyntheticObjective q = make_sparse_quadratic(40, 4, seed);
    const SyntheticObjective n = make_nonconvex_sparse(40, 4, seed);
    const SyntheticObjective l = make_sparse_linear(40, 4, seed);
    CHECK(sampled_lipschitz_ratio(q, 1000, 2.0, rng) <= q.ell() * (1.0 + 1e-12));
    CHECK(sampled_lipschitz_ratio(n, 1000, 2.0, rng) <= n.ell() * (1.0 + 1e-12));
    CHECK(sampled_lipschitz_ratio(l, 1000, 2.0, rng) <= l.ell());
  }
}

TEST_CASE("gradients are s-sparse and satisfy the l1/l2 inequality") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t d = 10 + rng.next_u64() % 50;
    const std::size_t s = 1 + rng.next_u64() % 6;
    const SyntheticObjective f = i % 2 ? make_sparse_quadratic(d, s, rng.next_u64())
                                       : make_nonconvex_sparse(d, s, rng.next_u64(), 3.0 * rng.uniform());
    Vector x(static_cast<Eigen::Index>(d));
    for (auto& v : x) v = 2.0 * rng.normal();
    const Vector g = f.gradient(x);
    REQUIRE(static_cast<std::size_t>((g.array() != 0.0).count()) <= s);
    REQUIRE(g.lpNorm<1>() <= std::sqrt(static_cast<double>(s)) * g.norm() * (1.0 + 1e-12));
  }
}

TEST_CASE("nonconvex family: alpha = 0 reduces to a quadratic") {
  const SyntheticObjective n = make_nonconvex_sparse(30, 3, 4, 0.0);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    Vector x(30);
    for (auto& v : x) v = rng.normal();
    double expected = 0.0;
    for (std::size_t j : n.support()) expected += x[static_cast<Eigen::Index>(j)] * x[static_cast<Eigen::Index>(j)];
    CHECK(n.value(x) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(n.ell() == 2.0);
}

TEST_CASE("nonconvex family: negative curvature at the origin for alpha > 2") {
  const SyntheticObjective n = make_nonconvex_sparse(10, 2, 5, 3.0);
  const std::size_t j = n.support()[0];
  Vector e = Vector::Zero(10);
  e[static_cast<Eigen::Index>(j)] = 1e-3;
  // Second difference along e_j: (2 - alpha) h^2 to leading order.
  const double second = n.value(e) + n.value(-e) - 2.0 * n.value(Vector::Zero(10));
  CHECK(second < 0.0);
  // The cosine term bounds the function below.
  CHECK(std::isfinite(n.infimum()));
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    Vector x(10);
    for (auto& v : x) v = 3.0 * rng.normal();
    CHECK(n.value(x) >= n.infimum() - 1e-12);
  }
}

TEST_CASE("point_with_gradient_norm hits the requested norm") {
  Rng rng(7);
  for (double target : {0.05, 1.0, 4.0}) {
    const SyntheticObjective q = make_sparse_quadratic(100, 5, 8);
    const SyntheticObjective n = make_nonconvex_sparse(100, 5, 8);
    CHECK(q.gradient(q.point_with_gradient_norm(target, rng)).norm() == doctest::Approx(target).epsilon(1e-12));
    CHECK(n.gradient(n.point_with_gradient_norm(target, rng)).norm() == doctest::Approx(target).epsilon(1e-10));
  }
}

TEST_CASE("check_sign_agreement: linear objective agrees exactly") {
  const SyntheticObjective l = make_sparse_linear(50, 5, 9);
  Rng rng(9);
  Vector x = Vector::Zero(50);
  const auto rep = check_sign_agreement(l, x, 0.5, 20000, rng);
  CHECK(rep.fraction == 1.0);
  CHECK(rep.std_error == 0.0);
}

TEST_CASE("check_sign_agreement: sparse quadratic at d = 100 reaches 0.69") {
  const SyntheticObjective f = make_sparse_quadratic(100, 5, 10);
  Rng rng(10);
  const Vector x = f.point_with_gradient_norm(1.0, rng);
  const auto rep = check_sign_agreement(f, x, 1.0, 100000, rng);
  CHECK(rep.radius == doctest::Approx(1.0 / (40.0 * f.ell() * 10.0)));
  CHECK(rep.fraction - 3.0 * rep.std_error >= 0.69);
}

TEST_CASE("check_sign_agreement: smaller radius agrees at least as often") {
  // Large nominal radius so curvature actually matters at the first setting.
  const SyntheticObjective f = make_sparse_quadratic(100, 5, 11);
  Rng rng0(11);
  const Vector x = f.point_with_gradient_norm(0.6, rng0);
  std::vector<double> fractions;
  for (double ell_scale : {0.0005, 0.005, 1.0}) {
    Rng rng(12);
    fractions.push_back(check_sign_agreement(f, x, 1.0, 100000, rng, f.ell() * ell_scale).fraction);
  }
  MESSAGE("agreement at growing ell: " << fractions[0] << ", " << fractions[1] << ", " << fractions[2]);
  CHECK(fractions[0] < fractions[1]);
  CHECK(fractions[1] <= fractions[2] + 1e-3);
}

TEST_CASE("check_sign_agreement: precondition") {
  const SyntheticObjective f = make_sparse_quadratic(20, 2, 1);
  Rng rng(1);
  CHECK_THROWS_AS(check_sign_agreement(f, Vector::Zero(20), 0.5, 100, rng), InvalidTest);
  CHECK_THROWS_AS(check_sign_agreement(f, f.point_with_gradient_norm(1.0, rng), 0.5, 0, rng), InvalidTest);
}

TEST_CASE("check_estimator_error: the e1 example is recovered exactly") {
  // All measurements along +-e1 with signs sign(z^T e1): c is a positive
  // multiple of e1 and the estimator returns e1.
  BitMeasurementBatch b;
  Vector e1 = Vector::Zero(6);
  e1[0] = 1.0;
  for (int i = 0; i < 9; ++i) {
    const Vector z = (i % 3 == 0 ? -1.0 : 1.0) * e1;
    b.directions.push_back(UnitVector::normalize(z));
    b.signs.push_back(z[0] < 0 ? Sign::minus : Sign::plus);
  }
  for (std::size_t s : {1, 2, 3}) CHECK(solve_1bge_exact(b, s).direction == e1);
}

TEST_CASE("check_estimator_error: noiseless error shrinks as m doubles") {
  std::vector<double> means;
  for (std::size_t m : {50, 100, 200, 400, 800}) {
    Rng rng(13);
    means.push_back(check_estimator_error(20, 2, 1.0, m, 40, rng).mean_error());
  }
  MESSAGE("mean error by m: " << means[0] << " " << means[1] << " " << means[2] << " " << means[3] << " " << means[4]);
  for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] < means[i - 1]);
  CHECK(means.back() < 0.1);
}

TEST_CASE("check_estimator_error: d = 500, s = 5, p = 0.8") {
  Rng rng(14);
  const std::size_t m = default_recovery_measurements(500, 5);
  CHECK(m == static_cast<std::size_t>(std::ceil(200.0 * std::log(200.0))));
  const auto rep = check_estimator_error(500, 5, 0.8, m, 100, rng);
  CHECK(rep.errors.size() == 100);
  CHECK(rep.count_within(0.5) >= 95);
  CHECK(rep.implied_constant(0.5) > 0.0);
  CHECK_THROWS_AS(check_estimator_error(10, 2, 0.5, 10, 1, rng), InvalidTest);
}

TEST_CASE("sweep_convergence: all cells converge and calls grow slowly in d") {
  SweepConfig c;
  const ScalingReport r = sweep_convergence(c);
  CHECK(r.all_converged);
  CHECK(r.cells.size() == 9);
  for (const auto& row : r.rows) MESSAGE("d=" << row.d << " mean calls " << row.mean_calls);
  CHECK(r.max_ratio <= 2.0);
  CHECK(r.max_ratio > 0.0);
}

TEST_CASE("sweep_convergence: dense gradients need more calls than sparse ones") {
  SweepConfig sparse;
  sparse.dims = {400};
  SweepConfig dense = sparse;
  dense.dense = true;
  const ScalingReport a = sweep_convergence(sparse);
  const ScalingReport b = sweep_convergence(dense);
  REQUIRE(a.all_converged);
  MESSAGE("sparse " << a.rows[0].mean_calls << " vs dense " << b.rows[0].mean_calls << " (dense converged "
                    << b.rows[0].converged << "/" << b.rows[0].runs << ")");
  // A censored dense cell only strengthens the comparison.
  CHECK((b.rows[0].converged < b.rows[0].runs || b.rows[0].mean_calls > a.rows[0].mean_calls));
}

TEST_CASE("sweep_convergence: halving epsilon multiplies calls by 2 to 8") {
  SweepConfig c;
  c.dims = {200};
  c.seeds = {1, 2, 3, 4, 5};
  c.epsilon = 0.2;
  const ScalingReport coarse = sweep_convergence(c);
  c.epsilon = 0.1;
  const ScalingReport fine = sweep_convergence(c);
  REQUIRE(coarse.all_converged);
  REQUIRE(fine.all_converged);
  const double factor = fine.rows[0].mean_calls / coarse.rows[0].mean_calls;
  MESSAGE("epsilon-halving factor " << factor);
  CHECK(factor >= 2.0);
  CHECK(factor <= 8.0);
}

TEST_CASE("bench reports are deterministic") {
  SweepConfig c;
  c.dims = {100};
  c.seeds = {4};
  const ScalingReport a = sweep_convergence(c);
  c.workers = 4;
  const ScalingReport b = sweep_convergence(c);
  CHECK(a.cells[0].calls == b.cells[0].calls);
  CHECK(a.cells[0].best_grad_norm == b.cells[0].best_grad_norm);
  Rng r1(5);
  Rng r2(5);
  CHECK(check_estimator_error(50, 3, 0.8, 200, 10, r1).errors == check_estimator_error(50, 3, 0.8, 200, 10, r2).errors);
}

TEST_CASE("calibrate_cm picks the smallest adequate constant") {
  const CalibrationReport rep = calibrate_cm(200, 5, 0.1, 0.1, {1.0, 4.0, 16.0}, 100, 1);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) MESSAGE("c_m=" << row.c_m << " m=" << row.m << " success=" << row.success);
  CHECK(rep.rows[0].m < rep.rows[1].m);
  CHECK(rep.rows[2].success >= 0.9);
  REQUIRE(rep.chosen.has_value());
  for (const auto& row : rep.rows) {
    if (row.c_m < *rep.chosen) CHECK(row.success < 0.9);
  }
}
