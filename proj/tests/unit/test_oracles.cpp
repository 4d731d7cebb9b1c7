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
#include <cstring>
#include <stdexcept>

#include "compo/bench.hpp"
#include "compo/errors.hpp"
#include "compo/oracles.hpp"
#include "doctest.h"

using namespace compo;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double sq_norm(const Vector& t) { return t.squaredNorm(); }

// One-token softmax over two logits (theta[0], theta[1]); written out by hand
// rather than through ToyPolicy.
PairLogLikelihood two_token_loglik(const ParamVector& theta, const PreferencePair& pair) {
  const double a = theta.values()[0];
  const double b = theta.values()[1];
  const double lse = std::max(a, b) + std::log(std::exp(a - std::max(a, b)) + std::exp(b - std::max(a, b)));
  auto lp = [&](int token) { return (token == 0 ? a : b) - lse; };
  return {lp(pair.preferred.at(0)), lp(pair.dispreferred.at(0))};
}

PreferencePair one_token_pair(int preferred, int dispreferred) { return {{0}, {preferred}, {dispreferred}, {}}; }

}  // namespace

TEST_CASE("compare_function: documented examples") {
  const Objective f = sq_norm;
  CHECK(compare_function(f, ParamVector(vec({1, 0})), ParamVector(vec({0, 0}))) == Sign::minus);
  CHECK(compare_function(f, ParamVector(vec({1, 0})), ParamVector(vec({1, 0}))) == Sign::plus);
  const Objective constant = [](const Vector&) { return 3.0; };
  CHECK(compare_function(constant, ParamVector(vec({1, 0})), ParamVector(vec({-5, 2}))) == Sign::plus);
}

TEST_CASE("compare_function: errors") {
  const Objective nan_f = [](const Vector&) { return std::nan(""); };
  CHECK_THROWS_AS(compare_function(nan_f, ParamVector(vec({1})), ParamVector(vec({2}))), OracleFailure);
  CHECK_THROWS_AS(compare_function(sq_norm, ParamVector(vec({1})), ParamVector(vec({1, 2}))), ShapeError);
}

TEST_CASE("compare_function: anti-consistency and reflexivity (property)") {
  Rng rng(3);
  const Objective f = [](const Vector& t) { return t.squaredNorm() + std::sin(3.0 * t[0]); };
  for (int i = 0; i < 2000; ++i) {
    Vector a(3);
    Vector b(3);
    for (int k = 0; k < 3; ++k) {
      a[k] = rng.normal();
      b[k] = rng.normal();
    }
    const ParamVector pa(a);
    const ParamVector pb(b);
    if (compare_function(f, pa, pb) == Sign::minus) REQUIRE(compare_function(f, pb, pa) == Sign::plus);
    REQUIRE(compare_function(f, pa, pa) == Sign::plus);
  }
}

TEST_CASE("compare_preference: equal points answer +1") {
  const ParamVector theta(vec({0.3, -0.2}));
  const PreferenceDataset batch{one_token_pair(0, 1)};
  CHECK(compare_preference(two_token_loglik, theta, theta, batch) == Sign::plus);
}

TEST_CASE("compare_preference: two-token softmax example") {
  const ParamVector theta(vec({0.0, 0.0}));
  const ParamVector moved(vec({0.1, -0.1}));
  // Frozen oracle: log pi(0) moves from log 1/2 to 0.1 - log(e^0.1 + e^-0.1).
  const double up = 0.1 - std::log(std::exp(0.1) + std::exp(-0.1)) - std::log(0.5);
  REQUIRE(up > 0.0);
  const PreferenceDataset one{one_token_pair(0, 1)};
  CHECK(compare_preference(two_token_loglik, theta, moved, one) == Sign::minus);
  // Second pair prefers token 1, which the move makes less likely.
  const PreferenceDataset two{one_token_pair(0, 1), one_token_pair(1, 0)};
  CHECK(compare_preference(two_token_loglik, theta, moved, two) == Sign::plus);
}

TEST_CASE("compare_preference: errors") {
  const ParamVector theta(vec({0.0, 0.0}));
  CHECK_THROWS_AS(compare_preference(two_token_loglik, theta, theta, {}), InvalidBatch);
  CHECK_THROWS_AS(make_preference_oracle(two_token_loglik, {}), InvalidBatch);
  const LikelihoodEvaluator nan_eval = [](const ParamVector&, const PreferencePair&) {
    return PairLogLikelihood{std::nan(""), 0.0};
  };
  const PreferenceDataset batch{one_token_pair(0, 1)};
  CHECK_THROWS_AS(compare_preference(nan_eval, theta, ParamVector(vec({1, 0})), batch), OracleFailure);
}

TEST_CASE("compare_preference: log-space decision equals raw-likelihood decision (property)") {
  Rng rng(8);
  const PreferenceDataset batch{one_token_pair(0, 1), one_token_pair(0, 1)};
  for (int i = 0; i < 2000; ++i) {
    const ParamVector a(vec({rng.normal(), rng.normal()}));
    const ParamVector b(vec({rng.normal(), rng.normal()}));
    bool raw_better = true;
    for (const auto& p : batch) {
      const auto la = two_token_loglik(a, p);
      const auto lb = two_token_loglik(b, p);
      raw_better = raw_better && std::exp(lb.preferred) > std::exp(la.preferred) &&
                   std::exp(lb.dispreferred) < std::exp(la.dispreferred);
    }
    REQUIRE((compare_preference(two_token_loglik, a, b, batch) == Sign::minus) == raw_better);
  }
}

TEST_CASE("measure_bits: linear 1-D objective reproduces sign(z)") {
  const ComparisonOracle oracle = make_function_oracle([](const Vector& t) { return t[0]; });
  Rng rng(1);
  const BitMeasurementBatch bits = measure_bits(oracle, ParamVector(vec({0.0})), 1.0, 4, rng);
  REQUIRE(bits.size() == 4);
  CHECK(bits.oracle_calls == 4);
  CHECK(bits.radius == 1.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(to_int(bits.signs[i]) == (bits.directions[i][0] < 0 ? -1 : 1));
}

TEST_CASE("measure_bits: constant objective gives all +1") {
  const ComparisonOracle oracle = make_function_oracle([](const Vector&) { return 1.0; });
  Rng rng(2);
  const BitMeasurementBatch bits = measure_bits(oracle, ParamVector(Vector::Zero(5)), 0.1, 50, rng);
  CHECK(bits.negative_count() == 0);
  CHECK(bits.negative_fraction() == 0.0);
}

TEST_CASE("measure_bits: argument checks and error propagation") {
  const ComparisonOracle oracle = make_function_oracle([](const Vector&) { return 1.0; });
  Rng rng(2);
  CHECK_THROWS_AS(measure_bits(oracle, ParamVector(Vector::Zero(2)), 0.1, 0, rng), InvalidArgument);
  CHECK_THROWS_AS(measure_bits(oracle, ParamVector(Vector::Zero(2)), 0.0, 3, rng), InvalidArgument);
  const ComparisonOracle failing = make_function_oracle([](const Vector&) { return std::nan(""); });
  CHECK_THROWS_AS(measure_bits(failing, ParamVector(Vector::Zero(2)), 0.1, 8, rng, {4}), OracleFailure);
}

TEST_CASE("measure_bits: result does not depend on the worker count") {
  const SyntheticObjective f = make_sparse_quadratic(40, 4, 5);
  Rng r1(77);
  Rng r4(77);
  const ParamVector theta(Vector::Constant(40, 0.3));
  for (int round = 0; round < 3; ++round) {
    const auto a = measure_bits(f.oracle(), theta, 0.05, 64, r1, {1});
    const auto b = measure_bits(f.oracle(), theta, 0.05, 64, r4, {4});
    REQUIRE(a.iteration == b.iteration);
    for (std::size_t i = 0; i < 64; ++i) {
      REQUIRE(a.signs[i] == b.signs[i]);
      REQUIRE(std::memcmp(a.directions[i].values().data(), b.directions[i].values().data(), 40 * sizeof(double)) == 0);
    }
  }
  CHECK(r1 == r4);
}

TEST_CASE("measure_bits: directions live in the scope") {
  const ComparisonOracle oracle = make_function_oracle([](const Vector& t) { return t.sum(); });
  Rng rng(4);
  const ParamVector theta(Vector::Zero(6), ScopeMask({1, 4}, 6));
  const auto bits = measure_bits(oracle, theta, 0.5, 20, rng);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    CHECK(bits.directions[i].size() == 2);
    const double moved = bits.directions[i][0] + bits.directions[i][1];
    CHECK(to_int(bits.signs[i]) == (moved < 0 ? -1 : 1));
  }
}

TEST_CASE("measure_bits: sign agreement on a sparse quadratic exceeds 0.69") {
  const SyntheticObjective f = make_sparse_quadratic(100, 5, 12);
  Rng rng(13);
  const ParamVector theta(f.point_with_gradient_norm(1.0, rng));
  const double r = 1.0 / (40.0 * f.ell() * std::sqrt(100.0));
  const auto bits = measure_bits(f.oracle(), theta, r, 100000, rng);
  const Vector g = f.gradient(theta.values());
  std::size_t agree = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    agree += to_int(bits.signs[i]) == (bits.directions[i].values().dot(g) < 0 ? -1 : 1);
  }
  CHECK(static_cast<double>(agree) / 1e5 >= 0.69);
}
