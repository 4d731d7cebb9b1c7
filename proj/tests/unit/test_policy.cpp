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
#include <filesystem>

#include "compo/errors.hpp"
#include "compo/policy/dpo.hpp"
#include "compo/policy/pipeline.hpp"
#include "doctest.h"
#include "support/reference.hpp"

using namespace compo;

namespace {

PolicyShape shape(std::size_t v, std::size_t f, std::uint64_t seed = 0) {
  PolicyShape s;
  s.vocab_size = v;
  s.features = f;
  s.embedding_seed = seed;
  return s;
}

// V = 2, F = 2, adapter zero: logits are (margin, 0) for every context, so a
// one-token pair (0 over 1) has reference margin `margin`.
ToyPolicy margin_policy(double margin) {
  Vector p = Vector::Zero(8);
  p[4 + 1] = margin;  // W[0][bias feature]
  return ToyPolicy(shape(2, 2), p);
}

PreferencePair pair(TokenSequence x, TokenSequence yp, TokenSequence ym) { return {std::move(x), std::move(yp), std::move(ym), {}}; }

PreferenceDataset random_pairs(std::size_t n, std::size_t vocab, Rng& rng, std::size_t len = 2) {
  PreferenceDataset out;
  auto seq = [&](std::size_t k) {
    TokenSequence s;
    for (std::size_t i = 0; i < k; ++i) s.push_back(static_cast<int>(rng.next_u64() % vocab));
    return s;
  };
  for (std::size_t i = 0; i < n; ++i) out.push_back(pair(seq(2), seq(len), seq(len)));
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("log_likelihood: uniform policy") {
  const ToyPolicy uniform(shape(4, 5));
  CHECK(log_likelihood(uniform, std::vector<int>{1, 2}, std::vector<int>{0, 3}) ==
        doctest::Approx(2.0 * std::log(0.25)).epsilon(1e-14));
  CHECK(2.0 * std::log(0.25) == doctest::Approx(-2.7726).epsilon(1e-4));
}

TEST_CASE("log_likelihood: saturated softmax") {
  const ToyPolicy p = margin_policy(80.0);
  const double ll = p.log_likelihood(std::vector<int>{0}, std::vector<int>{0});
  CHECK(ll <= 0.0);
  CHECK(ll > -1e-30);
  CHECK(p.log_likelihood(std::vector<int>{0}, std::vector<int>{1}) == doctest::Approx(-80.0));
}

TEST_CASE("log_likelihood: V = 3 sequences of length 2 sum to one") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ToyPolicy p = ToyPolicy::random(shape(3, 4, seed), seed, 0.8);
    double total = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) total += std::exp(p.log_likelihood(std::vector<int>{2, 1}, std::vector<int>{a, b}));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("next-token distributions are normalized") {
  const ToyPolicy p = ToyPolicy::random(shape(7, 6, 3), 3, 1.0);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<int> ctx;
    for (std::size_t k = 0; k <= rng.next_u64() % 10; ++k) ctx.push_back(static_cast<int>(rng.next_u64() % 7));
    CHECK(std::abs(p.next_token_log_probs(ctx).array().exp().sum() - 1.0) <= 1e-10);
  }
}

TEST_CASE("log_likelihood: errors") {
  const ToyPolicy p(shape(4, 4));
  CHECK_THROWS_AS(p.log_likelihood(std::vector<int>{0}, std::vector<int>{4}), VocabularyError);
  CHECK_THROWS_AS(p.log_likelihood(std::vector<int>{-1}, std::vector<int>{0}), VocabularyError);
  CHECK_THROWS_AS(ToyPolicy(shape(1, 4)), InvalidArgument);
  CHECK_THROWS_AS(ToyPolicy(shape(4, 4), Vector::Zero(3)), ShapeError);
}

TEST_CASE("output layer scope is the trailing V*F block") {
  const ToyPolicy p(shape(5, 3));
  CHECK(p.num_params() == 9 + 15);
  const ScopeMask s = p.output_layer_scope();
  CHECK(s.size() == 15);
  CHECK(s.indices().front() == 9);
  CHECK(s.indices().back() == 23);
}

TEST_CASE("grad_log_likelihood matches central differences") {
  Rng rng(2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ToyPolicy p = ToyPolicy::random(shape(5, 4, seed), seed + 100, 0.7);
    const auto data = random_pairs(1, 5, rng, 3);
    const auto& x = data[0].prompt;
    const auto& y = data[0].preferred;
    const Vector fd = ref::central_difference([&](const Vector& v) { return p.log_likelihood_at(v, x, y); },
                                              p.params(), 1e-5);
    CHECK(ref::relative_error(p.grad_log_likelihood(x, y), fd) < 1e-7);
  }
}

TEST_CASE("dpo_loss: log 2 at the reference") {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ToyPolicy ref_policy = ToyPolicy::random(shape(6, 5, seed), seed, 1.0);
    const auto data = random_pairs(1 + seed, 6, rng);
    CHECK(std::abs(dpo_loss(ref_policy, ref_policy, data, 0.1) - std::log(2.0)) <= 1e-12);
  }
}

TEST_CASE("dpo_loss: saturation and errors") {
  const ToyPolicy ref_policy(shape(2, 2));
  const PreferenceDataset one{pair({0}, {0}, {1})};
  // Margin 60 against the uniform reference: loss -log sigmoid(60) ~ 1e-26.
  CHECK(dpo_loss(margin_policy(60.0), ref_policy, one, 1.0) < 1e-20);
  CHECK(dpo_loss(margin_policy(-60.0), ref_policy, one, 1.0) == doctest::Approx(60.0));
  CHECK_THROWS_AS(dpo_loss(ref_policy, ref_policy, {}, 0.1), InvalidBatch);
  CHECK_THROWS_AS(dpo_loss(ref_policy, ref_policy, one, 0.0), InvalidArgument);
}

TEST_CASE("dpo_loss matches a raw-probability recomputation") {
  Rng rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ToyPolicy ref_policy = ToyPolicy::random(shape(4, 4, seed), seed, 0.5);
    const ToyPolicy policy = ToyPolicy::random(shape(4, 4, seed), seed + 1000, 0.5);
    const auto data = random_pairs(3, 4, rng);
    const double beta = 0.1 + rng.uniform();
    double expected = 0.0;
    for (const auto& q : data) {
      auto prob = [&](const ToyPolicy& pol, const TokenSequence& y) {
        return std::exp(pol.log_likelihood(q.prompt, y));
      };
      const double ratio = (prob(policy, q.preferred) / prob(ref_policy, q.preferred)) /
                           (prob(policy, q.dispreferred) / prob(ref_policy, q.dispreferred));
      expected += -std::log(sigmoid(beta * std::log(ratio)));
    }
    expected /= 3.0;
    CHECK(dpo_loss(policy, ref_policy, data, beta) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("dpo_grad: zero at the reference with identical responses") {
  const ToyPolicy ref_policy = ToyPolicy::random(shape(5, 4, 1), 1, 1.0);
  const PreferenceDataset same{pair({1, 2}, {3, 0}, {3, 0})};
  CHECK(dpo_grad(ref_policy, ref_policy, same, 0.1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dpo_grad: central differences on 50 random instances") {
  Rng rng(5);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const PolicyShape sh = shape(3 + i % 4, 3 + i % 3, i);
    const ToyPolicy ref_policy = ToyPolicy::random(sh, 2 * i, 0.6);
    const ToyPolicy policy = ToyPolicy::random(sh, 2 * i + 1, 0.6);
    const auto data = random_pairs(1 + i % 3, sh.vocab_size, rng);
    const double beta = 0.5 + rng.uniform();
    const Vector analytic = dpo_grad(policy, ref_policy, data, beta);
    const Vector fd = ref::central_difference(
        [&](const Vector& v) { return dpo_loss(policy.with_params(v), ref_policy, data, beta); }, policy.params(), 1e-5);
    const double err = ref::relative_error(analytic, fd);
    worst = std::max(worst, err);
    REQUIRE(err < 1e-5);
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("dpo_grad: a duplicated pair gives the single-pair gradient") {
  Rng rng(6);
  const ToyPolicy ref_policy = ToyPolicy::random(shape(5, 4, 2), 2, 0.5);
  const ToyPolicy policy = ToyPolicy::random(shape(5, 4, 2), 3, 0.5);
  const auto one = random_pairs(1, 5, rng);
  const PreferenceDataset two{one[0], one[0]};
  CHECK(ref::relative_error(dpo_grad(policy, ref_policy, two, 0.3), dpo_grad(policy, ref_policy, one, 0.3)) < 1e-15);
}

TEST_CASE("train_dpo: zero epochs leave the policy unchanged") {
  const ToyPolicy ref_policy = ToyPolicy::random(shape(4, 4, 1), 1, 0.5);
  Rng rng(7);
  const auto data = random_pairs(5, 4, rng);
  DpoConfig c;
  c.epochs = 0;
  CHECK(train_dpo(ref_policy, ref_policy, data, c).params() == ref_policy.params());
}

TEST_CASE("train_dpo: a single separable pair is learned") {
  const ToyPolicy ref_policy(shape(2, 2));
  const PreferenceDataset one{pair({0}, {0}, {1})};
  DpoConfig c;
  c.beta = 1.0;
  c.learning_rate = 2.0;
  c.epochs = 200;
  std::vector<double> history;
  const ToyPolicy trained = train_dpo(ref_policy, ref_policy, one, c, &history);
  CHECK(history.size() == 201);
  CHECK(history.back() < 0.1);
  CHECK(dpo_loss(trained, ref_policy, one, 1.0) == doctest::Approx(history.back()));
}

TEST_CASE("train_dpo: beta = 0.1 lowers the loss below log 2") {
  const ToyPolicy ref_policy = ToyPolicy::random(shape(8, 8, 4), 4, 0.5);
  Rng rng(8);
  const auto data = random_pairs(20, 8, rng, 4);
  DpoConfig c;
  c.beta = 0.1;
  c.epochs = 5;
  const ToyPolicy trained = train_dpo(ref_policy, ref_policy, data, c);
  CHECK(dpo_loss(trained, ref_policy, data, 0.1) < std::log(2.0));
}

TEST_CASE("split_by_margin: documented examples") {
  const PreferenceDataset one{pair({0}, {0}, {1})};
  for (double m : {2.5, -2.5}) {
    const auto s = split_by_margin(margin_policy(m), one, 3.0);
    CHECK(s.noisy.size() == 1);
    CHECK(s.noisy[0].ref_margin.value() == doctest::Approx(m).epsilon(1e-14));
  }
  const auto clean = split_by_margin(margin_policy(3.5), one, 3.0);
  CHECK(clean.clean.size() == 1);
  CHECK(clean.clean_indices == std::vector<std::size_t>{0});

  // The margin-3 construction evaluates to exactly 3 in binary64, so the
  // boundary case is exercised verbatim.
  const auto edge = split_by_margin(margin_policy(3.0), one, 3.0);
  REQUIRE(edge.noisy.size() + edge.clean.size() == 1);
  const double m3 = (edge.noisy.empty() ? edge.clean : edge.noisy)[0].ref_margin.value();
  CHECK(m3 == 3.0);
  CHECK(edge.noisy.size() == 1);
  CHECK_THROWS_AS(split_by_margin(margin_policy(1.0), one, 0.0), InvalidArgument);
}

TEST_CASE("split_by_margin: disjoint, exhaustive, boundary noisy (property)") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t seed = rng.next_u64();
    const ToyPolicy ref_policy = ToyPolicy::random(shape(5, 4, seed), seed, 1.5);
    const auto data = random_pairs(1 + rng.next_u64() % 8, 5, rng);
    // Every third case puts delta exactly on some pair's margin.
    double delta = 0.05 + 3.0 * rng.uniform();
    if (i % 3 == 0) {
      const auto& q = data[rng.next_u64() % data.size()];
      const double m = std::abs(ref_policy.log_likelihood(q.prompt, q.preferred) -
                                ref_policy.log_likelihood(q.prompt, q.dispreferred));
      if (m > 0.0) delta = m;
    }
    const auto split = split_by_margin(ref_policy, data, delta);
    REQUIRE(split.clean.size() + split.noisy.size() == data.size());
    std::vector<int> seen(data.size(), 0);
    for (std::size_t k = 0; k < split.clean.size(); ++k) {
      ++seen[split.clean_indices[k]];
      REQUIRE(std::abs(*split.clean[k].ref_margin) > delta);
    }
    for (std::size_t k = 0; k < split.noisy.size(); ++k) {
      ++seen[split.noisy_indices[k]];
      REQUIRE(std::abs(*split.noisy[k].ref_margin) <= delta);
    }
    for (int c : seen) REQUIRE(c == 1);
  }
}

TEST_CASE("likelihood_report: identical policies give zero deltas") {
  const ToyPolicy p = ToyPolicy::random(shape(6, 4, 1), 1, 0.5);
  Rng rng(10);
  const auto data = random_pairs(4, 6, rng);
  for (const auto& row : likelihood_report(p, p, data)) {
    CHECK(row.delta_preferred() == 0.0);
    CHECK(row.delta_dispreferred() == 0.0);
    CHECK_FALSE(row.displacement_avoided());
  }
}

TEST_CASE("tail_threshold: nearest-rank lower quantile") {
  CHECK(tail_threshold({0.4, 0.1, 0.3, 0.2}, 0.0) == 0.1);
  CHECK(tail_threshold({0.4, 0.1, 0.3, 0.2}, 0.25) == 0.1);
  CHECK(tail_threshold({0.4, 0.1, 0.3, 0.2}, 0.5) == 0.2);
  CHECK(tail_threshold({0.4, 0.1, 0.3, 0.2}, 1.0) == 0.4);
  CHECK_THROWS_AS(tail_threshold({}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(tail_threshold({0.1}, 1.5), InvalidArgument);
}

TEST_CASE("synthetic dataset fills both quotas") {
  const ToyPolicy ref_policy = ToyPolicy::random(shape(8, 8, 11), 11, 0.5);
  SyntheticDatasetSpec spec;
  spec.n_clean = 12;
  spec.n_noisy = 5;
  spec.seed = 11;
  const auto data = make_synthetic_dataset(ref_policy, spec);
  const auto split = split_by_margin(ref_policy, data, spec.delta);
  CHECK(split.clean.size() == 12);
  CHECK(split.noisy.size() == 5);
  CHECK(make_synthetic_dataset(ref_policy, spec) == data);
}

TEST_CASE("preference jsonl round trip") {
  Rng rng(12);
  auto data = random_pairs(6, 9, rng, 3);
  data[2].ref_margin = -1.25;
  const std::string path = ref::scratch_dir("policy_jsonl") + "/pairs.jsonl";
  write_preference_jsonl(data, path);
  CHECK(read_preference_jsonl(path) == data);
  CHECK_THROWS_AS(read_preference_jsonl(path + ".missing"), IoError);
}

TEST_CASE("preference jsonl: bundled toy dataset parses") {
  const char* dir = std::getenv("COMPO_DATA_DIR");
  REQUIRE(dir != nullptr);
  const auto data = read_preference_jsonl(std::string(dir) + "/toy_preferences.jsonl");
  CHECK(data.size() == 60);
}

TEST_CASE("run_pipeline: delta above every margin skips DPO") {
  const ToyPolicy ref_policy = ToyPolicy::random(shape(6, 4, 5), 5, 0.5);
  Rng rng(13);
  const auto data = random_pairs(4, 6, rng);
  PipelineConfig c;
  c.delta = 1e6;
  c.compo.m = 20;
  c.compo.radius = 1e-3;
  const auto r = run_pipeline(ref_policy, data, c);
  CHECK(r.split.clean.empty());
  CHECK(r.dpo_clean.params() == ref_policy.params());
  CHECK(r.trajectory.records.size() == 4);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("run_pipeline: tiny delta makes it pure DPO") {
  const ToyPolicy ref_policy = ToyPolicy::random(shape(6, 4, 6), 6, 1.0);
  Rng rng(14);
  auto data = random_pairs(4, 6, rng);
  PipelineConfig c;
  c.delta = 1e-12;
  const auto r = run_pipeline(ref_policy, data, c);
  CHECK(r.split.noisy.empty());
  CHECK(r.trajectory.records.empty());
  CHECK(r.final_policy.params() == r.dpo_clean.params());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("run_pipeline: comparison stage touches only the output layer") {
  const ToyPolicy ref_policy = ToyPolicy::random(shape(8, 8, 7), 7, 0.5);
  SyntheticDatasetSpec spec;
  spec.n_clean = 10;
  spec.n_noisy = 4;
  spec.seed = 7;
  const auto data = make_synthetic_dataset(ref_policy, spec);
  PipelineConfig c;
  c.compo = practical_preset("mistral-7b");
  c.compo.lambda = 0.0;
  c.compo.m = 200;
  const auto r = run_pipeline(ref_policy, data, c);
  const std::size_t f2 = 64;
  CHECK(r.final_policy.params().head(f2) == r.dpo_clean.params().head(f2));
  CHECK(r.final_policy.params().tail(64) != r.dpo_clean.params().tail(64));
}

TEST_CASE("run_pipeline: noisy-pair margin improves over DPO_clean (50 clean / 10 noisy, 5 seeds)") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ToyPolicy ref_policy = ToyPolicy::random(shape(8, 8, seed), seed, 0.5);
    SyntheticDatasetSpec spec;
    spec.seed = seed;
    const auto data = make_synthetic_dataset(ref_policy, spec);
    PipelineConfig c;
    c.compo = practical_preset("mistral-7b");
    c.compo.seed = seed;
    c.lambda_quantile = 0.1;
    const auto r = run_pipeline(ref_policy, data, c);
    double before = 0.0;
    double after = 0.0;
    for (const auto& row : r.noisy_report) {
      before += row.before_preferred - row.before_dispreferred;
      after += row.after_preferred - row.after_dispreferred;
    }
    MESSAGE("seed " << seed << ": mean noisy margin " << before / 10 << " -> " << after / 10);
    improved += after > before;
  }
  CHECK(improved == 5);
}
