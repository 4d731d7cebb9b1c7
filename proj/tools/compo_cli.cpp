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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "compo/cli/config.hpp"
#include "compo/cli/experiment.hpp"
#include "compo/cli/export.hpp"
#include "compo/errors.hpp"
#include "compo/policy/pipeline.hpp"

namespace {

struct PolicyOptions {
  std::uint64_t seed = 0;
  std::size_t vocab = 8;
  std::size_t features = 8;
  double scale = 0.5;
};

// Same construction as the pipeline mode, so a dataset built here splits as designed there.
compo::ToyPolicy reference_policy(const PolicyOptions& o) {
  compo::PolicyShape shape;
  shape.vocab_size = o.vocab;
  shape.features = o.features;
  shape.embedding_seed = o.seed;
  return compo::ToyPolicy::random(shape, o.seed, o.scale);
}

void add_policy_options(CLI::App* cmd, PolicyOptions& o) {
  cmd->add_option("--seed", o.seed, "Reference policy seed");
  cmd->add_option("--vocab", o.vocab, "Vocabulary size")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--features", o.features, "Feature width")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--policy-scale", o.scale, "Std of the reference parameters")->check(CLI::PositiveNumber);
}

void print_manifest(const compo::RunManifest& m) {
  for (const auto& k : m.criteria) {
    std::printf("[%s] %s: %s\n", k.pass ? "PASS" : "FAIL", k.name.c_str(), k.detail.c_str());
  }
  for (const auto& w : m.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("%s: wrote %zu artifacts (%.2fs)\n", m.mode.c_str(), m.artifacts.size(), m.wall_clock_seconds);
  if (!m.artifacts.empty()) std::printf("manifest: %s\n", m.artifacts.back().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison-oracle preference optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  compo::ConfigOverrides overrides;
  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", overrides.seed, "Override the config seed");
  run->add_option("--out", overrides.out_dir, "Override the output directory");
  run->add_option("--preset", overrides.preset, "mistral-7b, llama-3-8b or gemma-2-9b");

  std::string suite = "all";
  std::uint64_t bench_seed = 0;
  std::string bench_out = compo::default_out_dir();
  auto* bench = app.add_subcommand("bench", "Run the validation suites");
  bench->add_option("--suite", suite, "Suite to run")->check(CLI::IsMember({"lemma", "proposition", "sweep", "all"}));
  bench->add_option("--seed", bench_seed, "Seed");
  bench->add_option("--out", bench_out, "Output directory (one subdirectory per suite)");

  std::string dataset_path;
  double delta = 3.0;
  std::string split_out;
  PolicyOptions split_policy;
  auto* split = app.add_subcommand("split", "Split a preference dataset by reference margin");
  split->add_option("--dataset", dataset_path, "JSON-lines dataset")->required()->check(CLI::ExistingFile);
  split->add_option("--delta", delta, "Margin threshold")->required()->check(CLI::PositiveNumber);
  split->add_option("--out", split_out, "Write split_report.csv here instead of stdout");
  add_policy_options(split, split_policy);

  std::string gen_out;
  compo::SyntheticDatasetSpec gen_spec;
  PolicyOptions gen_policy;
  auto* gen = app.add_subcommand("dataset", "Write a synthetic preference dataset");
  gen->add_option("--out", gen_out, "Output .jsonl path")->required();
  gen->add_option("--n-clean", gen_spec.n_clean, "Pairs with |margin| > delta");
  gen->add_option("--n-noisy", gen_spec.n_noisy, "Pairs with |margin| <= delta");
  gen->add_option("--delta", gen_spec.delta, "Margin threshold")->check(CLI::PositiveNumber);
  add_policy_options(gen, gen_policy);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const compo::RunManifest m = compo::run_experiment(compo::parse_config(config_path, overrides));
      print_manifest(m);
      return m.exit_code();
    }
    if (*bench) {
      int code = 0;
      for (const char* name : {"lemma", "proposition", "sweep"}) {
        if (suite != "all" && suite != name) continue;
        const std::string dir = (std::filesystem::path(bench_out) / name).string();
        const std::string text = std::string("{\"mode\": \"bench-") + name + "\", \"seed\": " +
                                 std::to_string(bench_seed) + "}";
        const compo::RunManifest m = compo::run_experiment(compo::parse_config_text(text, {{}, dir, {}}));
        print_manifest(m);
        code = std::max(code, m.exit_code());
      }
      return code;
    }
    if (*split) {
      const auto data = compo::read_preference_jsonl(dataset_path);
      const auto result = compo::split_by_margin(reference_policy(split_policy), data, delta);
      const std::string csv = compo::to_csv(compo::to_table(result));
      if (split_out.empty()) {
        std::cout << csv;
      } else {
        std::filesystem::create_directories(split_out);
        compo::write_text_file((std::filesystem::path(split_out) / "split_report.csv").string(), csv);
      }
      std::fprintf(stderr, "%zu pairs: %zu clean, %zu noisy (delta = %g)\n", data.size(), result.clean.size(),
                   result.noisy.size(), delta);
      return 0;
    }
    if (*gen) {
      gen_spec.seed = gen_policy.seed;
      const auto data = compo::make_synthetic_dataset(reference_policy(gen_policy), gen_spec);
      compo::write_preference_jsonl(data, gen_out);
      std::fprintf(stderr, "wrote %zu pairs to %s\n", data.size(), gen_out.c_str());
      return 0;
    }
  } catch (const compo::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
