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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "compo/bench.hpp"
#include "compo/cli/config.hpp"
#include "compo/cli/experiment.hpp"
#include "compo/errors.hpp"
#include "compo/optimizer.hpp"
#include "compo/policy/dpo.hpp"
#include "compo/policy/pipeline.hpp"
#include "compo/sparse_grad.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace compo;

namespace {

ParamVector make_theta(const Vector& values, const std::optional<std::vector<std::size_t>>& scope) {
  if (!scope) return ParamVector(values);
  return ParamVector(values, ScopeMask(*scope, static_cast<std::size_t>(values.size())));
}

BitMeasurementBatch batch_from(const Eigen::MatrixXd& directions, const std::vector<int>& signs) {
  if (static_cast<std::size_t>(directions.rows()) != signs.size()) {
    throw ShapeError("need one sign per direction row");
  }
  BitMeasurementBatch b;
  for (Eigen::Index i = 0; i < directions.rows(); ++i) {
    b.directions.push_back(UnitVector::normalize(directions.row(i).transpose()));
    b.signs.push_back(signs[static_cast<std::size_t>(i)] < 0 ? Sign::minus : Sign::plus);
  }
  b.oracle_calls = signs.size();
  return b;
}

py::dict trajectory_dict(const RunResult& r) {
  py::list rows;
  for (const auto& rec : r.trajectory.records) {
    rows.append(py::dict("iter"_a = rec.iteration, "oracle_calls"_a = rec.oracle_calls,
                         "neg_fraction"_a = rec.negative_fraction, "step"_a = rec.step, "skipped"_a = rec.skipped,
                         "f"_a = rec.f, "grad_norm"_a = rec.grad_norm));
  }
  return py::dict("theta"_a = r.theta.values(), "records"_a = rows,
                  "oracle_calls"_a = r.trajectory.total_oracle_calls(),
                  "best_grad_norm"_a = r.trajectory.best_grad_norm());
}

PreferencePair to_pair(const py::handle& h) {
  const auto t = h.cast<std::tuple<TokenSequence, TokenSequence, TokenSequence>>();
  return {std::get<0>(t), std::get<1>(t), std::get<2>(t), {}};
}

PreferenceDataset to_dataset(const py::iterable& pairs) {
  PreferenceDataset out;
  for (const auto& h : pairs) out.push_back(to_pair(h));
  return out;
}

}  // namespace

PYBIND11_MODULE(_compo, m) {
  m.doc() = "Comparison-oracle optimization core";

  py::register_exception<Error>(m, "CompoError", PyExc_RuntimeError);

  m.def(
      "sample_unit_sphere",
      [](std::size_t dim, std::uint64_t seed) {
        Rng rng(seed);
        return Vector(sample_unit_sphere(dim, rng).values());
      },
      "dim"_a, "seed"_a = 0);

  m.def(
      "compare_function",
      [](const std::function<double(const Vector&)>& f, const Vector& theta, const Vector& theta_prime) {
        return to_int(compare_function(f, ParamVector(theta), ParamVector(theta_prime)));
      },
      "f"_a, "theta"_a, "theta_prime"_a);

  m.def(
      "solve_1bge_exact", [](const Vector& c, std::size_t s) { return solve_1bge_exact(c, s).direction; }, "c"_a,
      "s"_a);
  m.def(
      "estimate_normalized_clip",
      [](const Eigen::MatrixXd& directions, const std::vector<int>& signs, double lambda_g) {
        return estimate_normalized_clip(batch_from(directions, signs), lambda_g).direction;
      },
      "directions"_a, "signs"_a, "lambda_g"_a);
  m.def("clip_small_entries", &clip_small_entries, "v"_a, "lambda_g"_a);

  m.def(
      "schedule_from_theorem",
      [](double epsilon, double Lambda, double ell, double Delta, std::size_t s, std::size_t d, double c_m) {
        const TheoremSchedule t = schedule_from_theorem(epsilon, Lambda, ell, Delta, s, d, c_m);
        return py::dict("T"_a = t.T, "eta"_a = t.eta, "radius"_a = t.radius, "m"_a = t.m);
      },
      "epsilon"_a, "Lambda"_a, "ell"_a, "Delta"_a, "s"_a, "d"_a, "c_m"_a = 1.0);

  m.def(
      "practical_preset",
      [](const std::string& name) {
        const PracticalConfig c = practical_preset(name);
        return py::dict("radius"_a = c.radius, "m"_a = c.m, "lambda_g"_a = c.lambda_g, "lambda"_a = c.lambda);
      },
      "name"_a);

  py::class_<SyntheticObjective>(m, "SyntheticObjective")
      .def_property_readonly("dim", &SyntheticObjective::dim)
      .def_property_readonly("support", &SyntheticObjective::support)
      .def_property_readonly("ell", &SyntheticObjective::ell)
      .def_property_readonly("infimum", &SyntheticObjective::infimum)
      .def("value", &SyntheticObjective::value, "theta"_a)
      .def("gradient", &SyntheticObjective::gradient, "theta"_a)
      .def(
          "point_with_gradient_norm",
          [](const SyntheticObjective& f, double norm, std::uint64_t seed) {
            Rng rng(seed);
            return f.point_with_gradient_norm(norm, rng);
          },
          "grad_norm"_a, "seed"_a = 0);
  m.def("make_sparse_quadratic", &make_sparse_quadratic, "d"_a, "s"_a, "seed"_a);
  m.def("make_nonconvex_sparse", &make_nonconvex_sparse, "d"_a, "s"_a, "seed"_a, "alpha"_a = 3.0);

  m.def(
      "check_sign_agreement",
      [](const SyntheticObjective& f, const Vector& theta, double epsilon, std::size_t samples, std::uint64_t seed) {
        Rng rng(seed);
        const SignAgreementReport r = check_sign_agreement(f, theta, epsilon, samples, rng);
        return py::dict("fraction"_a = r.fraction, "std_error"_a = r.std_error, "radius"_a = r.radius);
      },
      "f"_a, "theta"_a, "epsilon"_a, "samples"_a = 100000, "seed"_a = 0);

  m.def(
      "run_basic",
      [](const SyntheticObjective& f, const Vector& theta0, double epsilon, double Lambda, double c_m,
         std::uint64_t seed, std::size_t workers) {
        py::gil_scoped_release release;
        const TheoremSchedule s =
            schedule_from_theorem(epsilon, Lambda, f.ell(), f.gap(theta0), f.sparsity(), f.dim(), c_m);
        const Diagnostics diag = f.diagnostics();
        RunOptions opts;
        opts.workers = workers;
        opts.diagnostics = &diag;
        opts.stop_below = epsilon;
        Rng rng(seed);
        RunResult r = run_basic(f.oracle(), ParamVector(theta0), s, rng, opts);
        py::gil_scoped_acquire acquire;
        return trajectory_dict(r);
      },
      "f"_a, "theta0"_a, "epsilon"_a = 0.1, "Lambda"_a = 0.1, "c_m"_a = 1.0, "seed"_a = 0, "workers"_a = 1);

  m.def(
      "run_practical",
      [](const std::function<double(const Vector&)>& f, const Vector& theta0, std::size_t T, std::size_t m_,
         double radius, double gamma, double lambda, double lambda_g,
         const std::optional<std::vector<std::size_t>>& scope, std::uint64_t seed) {
        PracticalConfig c;
        c.T = T;
        c.m = m_;
        c.radius = radius;
        c.gamma = gamma;
        c.lambda = lambda;
        c.lambda_g = lambda_g;
        c.seed = seed;
        if (scope) c.scope = ScopeMask(*scope, static_cast<std::size_t>(theta0.size()));
        // Python objectives run on the calling thread; the wrapper re-acquires the GIL per call.
        RunResult r = [&] {
          py::gil_scoped_release release;
          return run_practical(make_function_oracle(f), make_theta(theta0, std::nullopt), c);
        }();
        return trajectory_dict(r);
      },
      "f"_a, "theta0"_a, "T"_a = 10, "m"_a = 100, "radius"_a = 1e-3, "gamma"_a = 1.0, "lambda_"_a = 0.2,
      "lambda_g"_a = 0.0, "scope"_a = std::nullopt, "seed"_a = 0);

  py::class_<ToyPolicy>(m, "ToyPolicy")
      .def(py::init([](std::size_t vocab_size, std::size_t features, std::uint64_t seed, double scale) {
             PolicyShape s;
             s.vocab_size = vocab_size;
             s.features = features;
             s.embedding_seed = seed;
             return scale == 0.0 ? ToyPolicy(s) : ToyPolicy::random(s, seed, scale);
           }),
           "vocab_size"_a = 8, "features"_a = 8, "seed"_a = 0, "scale"_a = 0.5)
      .def_property_readonly("params", &ToyPolicy::params)
      .def_property_readonly("num_params", py::overload_cast<>(&ToyPolicy::num_params, py::const_))
      .def("with_params", &ToyPolicy::with_params, "params"_a)
      .def(
          "log_likelihood",
          [](const ToyPolicy& p, const TokenSequence& x, const TokenSequence& y) { return p.log_likelihood(x, y); },
          "prompt"_a, "response"_a)
      .def("output_layer_scope", [](const ToyPolicy& p) { return p.output_layer_scope().indices(); });

  m.def(
      "dpo_loss",
      [](const ToyPolicy& p, const ToyPolicy& ref, const py::iterable& pairs, double beta) {
        return dpo_loss(p, ref, to_dataset(pairs), beta);
      },
      "policy"_a, "ref"_a, "pairs"_a, "beta"_a = 0.1);
  m.def(
      "dpo_grad",
      [](const ToyPolicy& p, const ToyPolicy& ref, const py::iterable& pairs, double beta) {
        return dpo_grad(p, ref, to_dataset(pairs), beta);
      },
      "policy"_a, "ref"_a, "pairs"_a, "beta"_a = 0.1);
  m.def(
      "split_by_margin",
      [](const ToyPolicy& ref, const py::iterable& pairs, double delta) {
        const SplitDataset s = split_by_margin(ref, to_dataset(pairs), delta);
        return py::dict("clean"_a = s.clean_indices, "noisy"_a = s.noisy_indices);
      },
      "ref"_a, "pairs"_a, "delta"_a = 3.0);

  m.def(
      "run_experiment",
      [](const std::string& config_json, std::optional<std::string> out_dir) {
        ConfigOverrides o;
        o.out_dir = std::move(out_dir);
        const RunConfig c = parse_config_text(config_json, o);
        RunManifest man = [&] {
          py::gil_scoped_release release;
          return run_experiment(c);
        }();
        py::list criteria;
        for (const auto& k : man.criteria) {
          criteria.append(py::dict("name"_a = k.name, "pass"_a = k.pass, "detail"_a = k.detail));
        }
        return py::dict("mode"_a = man.mode, "pass"_a = man.pass(), "artifacts"_a = man.artifacts,
                        "criteria"_a = criteria, "warnings"_a = man.warnings);
      },
      "config_json"_a, "out_dir"_a = std::nullopt);
}
