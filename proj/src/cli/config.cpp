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

#include "compo/cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "compo/bench.hpp"
#include "compo/errors.hpp"

namespace compo {
namespace {

using nlohmann::json;

template <class T>
struct is_optional : std::false_type {};
template <class T>
struct is_optional<std::optional<T>> : std::true_type {};

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

[[noreturn]] void bad_type(const std::string& name, const char* expected) {
  throw ConfigError("field '" + name + "' must be " + expected);
}

template <class T>
T read_value(const json& j, const std::string& name) {
  if constexpr (is_optional<T>::value) {
    if (j.is_null()) return std::nullopt;
    return read_value<typename T::value_type>(j, name);
  } else if constexpr (is_vector<T>::value) {
    if (!j.is_array()) bad_type(name, "an array");
    T out;
    for (const auto& e : j) out.push_back(read_value<typename T::value_type>(e, name));
    return out;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) bad_type(name, "a boolean");
    return j.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) bad_type(name, "a string");
    return j.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!j.is_number()) bad_type(name, "a number");
    return j.get<T>();
  } else {
    static_assert(std::is_unsigned_v<T>);
    if (!j.is_number_unsigned()) bad_type(name, "a non-negative integer");
    return j.get<T>();
  }
}

template <class T>
json write_value(const T& v) {
  if constexpr (is_optional<T>::value) {
    return v ? write_value(*v) : json(nullptr);
  } else {
    return json(v);
  }
}

struct Field {
  std::string name;
  std::function<void(RunConfig&, const json&)> read;
  std::function<json(const RunConfig&)> write;
};

template <class T>
Field field(std::string name, T RunConfig::*member) {
  return Field{name, [member, name](RunConfig& c, const json& j) { c.*member = read_value<T>(j, name); },
               [member](const RunConfig& c) { return write_value(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(Field{"mode", [](RunConfig& c, const json& j) { c.mode = parse_mode(read_value<std::string>(j, "mode")); },
                      [](const RunConfig& c) { return json(to_string(c.mode)); }});
    f.push_back(field("seed", &RunConfig::seed));
    f.push_back(field("out_dir", &RunConfig::out_dir));
    f.push_back(field("preset", &RunConfig::preset));
    f.push_back(field("workers", &RunConfig::workers));
    f.push_back(field("objective", &RunConfig::objective));
    f.push_back(field("d", &RunConfig::d));
    f.push_back(field("s", &RunConfig::s));
    f.push_back(field("alpha", &RunConfig::alpha));
    f.push_back(field("initial_grad_norm", &RunConfig::initial_grad_norm));
    f.push_back(field("epsilon", &RunConfig::epsilon));
    f.push_back(field("Lambda", &RunConfig::Lambda));
    f.push_back(field("ell", &RunConfig::ell));
    f.push_back(field("Delta", &RunConfig::Delta));
    f.push_back(field("c_m", &RunConfig::c_m));
    f.push_back(field("stop_at_epsilon", &RunConfig::stop_at_epsilon));
    f.push_back(field("gamma", &RunConfig::gamma));
    f.push_back(field("radius", &RunConfig::radius));
    f.push_back(field("m", &RunConfig::m));
    f.push_back(field("lambda_g", &RunConfig::lambda_g));
    f.push_back(field("lambda", &RunConfig::lambda));
    f.push_back(field("lambda_quantile", &RunConfig::lambda_quantile));
    f.push_back(field("T", &RunConfig::T));
    f.push_back(field("scope", &RunConfig::scope));
    f.push_back(field("dataset", &RunConfig::dataset));
    f.push_back(field("n_clean", &RunConfig::n_clean));
    f.push_back(field("n_noisy", &RunConfig::n_noisy));
    f.push_back(field("delta", &RunConfig::delta));
    f.push_back(field("beta", &RunConfig::beta));
    f.push_back(field("dpo_learning_rate", &RunConfig::dpo_learning_rate));
    f.push_back(field("dpo_epochs", &RunConfig::dpo_epochs));
    f.push_back(field("compo_epochs", &RunConfig::compo_epochs));
    f.push_back(field("pairs_per_iteration", &RunConfig::pairs_per_iteration));
    f.push_back(field("vocab_size", &RunConfig::vocab_size));
    f.push_back(field("features", &RunConfig::features));
    f.push_back(field("policy_scale", &RunConfig::policy_scale));
    f.push_back(field("output_layer_only", &RunConfig::output_layer_only));
    f.push_back(field("samples", &RunConfig::samples));
    f.push_back(field("trials", &RunConfig::trials));
    f.push_back(field("kept_probability", &RunConfig::kept_probability));
    f.push_back(field("tau", &RunConfig::tau));
    f.push_back(field("dims", &RunConfig::dims));
    f.push_back(field("bench_seeds", &RunConfig::bench_seeds));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& name) {
  for (const auto& f : fields()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

void apply_mode_defaults(RunConfig& c) {
  const std::string tag = "default:" + to_string(c.mode);
  auto set = [&](const char* name, auto RunConfig::*member, auto value) {
    c.*member = value;
    c.provenance[name] = tag;
  };
  switch (c.mode) {
    case Mode::bench_lemma:
      set("d", &RunConfig::d, std::size_t{100});
      set("epsilon", &RunConfig::epsilon, 1.0);
      break;
    case Mode::bench_proposition:
      set("d", &RunConfig::d, std::size_t{500});
      break;
    case Mode::practical:
      set("d", &RunConfig::d, std::size_t{50});
      break;
    default:
      break;
  }
}

void apply_preset(RunConfig& c, const std::string& name, const std::string& tag) {
  const PracticalConfig p = practical_preset(name);
  c.radius = p.radius;
  c.m = p.m;
  c.lambda_g = p.lambda_g;
  c.lambda = p.lambda;
  c.delta = 3.0;
  for (const char* f : {"radius", "m", "lambda_g", "lambda", "delta"}) c.provenance[f] = tag;
}

[[noreturn]] void out_of_range(const std::string& name, const std::string& value, const std::string& bounds) {
  throw RangeError("field '" + name + "' = " + value + " is out of range; expected " + bounds);
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_open_unit(const std::string& name, double v) {
  if (!(v > 0.0 && v < 1.0)) out_of_range(name, num(v), "0 < " + name + " < 1");
}

void require_positive(const std::string& name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) out_of_range(name, num(v), name + " > 0");
}

void require_nonnegative(const std::string& name, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) out_of_range(name, num(v), name + " >= 0");
}

void require_at_least_one(const std::string& name, std::size_t v) {
  if (v < 1) out_of_range(name, std::to_string(v), name + " >= 1");
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::basic:
      return "basic";
    case Mode::practical:
      return "practical";
    case Mode::pipeline:
      return "pipeline";
    case Mode::bench_lemma:
      return "bench-lemma";
    case Mode::bench_proposition:
      return "bench-proposition";
    case Mode::bench_sweep:
      return "bench-sweep";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::basic, Mode::practical, Mode::pipeline, Mode::bench_lemma, Mode::bench_proposition,
                 Mode::bench_sweep}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mode '" + name +
                    "' (expected basic, practical, pipeline, bench-lemma, bench-proposition or bench-sweep)");
}

bool operator==(const RunConfig& a, const RunConfig& b) { return config_to_json(a) == config_to_json(b); }

std::string default_out_dir() {
  const char* env = std::getenv("COMPO_OUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("compo_out");
}

RunConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides) {
  json doc = json::object();
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("malformed config: ") + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  std::vector<std::string> missing;
  for (const char* req : {"mode", "seed"}) {
    if (!doc.contains(req)) missing.emplace_back(req);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& n : missing) names += (names.empty() ? "" : ", ") + n;
    throw MissingFieldError("missing required field(s): " + names);
  }
  for (const auto& [key, value] : doc.items()) {
    if (find_field(key) == nullptr) throw ConfigError("unknown field '" + key + "'");
  }

  RunConfig c;
  c.out_dir = default_out_dir();
  for (const auto& f : fields()) c.provenance[f.name] = "default";
  find_field("mode")->read(c, doc["mode"]);
  apply_mode_defaults(c);

  if (!overrides.preset && doc.contains("preset") && !doc["preset"].is_null()) {
    apply_preset(c, read_value<std::string>(doc["preset"], "preset"), "preset:" + doc["preset"].get<std::string>());
  }
  for (const auto& [key, value] : doc.items()) {
    find_field(key)->read(c, value);
    c.provenance[key] = "config";
  }
  if (c.mode == Mode::bench_proposition && c.provenance["m"].rfind("default", 0) == 0) {
    if (c.s >= 1 && c.s <= c.d) {
      c.m = default_recovery_measurements(c.d, c.s);
      c.provenance["m"] = "default:bench-proposition";
    }
  }

  if (overrides.preset) {
    c.preset = *overrides.preset;
    c.provenance["preset"] = "cli";
    apply_preset(c, *overrides.preset, "cli");
  }
  if (overrides.seed) {
    c.seed = *overrides.seed;
    c.provenance["seed"] = "cli";
  }
  if (overrides.out_dir) {
    c.out_dir = *overrides.out_dir;
    c.provenance["out_dir"] = "cli";
  }
  validate(c);
  return c;
}

RunConfig parse_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

void validate(const RunConfig& c) {
  if (c.preset) practical_preset(*c.preset);  // unknown names throw ConfigError
  if (c.out_dir.empty()) throw RangeError("field 'out_dir' must be non-empty");
  require_at_least_one("workers", c.workers);
  if (c.objective != "quadratic" && c.objective != "nonconvex" && c.objective != "linear") {
    throw RangeError("field 'objective' = '" + c.objective + "' is out of range; expected quadratic, nonconvex or linear");
  }
  require_at_least_one("d", c.d);
  if (c.s < 1 || c.s > c.d) {
    out_of_range("s", std::to_string(c.s), "1 <= s <= d = " + std::to_string(c.d));
  }
  require_nonnegative("alpha", c.alpha);
  require_positive("initial_grad_norm", c.initial_grad_norm);
  require_positive("epsilon", c.epsilon);
  if (c.mode != Mode::bench_lemma) require_open_unit("epsilon", c.epsilon);
  require_open_unit("Lambda", c.Lambda);
  if (c.ell) require_positive("ell", *c.ell);
  if (c.Delta) require_positive("Delta", *c.Delta);
  require_positive("c_m", c.c_m);
  require_positive("gamma", c.gamma);
  require_positive("radius", c.radius);
  require_at_least_one("m", c.m);
  require_nonnegative("lambda_g", c.lambda_g);
  if (!(c.lambda >= 0.0 && c.lambda < 1.0)) out_of_range("lambda", num(c.lambda), "0 <= lambda < 1");
  if (c.lambda_quantile && !(*c.lambda_quantile >= 0.0 && *c.lambda_quantile <= 1.0)) {
    out_of_range("lambda_quantile", num(*c.lambda_quantile), "0 <= lambda_quantile <= 1");
  }
  require_at_least_one("T", c.T);
  if (c.scope) {
    if (c.scope->empty()) throw RangeError("field 'scope' must list at least one coordinate");
    for (std::size_t i = 0; i < c.scope->size(); ++i) {
      if ((*c.scope)[i] >= c.d || (i > 0 && (*c.scope)[i] <= (*c.scope)[i - 1])) {
        throw RangeError("field 'scope' must be strictly increasing indices in [0, d) with d = " + std::to_string(c.d));
      }
    }
  }
  require_positive("delta", c.delta);
  require_positive("beta", c.beta);
  require_positive("dpo_learning_rate", c.dpo_learning_rate);
  require_at_least_one("pairs_per_iteration", c.pairs_per_iteration);
  if (c.vocab_size < 2) out_of_range("vocab_size", std::to_string(c.vocab_size), "vocab_size >= 2");
  if (c.features < 2) out_of_range("features", std::to_string(c.features), "features >= 2");
  require_positive("policy_scale", c.policy_scale);
  require_at_least_one("samples", c.samples);
  require_at_least_one("trials", c.trials);
  if (!(c.kept_probability > 0.5 && c.kept_probability <= 1.0)) {
    out_of_range("kept_probability", num(c.kept_probability), "0.5 < kept_probability <= 1");
  }
  require_positive("tau", c.tau);
  if (c.dims.empty()) throw RangeError("field 'dims' must be non-empty");
  for (std::size_t d : c.dims) {
    if (d < c.s) out_of_range("dims", std::to_string(d), "every entry >= s = " + std::to_string(c.s));
  }
  if (c.bench_seeds.empty()) throw RangeError("field 'bench_seeds' must be non-empty");
}

std::string config_to_json(const RunConfig& c) {
  json doc = json::object();
  for (const auto& f : fields()) doc[f.name] = f.write(c);
  return doc.dump(2) + "\n";
}

PracticalConfig practical_config(const RunConfig& c) {
  PracticalConfig p;
  p.gamma = c.gamma;
  p.radius = c.radius;
  p.m = c.m;
  p.lambda_g = c.lambda_g;
  p.lambda = c.lambda;
  p.T = c.T;
  if (c.scope) p.scope = ScopeMask(*c.scope, c.d);
  p.seed = c.seed;
  p.pairs_per_iteration = c.pairs_per_iteration;
  return p;
}

}  // namespace compo
