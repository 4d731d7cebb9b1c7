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

#include "compo/cli/export.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "compo/errors.hpp"

namespace compo {
namespace {

using ojson = nlohmann::ordered_json;

Cell opt(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }
Cell integer(std::size_t v) { return Cell(static_cast<std::int64_t>(v)); }

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(bool v) const { return v ? "1" : "0"; }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
      std::string out = "\"";
      for (char ch : v) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
  };
  return std::visit(Visitor{}, cell);
}

ojson json_cell(const Cell& cell) {
  struct Visitor {
    ojson operator()(std::monostate) const { return nullptr; }
    ojson operator()(std::int64_t v) const { return v; }
    ojson operator()(double v) const { return v; }
    ojson operator()(bool v) const { return v; }
    ojson operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

Cell cell_from_json(const ojson& j) {
  if (j.is_null()) return {};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ConfigError("table cells must be null, boolean, number or string");
}

}  // namespace

Table to_table(const Trajectory& trajectory) {
  Table t{{"iter", "oracle_calls", "neg_fraction", "step", "skipped", "f", "grad_norm"}, {}};
  for (const auto& r : trajectory.records) {
    t.rows.push_back({integer(r.iteration), integer(r.oracle_calls), r.negative_fraction, r.step, r.skipped, opt(r.f),
                      opt(r.grad_norm)});
  }
  return t;
}

Table to_table(const SplitDataset& split) {
  Table t{{"index", "subset", "ref_margin"}, {}};
  std::vector<std::pair<std::size_t, std::vector<Cell>>> rows;
  for (std::size_t k = 0; k < split.clean.size(); ++k) {
    rows.push_back({split.clean_indices[k], {integer(split.clean_indices[k]), std::string("clean"),
                                             opt(split.clean[k].ref_margin)}});
  }
  for (std::size_t k = 0; k < split.noisy.size(); ++k) {
    rows.push_back({split.noisy_indices[k], {integer(split.noisy_indices[k]), std::string("noisy"),
                                             opt(split.noisy[k].ref_margin)}});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& r : rows) t.rows.push_back(std::move(r.second));
  return t;
}

Table to_table(std::span<const LikelihoodRow> rows) {
  Table t{{"pair_index", "before_preferred", "before_dispreferred", "after_preferred", "after_dispreferred",
           "delta_preferred", "delta_dispreferred"},
          {}};
  for (const auto& r : rows) {
    t.rows.push_back({integer(r.pair_index), r.before_preferred, r.before_dispreferred, r.after_preferred,
                      r.after_dispreferred, r.delta_preferred(), r.delta_dispreferred()});
  }
  return t;
}

Table to_table(const ScalingReport& report) {
  Table t{{"d", "seed", "m", "T", "iterations", "calls", "best_grad_norm"}, {}};
  for (const auto& c : report.cells) {
    t.rows.push_back({integer(c.d), static_cast<std::int64_t>(c.seed), integer(c.m), integer(c.T),
                      integer(c.iterations), c.calls ? integer(*c.calls) : Cell(), c.best_grad_norm});
  }
  return t;
}

Table scaling_rows_table(const ScalingReport& report) {
  Table t{{"d", "mean_calls", "converged", "runs"}, {}};
  for (const auto& r : report.rows) {
    t.rows.push_back({integer(r.d), r.mean_calls, integer(r.converged), integer(r.runs)});
  }
  return t;
}

Table to_table(const EstimatorErrorReport& report) {
  Table t{{"trial", "error"}, {}};
  for (std::size_t k = 0; k < report.errors.size(); ++k) t.rows.push_back({integer(k), report.errors[k]});
  return t;
}

Table to_table(const SignAgreementReport& report) {
  return Table{{"samples", "radius", "grad_norm", "fraction", "std_error"},
               {{integer(report.samples), report.radius, report.grad_norm, report.fraction, report.std_error}}};
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  ojson rows = ojson::array();
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ShapeError("table row width differs from its header");
    ojson obj = ojson::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(obj));
  }
  ojson doc = ojson::object();
  doc["columns"] = table.columns;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

Table table_from_json(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("malformed table JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") || !doc.contains("rows") || !doc["columns"].is_array() ||
      !doc["rows"].is_array()) {
    throw ConfigError("table JSON needs 'columns' and 'rows' arrays");
  }
  Table t;
  for (const auto& c : doc["columns"]) {
    if (!c.is_string()) throw ConfigError("column names must be strings");
    t.columns.push_back(c.get<std::string>());
  }
  for (const auto& obj : doc["rows"]) {
    if (!obj.is_object()) throw ConfigError("table rows must be objects");
    std::vector<Cell> row;
    for (const auto& c : t.columns) {
      if (!obj.contains(c)) throw ConfigError("row is missing column '" + c + "'");
      row.push_back(cell_from_json(obj[c]));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void export_results(const Table& table, const std::string& path, ExportFormat format) {
  write_text_file(path, format == ExportFormat::csv ? to_csv(table) : to_json(table));
}

std::string policy_to_json(const ToyPolicy& policy) {
  const PolicyShape& s = policy.shape();
  ojson doc = ojson::object();
  doc["shape"] = {{"vocab_size", s.vocab_size},
                  {"features", s.features},
                  {"max_context", s.max_context},
                  {"decay", s.decay},
                  {"embedding_seed", s.embedding_seed}};
  doc["params"] = std::vector<double>(policy.params().data(), policy.params().data() + policy.params().size());
  return doc.dump() + "\n";
}

ToyPolicy policy_from_json(const std::string& text) {
  try {
    const ojson doc = ojson::parse(text);
    const auto& sj = doc.at("shape");
    PolicyShape shape;
    shape.vocab_size = sj.at("vocab_size").get<std::size_t>();
    shape.features = sj.at("features").get<std::size_t>();
    shape.max_context = sj.at("max_context").get<std::size_t>();
    shape.decay = sj.at("decay").get<double>();
    shape.embedding_seed = sj.at("embedding_seed").get<std::uint64_t>();
    const auto params = doc.at("params").get<std::vector<double>>();
    return ToyPolicy(shape, Eigen::Map<const Vector>(params.data(), static_cast<Eigen::Index>(params.size())));
  } catch (const ojson::exception& e) {
    throw ConfigError(std::string("malformed policy JSON: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace compo
