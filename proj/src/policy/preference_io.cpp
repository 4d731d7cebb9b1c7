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

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "compo/errors.hpp"
#include "compo/policy/preference.hpp"

namespace compo {
namespace {

TokenSequence read_tokens(const nlohmann::json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end()) {
    throw MissingFieldError("line " + std::to_string(line) + ": missing field '" + field + "'");
  }
  if (!it->is_array() || it->empty()) {
    throw ConfigError("line " + std::to_string(line) + ": '" + field + "' must be a non-empty integer array");
  }
  TokenSequence out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number_integer()) {
      throw ConfigError("line " + std::to_string(line) + ": '" + field + "' contains a non-integer token");
    }
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

PreferenceDataset read_preference_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  PreferenceDataset out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
    }
    if (!obj.is_object()) throw ConfigError(path + ":" + std::to_string(line) + ": expected a JSON object");
    PreferencePair pair{read_tokens(obj, "prompt", line), read_tokens(obj, "preferred", line),
                        read_tokens(obj, "dispreferred", line), std::nullopt};
    if (auto it = obj.find("ref_margin"); it != obj.end() && it->is_number()) pair.ref_margin = it->get<double>();
    out.push_back(std::move(pair));
  }
  return out;
}

void write_preference_jsonl(const PreferenceDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset '" + path + "'");
  for (const auto& pair : data) {
    nlohmann::json obj{{"prompt", pair.prompt}, {"preferred", pair.preferred}, {"dispreferred", pair.dispreferred}};
    if (pair.ref_margin) obj["ref_margin"] = *pair.ref_margin;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("failed writing dataset '" + path + "'");
}

}  // namespace compo
