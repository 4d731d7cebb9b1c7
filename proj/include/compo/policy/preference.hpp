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

#include <optional>
#include <string>
#include <vector>

namespace compo {

using TokenSequence = std::vector<int>;

/// One (prompt, preferred, dispreferred) triple.
struct PreferencePair {
  TokenSequence prompt;
  TokenSequence preferred;
  TokenSequence dispreferred;
  /// log pi_ref(preferred | prompt) - log pi_ref(dispreferred | prompt), set by the splitter.
  std::optional<double> ref_margin;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

using PreferenceDataset = std::vector<PreferencePair>;

/// Reads the JSON-lines layout: one object per line with integer arrays
/// "prompt", "preferred", "dispreferred" (and optionally "ref_margin").
/// Blank lines are skipped. Throws IoError / ConfigError with the line number.
PreferenceDataset read_preference_jsonl(const std::string& path);

void write_preference_jsonl(const PreferenceDataset& data, const std::string& path);

}  // namespace compo
