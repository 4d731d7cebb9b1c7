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

#include <cstdint>
#include <utility>

namespace compo {

/// Counter-based deterministic generator.
///
/// The state is a 64-bit key (derived from the seed and stream) plus a draw
/// counter; the n-th output is a pure function of (key, n), so results do not
/// depend on platform or standard-library distribution details. Independent
/// substreams are derived from the key alone, which lets perturbation i of
/// iteration t be regenerated without replaying any other draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair();
  double normal() { return normal_pair().first; }

  /// Skip `n` draws.
  void discard(std::uint64_t n) { counter_ += n; }

  /// Stream keyed by (this key, a, b); does not depend on or touch the counter.
  Rng substream(std::uint64_t a, std::uint64_t b = 0) const;

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace compo
