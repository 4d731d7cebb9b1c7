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
#include <string>

#include "compo/errors.hpp"
#include "compo/optimizer.hpp"

namespace compo {
namespace {

// ceil that ignores floating-point noise just above an integer (e.g. 10 / 0.1^2).
std::size_t ceil_count(double x) {
  const double c = std::ceil(x - 1e-9 * std::max(1.0, std::abs(x)));
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw InvalidSchedule(std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidSchedule(std::string(name) + " must be positive and finite, got " + std::to_string(v));
  }
}

}  // namespace

TheoremSchedule schedule_from_theorem(double epsilon, double Lambda, double ell, double Delta, std::size_t s,
                                      std::size_t d, double c_m) {
  require_open_unit(epsilon, "epsilon");
  require_open_unit(Lambda, "Lambda");
  require_positive(ell, "ell");
  require_positive(Delta, "Delta");
  require_positive(c_m, "c_m");
  if (s < 1 || s > d) {
    throw InvalidSchedule("sparsity must satisfy 1 <= s <= d (s=" + std::to_string(s) + ", d=" + std::to_string(d) +
                          ")");
  }

  TheoremSchedule out;
  out.epsilon = epsilon;
  out.Lambda = Lambda;
  out.ell = ell;
  out.Delta = Delta;
  out.s = s;
  out.d = d;
  out.c_m = c_m;

  const double sd = static_cast<double>(s);
  const double dd = static_cast<double>(d);
  out.T = ceil_count(10.0 * ell * Delta / (epsilon * epsilon));
  out.eta = std::sqrt(2.0 * Delta / (ell * static_cast<double>(out.T)));
  out.radius = epsilon / (40.0 * ell * std::sqrt(dd));
  out.m = ceil_count(c_m * (sd * std::log(2.0 * dd / sd) + std::log(ell * Delta / (Lambda * epsilon * epsilon))));
  return out;
}

}  // namespace compo
