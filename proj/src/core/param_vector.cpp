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

#include "compo/core/param_vector.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "compo/errors.hpp"

namespace compo {

ScopeMask::ScopeMask(std::vector<std::size_t> indices, std::size_t dim)
    : indices_(std::move(indices)), dim_(dim) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= dim_) {
      throw ShapeError("scope index " + std::to_string(indices_[i]) + " out of range for dimension " +
                       std::to_string(dim_));
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw ShapeError("scope indices must be strictly increasing");
    }
  }
  if (indices_.empty()) throw ShapeError("scope mask must not be empty");
}

ScopeMask ScopeMask::range(std::size_t first, std::size_t count, std::size_t dim) {
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = first + i;
  return ScopeMask(std::move(idx), dim);
}

UnitVector UnitVector::normalize(Vector v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("cannot normalize a zero or non-finite vector");
  }
  v /= norm;
  return UnitVector(std::move(v));
}

ParamVector::ParamVector(Vector values, std::optional<ScopeMask> scope)
    : values_(std::move(values)), scope_(std::move(scope)) {
  if (!values_.allFinite()) throw InvalidArgument("parameter vector has non-finite entries");
  if (scope_ && scope_->dim() != dim()) {
    throw ShapeError("scope mask built for dimension " + std::to_string(scope_->dim()) +
                     ", parameters have dimension " + std::to_string(dim()));
  }
}

ParamVector ParamVector::with_scope(std::optional<ScopeMask> scope) const {
  return ParamVector(values_, std::move(scope));
}

Vector ParamVector::scoped_values() const {
  if (!scope_) return values_;
  Vector out(static_cast<Eigen::Index>(scope_->size()));
  const auto& idx = scope_->indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = values_[static_cast<Eigen::Index>(idx[i])];
  }
  return out;
}

ParamVector ParamVector::shifted(const Vector& delta) const {
  if (static_cast<std::size_t>(delta.size()) != scope_dim()) {
    throw ShapeError("shift has length " + std::to_string(delta.size()) + ", scope has " +
                     std::to_string(scope_dim()));
  }
  Vector out = values_;
  if (scope_) {
    const auto& idx = scope_->indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out[static_cast<Eigen::Index>(idx[i])] += delta[static_cast<Eigen::Index>(i)];
    }
  } else {
    out += delta;
  }
  return ParamVector(std::move(out), scope_);
}

std::uint64_t ParamVector::hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &values_[i], sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

UnitVector sample_unit_sphere(std::size_t dim, Rng& rng) {
  if (dim == 0) throw InvalidDimension("unit sphere dimension must be at least 1");
  const auto n = static_cast<Eigen::Index>(dim);
  Vector v(n);
  // Redraw on the (probability ~0) all-zero Gaussian sample.
  do {
    Eigen::Index i = 0;
    for (; i + 1 < n; i += 2) {
      const auto [a, b] = rng.normal_pair();
      v[i] = a;
      v[i + 1] = b;
    }
    if (i < n) v[i] = rng.normal();
  } while (v.squaredNorm() == 0.0);
  return UnitVector::normalize(std::move(v));
}

ParamVector embed_perturbation(const ParamVector& theta, const UnitVector& z, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("perturbation radius must be positive");
  if (z.size() != theta.scope_dim()) {
    throw ShapeError("direction has length " + std::to_string(z.size()) + ", scope has " +
                     std::to_string(theta.scope_dim()));
  }
  return theta.shifted(radius * z.values());
}

}  // namespace compo
