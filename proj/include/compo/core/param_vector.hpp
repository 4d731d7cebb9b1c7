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

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "compo/core/rng.hpp"

namespace compo {

using Vector = Eigen::VectorXd;

/// Sorted, unique, in-range coordinate subset of a parameter vector.
/// Indices are zero-based.
class ScopeMask {
 public:
  /// Throws ShapeError unless `indices` is strictly increasing and every index < dim.
  ScopeMask(std::vector<std::size_t> indices, std::size_t dim);

  /// Contiguous range [first, first + count).
  static ScopeMask range(std::size_t first, std::size_t count, std::size_t dim);

  std::size_t size() const { return indices_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::size_t>& indices() const { return indices_; }

  friend bool operator==(const ScopeMask&, const ScopeMask&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t dim_;
};

/// Unit-norm vector; only obtainable through normalization.
class UnitVector {
 public:
  /// Throws InvalidArgument if `v` is zero or not finite.
  static UnitVector normalize(Vector v);

  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  explicit UnitVector(Vector v) : values_(std::move(v)) {}
  Vector values_;
};

/// Dense finite parameter vector with an optional perturbation scope.
class ParamVector {
 public:
  /// Throws InvalidArgument on non-finite entries, ShapeError on a mask of the wrong dim.
  explicit ParamVector(Vector values, std::optional<ScopeMask> scope = std::nullopt);

  std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
  /// |S| when a scope is set, otherwise dim().
  std::size_t scope_dim() const { return scope_ ? scope_->size() : dim(); }

  const Vector& values() const { return values_; }
  const std::optional<ScopeMask>& scope() const { return scope_; }

  ParamVector with_scope(std::optional<ScopeMask> scope) const;

  /// Coordinates in S, in mask order.
  Vector scoped_values() const;

  /// Copy with theta[S] += delta; coordinates outside S are copied verbatim.
  ParamVector shifted(const Vector& delta) const;

  /// FNV-1a over the raw bytes of the values.
  std::uint64_t hash() const;

 private:
  Vector values_;
  std::optional<ScopeMask> scope_;
};

/// Uniform draw from the unit sphere in `dim` dimensions: normalized standard Gaussians.
UnitVector sample_unit_sphere(std::size_t dim, Rng& rng);

/// theta with theta[S] + radius * z; requires z.size() == theta.scope_dim() and radius > 0.
ParamVector embed_perturbation(const ParamVector& theta, const UnitVector& z, double radius);

}  // namespace compo
