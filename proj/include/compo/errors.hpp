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

#include <stdexcept>
#include <string>

namespace compo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dimension argument was zero or otherwise unusable.
class InvalidDimension : public Error {
 public:
  using Error::Error;
};

/// Two vectors (or a vector and a mask) disagree in shape.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Generic precondition failure on a scalar argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The objective or likelihood behind an oracle produced NaN.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

/// A preference batch was empty.
class InvalidBatch : public Error {
 public:
  using Error::Error;
};

/// The signed sum of measurement directions is exactly zero.
class DegenerateMeasurement : public Error {
 public:
  using Error::Error;
};

class InvalidSchedule : public Error {
 public:
  using Error::Error;
};

class VocabularyError : public Error {
 public:
  using Error::Error;
};

/// A bench check was invoked outside the regime it is meant to test.
class InvalidTest : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingFieldError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class RangeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace compo
