// Copyright 2026 The Erasehead Authors
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

namespace erasehead {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidModeError : public Error {
  using Error::Error;
};
class LookupError : public Error {
  using Error::Error;
};
class ShapeError : public Error {
  using Error::Error;
};
class ConfigError : public Error {
  using Error::Error;
};
/// Missing section or field, or an unknown key.
class SchemaError : public ConfigError {
  using ConfigError::ConfigError;
};
/// A field value outside its allowed range.
class RangeError : public ConfigError {
  using ConfigError::ConfigError;
};
class CapabilityError : public Error {
  using Error::Error;
};
class PreconditionError : public Error {
  using Error::Error;
};

/// Raised when the idling point is requested with a vanishing parasitic coupling.
class DivisionByZeroError : public Error {
  using Error::Error;
};

/// Raised when a dispersive formula is evaluated at zero detuning.
class ResonantRegimeError : public Error {
  using Error::Error;
};

/// Trace/norm drift, non-real expectation values, inconsistent cross-checks.
class IntegrityError : public Error {
  using Error::Error;
};

/// Step-size underflow in the adaptive integrator.
class StiffnessError : public Error {
  using Error::Error;
};

}  // namespace erasehead
