/* Copyright 2026 The Kerrblock Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kerrblock {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock space too small for the requested construction.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered where finite numbers are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the caller's input was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. t outside [0, T]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or schema-violating configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Budget quantity undefined for the given parameters (e.g. kappa_e = 0).
class UndefinedPowerError : public Error {
 public:
  using Error::Error;
};

/// Step doubling hit its cap before reaching the tolerance. Carries the
/// finest estimate computed so that callers may still use it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::MatrixXcd best, double estimate, long steps)
      : Error(what), best_(std::move(best)), estimate_(estimate), steps_(steps) {}

  const Eigen::MatrixXcd& best() const noexcept { return best_; }
  double estimate() const noexcept { return estimate_; }
  long steps() const noexcept { return steps_; }

 private:
  Eigen::MatrixXcd best_;
  double estimate_;
  long steps_;
};

}  // namespace kerrblock
