// Copyright 2026 The condmeas Authors
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
#include <vector>

namespace condmeas {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch, malformed input, invalid tolerance, non-finite entry.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

class NonSymmetricError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured cap (subsets, supports or
// signatures).
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// Ax > 0 has no solution. Carries the Gordan vector v >= 0, ||v|| = 1 with
// ||A^T v|| <= feas_tol.
class NotStrictlyFeasibleError : public Error {
 public:
  NotStrictlyFeasibleError(const std::string& what, std::vector<double> certificate,
                           double residual)
      : Error(what), certificate_(std::move(certificate)), residual_(residual) {}

  const std::vector<double>& certificate() const noexcept { return certificate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> certificate_;
  double residual_;
};

// The polyhedron {z : Gz <= h} is empty.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Numerical breakdown that should not happen for valid inputs.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace condmeas
