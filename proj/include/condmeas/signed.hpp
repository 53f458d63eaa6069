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

// Row-sign scans and executable checks of the identities tying chi to the
// Hoffman, Renegar and Grassmann measures of the sign-flipped matrices SA.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condmeas/densela.hpp"
#include "condmeas/matrix.hpp"

namespace condmeas {

// Diagonal of a signature matrix; every entry is +1 or -1.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<int> signs);

  Index size() const noexcept { return signs_.size(); }
  int operator[](Index i) const noexcept { return signs_[i]; }
  const std::vector<int>& signs() const noexcept { return signs_; }
  std::string str() const;  // e.g. "+--"

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<int> signs_;
};

// k-th signature of length m in binary-counter order: bit (m - 1 - i) of k
// set means row i is flipped, so m = 2 yields ++, +-, -+, --.
Signature signature_at(Index m, std::uint64_t k);

// All 2^m signatures in counter order. Throws CapExceededError when m
// exceeds caps.signature_cap.
std::vector<Signature> enumerate_signatures(Index m, const Caps& caps = {});

Matrix apply_signature(const Signature& s, const Matrix& a);

struct FeasibilityDecision {
  bool feasible = false;
  Vector x;       // Ax > 0 componentwise, when feasible
  Vector gordan;  // v >= 0, ||v|| = 1, ||A^T v|| <= feas_tol, when not
  double gap = 0.0;  // min_{v>=0,||v||=1} ||A^T v||
};

// Gordan's alternative decided through the cone minimum of A A^T. A feasible
// answer always carries an x that was checked by substitution.
FeasibilityDecision strictly_feasible(const Matrix& a, const Tolerances& tol = {},
                                      const Caps& caps = {});

enum class CheckKind { equality, upper_bound };

struct VerificationReport {
  std::string identity;
  std::string statement;
  CheckKind kind = CheckKind::equality;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = false;
  std::optional<Signature> signature;
  std::vector<Subset> subsets;
  std::vector<Vector> vectors;
  std::vector<std::string> notes;
};

// Equality passes when rel_err <= verify_rtol, or abs_err <= verify_rtol with
// both sides below 1. Upper bound passes when lhs <= rhs * (1 + verify_rtol).
VerificationReport make_report(std::string identity, std::string statement, double lhs,
                               double rhs, const Tolerances& tol,
                               CheckKind kind = CheckKind::equality);

struct SignedScan {
  double value = 0.0;
  Signature argmax;
  std::uint64_t argmax_index = 0;
  std::size_t scanned = 0;
  std::size_t feasible = 0;
  double chi = 0.0;
  VerificationReport report;  // value against chi(A)
};

// max over S (optionally only strictly feasible SA) of hoffman(SA); the first
// signature in counter order attaining the max is reported.
SignedScan signed_max_hoffman(const Matrix& a, bool filter_feasible, const Tolerances& tol = {},
                              const Caps& caps = {}, std::size_t threads = 1);

// One report per applicable identity. The seed draws the random right factor
// for the range-invariance checks.
std::vector<VerificationReport> verify_identities(const Matrix& a, const Tolerances& tol,
                                                  std::uint64_t seed, const Caps& caps = {},
                                                  std::size_t threads = 1);

// Well-conditioned random n x n matrix (condition number below 100).
Matrix random_nonsingular(Index n, std::uint64_t seed);

}  // namespace condmeas
