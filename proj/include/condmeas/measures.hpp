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

// Condition measures of a full column rank A (m x n), all by finite
// enumeration:
//
//   chi         max over non-singular n x n row blocks A_J of ||A_J^{-1}||
//   chibar      chi of an orthonormal basis of range(A)
//   hoffman     max over the same blocks of 1 / min_{v>=0,||v||=1} ||A_J^T v||
//   hoffmanbar  hoffman of an orthonormal basis of range(A)
//   renegar     min_{v>=0,||v||=1} ||A^T v||   (needs Ax > 0 solvable)
//   grassmann   1 / renegar of an orthonormal basis of range(A)

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "condmeas/densela.hpp"
#include "condmeas/matrix.hpp"

namespace condmeas {

enum class MeasureKind { chi, chibar, hoffman, hoffmanbar, renegar, grassmann };

inline constexpr MeasureKind kAllMeasures[] = {MeasureKind::chi,        MeasureKind::chibar,
                                               MeasureKind::hoffman,    MeasureKind::hoffmanbar,
                                               MeasureKind::renegar,    MeasureKind::grassmann};

std::string_view to_string(MeasureKind kind) noexcept;
std::optional<MeasureKind> parse_measure(std::string_view name) noexcept;

struct MeasureResult {
  MeasureKind kind;
  double value = 0.0;
  std::optional<Subset> argmax_subset;
  std::vector<Subset> ties;  // every subset within verify_rtol of the max, including argmax
  std::optional<Vector> witness;
  bool degenerate = false;
  std::vector<std::string> notes;

  std::string_view name() const noexcept { return to_string(kind); }
};

MeasureResult chi(const Matrix& a, const Tolerances& tol = {}, const Caps& caps = {});
MeasureResult chibar(const Matrix& a, const Tolerances& tol = {}, const Caps& caps = {});
MeasureResult hoffman(const Matrix& a, const Tolerances& tol = {}, const Caps& caps = {});
// Single cone scan over A A^T; valid only when Ax > 0 is solvable.
MeasureResult hoffman_simple(const Matrix& a, const Tolerances& tol = {}, const Caps& caps = {});
MeasureResult hoffmanbar(const Matrix& a, const Tolerances& tol = {}, const Caps& caps = {});
MeasureResult renegar_distance(const Matrix& a, const Tolerances& tol = {}, const Caps& caps = {});
MeasureResult grassmann(const Matrix& a, const Tolerances& tol = {}, const Caps& caps = {});

MeasureResult compute_measure(MeasureKind kind, const Matrix& a, const Tolerances& tol = {},
                              const Caps& caps = {});

// [A; -A]
Matrix stack_pm(const Matrix& a);

struct StrippedMatrix {
  Matrix matrix;
  std::vector<Index> kept;  // original indices of the surviving rows
};

// Drops rows with norm <= 1e-12 * ||A||. Throws DimensionError if none remain.
StrippedMatrix strip_zero_rows(const Matrix& a, const Tolerances& tol = {});

// (A^T D A)^{-1} A^T D with D = Diag(d), computed from a row-sorted
// Householder QR of D^{1/2} A so that weights spanning many decades stay
// accurate.
Matrix wls_pseudoinverse(const Matrix& a, std::span<const double> d, const Tolerances& tol = {});

// Throws DimensionError on empty / non-finite input and RankDeficientError
// unless rank(A) = n.
void require_full_column_rank(const Matrix& a, const Tolerances& tol = {});

// Calls fn(J) for every n-subset J of [m] in lexicographic order after
// checking C(m, n) against caps.subset_cap.
void for_each_row_subset(Index m, Index n, const Caps& caps,
                         const std::function<void(const Subset&)>& fn);

// Row blocks J (|J| = n) with sigma_min(A_J) > rank_rtol * sigma_max(A), in
// lexicographic order. Row sign flips do not change this set.
std::vector<Subset> nonsingular_blocks(const Matrix& a, const Tolerances& tol = {},
                                       const Caps& caps = {});

// hoffman() restricted to precomputed blocks; lets signature scans classify
// the blocks once.
MeasureResult hoffman_over_blocks(const Matrix& a, const std::vector<Subset>& blocks,
                                  const Tolerances& tol = {});

std::uint64_t binomial(Index m, Index n) noexcept;  // saturates at UINT64_MAX

}  // namespace condmeas
