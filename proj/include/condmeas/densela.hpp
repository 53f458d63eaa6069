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

// Small dense linear-algebra kernel: Jacobi eigensolvers, singular-value
// extremes, orthonormal range bases and square solves. Sized for m <= ~20.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "condmeas/matrix.hpp"

namespace condmeas {

struct Tolerances {
  double rank_rtol = 1e-10;    // sigma_min(A_J) > rank_rtol * sigma_max(A)
  double nonneg_atol = 1e-9;   // slack on entrywise nonnegativity of unit eigenvectors
  double feas_tol = 1e-8;      // cone_min(AA^T) <= feas_tol => not strictly feasible
  double verify_rtol = 1e-7;   // identity checks

  // Throws DimensionError unless every field lies in (0, 1e-2).
  void validate() const;
};

// Enumeration caps. Raising them is allowed; there is no way to disable them.
struct Caps {
  std::uint64_t subset_cap = 100000;  // C(m, n) for submatrix scans
  std::size_t signature_cap = 16;     // m for 2^m signature scans
  std::size_t support_cap = 20;       // m for 2^m support scans in coneig
};

struct EigenPair {
  double value;
  Vector vector;  // unit norm
};

struct SigmaExtremes {
  double min;
  double max;
};

// Singular values in descending order, min(m, n) of them.
Vector singular_values(const Matrix& a);

SigmaExtremes sigma_extremes(const Matrix& a);

double operator_norm(const Matrix& a);

// Cyclic Jacobi on a symmetric matrix. Eigenvalues descending (stable).
std::vector<EigenPair> sym_eig(const Matrix& g);

// Eigenpairs of M^T M without forming it (one-sided Jacobi on the columns of
// M). Small eigenvalues keep high relative accuracy, which the explicit Gram
// route loses once cond(M)^2 approaches 1/eps.
std::vector<EigenPair> gram_eig(const Matrix& m);

// Orthonormal basis of range(A), one column per numerical rank direction.
Matrix qr_orthonormal(const Matrix& a, const Tolerances& tol = {});

Vector solve_square(const Matrix& a, std::span<const double> b, const Tolerances& tol = {});

// LU with partial pivoting. Returns nullopt when a pivot drops below
// pivot_rtol * max|a_ij|. No singular-value check; meant for hot loops.
std::optional<Vector> lu_solve(Matrix a, Vector b, double pivot_rtol = 1e-13);

Index rank_of(const Matrix& a, const Tolerances& tol = {});

// Thin Householder QR of a tall matrix (m >= n): A = Q R, Q m x n with
// orthonormal columns, R upper triangular n x n.
struct ThinQr {
  Matrix q;
  Matrix r;
};
ThinQr householder_qr(const Matrix& a);

// Orthogonal projector onto range(A).
Matrix range_projector(const Matrix& a, const Tolerances& tol = {});

}  // namespace condmeas
