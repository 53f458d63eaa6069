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

// Extremes of the Rayleigh quotient v^T G v over {||v|| = 1, v >= 0}.
//
// Any local extremum v* with support K satisfies G[K,K] v*_K = lambda v*_K,
// so enumerating every support K and keeping the eigenvectors of G[K,K]
// that have a nonnegative representative yields a finite candidate set that
// contains both extremes. Supports are visited by increasing cardinality and
// then lexicographically; that order fixes every tie-break below.

#pragma once

#include <vector>

#include "condmeas/densela.hpp"
#include "condmeas/matrix.hpp"

namespace condmeas {

struct SupportCertificate {
  Subset support;      // K, sorted
  double eigenvalue;   // lambda >= 0
  Vector witness;      // unit, length m, zero off K, >= -nonneg_atol on K
  double value;        // sqrt(lambda)
  bool degenerate = false;  // found inside a multi-dimensional eigenspace
};

struct ConeExtreme {
  double value;
  SupportCertificate cert;
};

// Explicit PSD matrix G.
std::vector<SupportCertificate> cone_candidates(const Matrix& g, const Tolerances& tol = {},
                                                const Caps& caps = {});
ConeExtreme cone_max(const Matrix& g, const Tolerances& tol = {}, const Caps& caps = {});
ConeExtreme cone_min(const Matrix& g, const Tolerances& tol = {}, const Caps& caps = {});

// Same contracts for G = F F^T given the factor F (m x n). Eigenpairs of each
// G[K,K] come from a one-sided Jacobi sweep over F[K,:]^T, so small
// eigenvalues keep their relative accuracy. cone_min_factor(A) is
// min_{v >= 0, ||v|| = 1} ||A^T v||.
std::vector<SupportCertificate> cone_candidates_factor(const Matrix& f, const Tolerances& tol = {},
                                                       const Caps& caps = {});
ConeExtreme cone_max_factor(const Matrix& f, const Tolerances& tol = {}, const Caps& caps = {});
ConeExtreme cone_min_factor(const Matrix& f, const Tolerances& tol = {}, const Caps& caps = {});

}  // namespace condmeas
