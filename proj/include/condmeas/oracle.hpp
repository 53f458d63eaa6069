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

// Independent cross-checks for the enumeration formulas. Everything here
// goes back to the defining sup/max (weighted least squares over sampled
// weights, exact polyhedral projections, raw Rayleigh samples) and never
// through the subset formulas it is meant to bound.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "condmeas/densela.hpp"
#include "condmeas/matrix.hpp"

namespace condmeas {

struct MeasureResult;

struct RngConfig {
  std::uint64_t seed = 0;
  std::size_t sample_count = 10000;
  double weight_log_range = 6.0;  // weights log-uniform in [10^-r, 10^r]

  void validate() const;
};

// Samples are drawn in fixed-size streams whose seeds depend only on
// (seed, stream index), so results do not depend on the thread count.
inline constexpr std::size_t kSamplesPerStream = 256;
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

struct WeightSample {
  double best = 0.0;
  Vector best_weights;
};

// max over sampled d of ||A_D^+||.
WeightSample sample_chi_lower(const Matrix& a, const RngConfig& rng, const Tolerances& tol = {},
                              std::size_t threads = 1);

// max over sampled d of ||A A_D^+||.
WeightSample sample_chibar_lower(const Matrix& a, const RngConfig& rng,
                                 const Tolerances& tol = {}, std::size_t threads = 1);

// ||A_D^+|| with weight 1e8 on the rows of `block` and 1 elsewhere. As the
// weight grows this tends to ||A_J^{-1}||.
double directed_chi_witness(const Matrix& a, const Subset& block, const Tolerances& tol = {});

// argmin ||Cz - d|| subject to Gz <= h by active-set enumeration: every
// constraint subset F with G_F of full row rank, by cardinality then
// lexicographically; the first KKT point (primal and dual feasible) wins.
// Throws InfeasibleError when no subset yields a feasible point and
// RankDeficientError when C lacks full column rank.
Vector constrained_lsq(const Matrix& c, std::span<const double> d, const Matrix& g,
                       std::span<const double> h, const Tolerances& tol = {});

struct RatioSample {
  double max_ratio = 0.0;
  std::size_t samples = 0;  // samples with an infeasible start point
};

// dist(x0, {x : Ax <= b}) / ||(A x0 - b)_+|| for a single pair; 0 when x0 is
// already feasible.
double hoffman_ratio(const Matrix& a, std::span<const double> b, std::span<const double> x0,
                     const Tolerances& tol = {});

// dist(y, A{x : Ax <= b}) / ||(y - b)_+|| for y in range(A), given y = A z0.
double hoffmanbar_ratio(const Matrix& a, std::span<const double> b, std::span<const double> z0,
                        const Tolerances& tol = {});

RatioSample hoffman_ratio_sample(const Matrix& a, const RngConfig& rng,
                                 const Tolerances& tol = {}, std::size_t threads = 1);
RatioSample hoffmanbar_ratio_sample(const Matrix& a, const RngConfig& rng,
                                    const Tolerances& tol = {}, std::size_t threads = 1);

// Error-bound ratio of the instance built from a hoffman() certificate:
// tight constraints on the witness support, every other row slack, start
// point moved along A^T v. Its ratio equals the certified value.
double hoffman_ratio_guided(const Matrix& a, const MeasureResult& hoffman_result,
                            const Tolerances& tol = {});

struct ConeSampleRange {
  double min_seen = 0.0;
  double max_seen = 0.0;
};

// sqrt(v^T G v) over uniform unit v >= 0 (normalized |gaussian|).
ConeSampleRange cone_sample_check(const Matrix& g, const RngConfig& rng,
                                  std::size_t threads = 1);

}  // namespace condmeas
