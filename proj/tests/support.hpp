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

// Shared helpers for the test binaries: seeded random matrices and the
// acceptance corpus.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "condmeas/densela.hpp"
#include "condmeas/matrix.hpp"

namespace condmeas::testing {

inline const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

inline Matrix gaussian(Index m, Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = nd(rng);
  return a;
}

inline Matrix random_symmetric(Index n, std::mt19937_64& rng) {
  Matrix b = gaussian(n, n, rng);
  return b + b.transpose();
}

inline Matrix random_psd(Index m, Index rank, std::mt19937_64& rng) {
  return gaussian(m, rank, rng).outer_gram();
}

// Full column rank Gaussian matrices, m in 2..7 and n in 1..min(4, m),
// cycling through the shapes so every one is represented.
inline std::vector<Matrix> random_corpus(std::size_t count, std::uint64_t seed) {
  std::vector<std::pair<Index, Index>> shapes;
  for (Index m = 2; m <= 7; ++m)
    for (Index n = 1; n <= std::min<Index>(4, m); ++n) shapes.emplace_back(m, n);
  std::mt19937_64 rng(seed);
  std::vector<Matrix> out;
  for (std::size_t k = 0; out.size() < count; ++k) {
    const auto [m, n] = shapes[k % shapes.size()];
    Matrix a = gaussian(m, n, rng);
    if (rank_of(a) == n) out.push_back(std::move(a));
  }
  return out;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace condmeas::testing
