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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "condmeas/errors.hpp"
#include "condmeas/measures.hpp"
#include "condmeas/signed.hpp"
#include "support.hpp"

using namespace condmeas;
using condmeas::testing::kPhi;
using condmeas::testing::rel_diff;

namespace {

const Matrix kGolden{{1, 0}, {0, 1}, {1, 1}};

// max over non-singular square blocks of ||A A_J^{-1}||, solved column by
// column; an independent route to chibar.
double chibar_by_blocks(const Matrix& a) {
  const Index m = a.rows(), n = a.cols();
  double best = 0.0;
  for_each_row_subset(m, n, {}, [&](const Subset& j) {
    const Matrix aj = a.select_rows(j);
    if (sigma_extremes(aj).min <= 1e-10 * operator_norm(a)) return;
    Matrix inv(n, n);
    for (Index c = 0; c < n; ++c) {
      Vector e(n, 0.0);
      e[c] = 1.0;
      const Vector x = solve_square(aj, e);
      for (Index r = 0; r < n; ++r) inv(r, c) = x[r];
    }
    best = std::max(best, operator_norm(a * inv));
  });
  return best;
}

bool strictly_feasible_input(const Matrix& a) { return strictly_feasible(a).feasible; }

}  // namespace

TEST_CASE("chi examples") {
  CHECK(chi(Matrix::identity(3)).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(chi(Matrix{{1}, {1}}).value == doctest::Approx(1.0).epsilon(1e-14));

  const MeasureResult r = chi(kGolden);
  CHECK(std::abs(r.value - kPhi) <= 1e-12);
  REQUIRE(r.argmax_subset);
  CHECK(*r.argmax_subset == Subset{0, 2});
  CHECK(std::find(r.ties.begin(), r.ties.end(), Subset{1, 2}) != r.ties.end());
  // Witness v with ||A_J^T v|| = 1 and ||v|| = chi.
  REQUIRE(r.witness);
  CHECK(norm2(*r.witness) == doctest::Approx(r.value).epsilon(1e-12));
}

TEST_CASE("chibar examples") {
  CHECK(chibar(Matrix::identity(2)).value == doctest::Approx(1.0).epsilon(1e-14));
  const double cb = chibar(kGolden).value;
  CHECK(cb >= 1.0);
  CHECK(cb <= std::sqrt(3.0) * kPhi);
  CHECK(std::abs(cb - chibar_by_blocks(kGolden)) <= 1e-12);
  CHECK(std::abs(cb - std::sqrt(3.0)) <= 1e-12);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix r = random_nonsingular(2, s);
    CHECK(rel_diff(chibar(kGolden * r).value, cb) <= 1e-7);
  }
}

TEST_CASE("orthonormal columns: bar measures equal the plain ones") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const Matrix q = qr_orthonormal(testing::gaussian(3 + t % 4, 1 + t % 3, rng));
    CHECK(rel_diff(chibar(q).value, chi(q).value) <= 1e-10);
    CHECK(rel_diff(hoffmanbar(q).value, hoffman(q).value) <= 1e-10);
    if (strictly_feasible_input(q))
      CHECK(rel_diff(grassmann(q).value, 1.0 / renegar_distance(q).value) <= 1e-10);
  }
}

TEST_CASE("hoffman examples") {
  CHECK(hoffman(Matrix::identity(3)).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(hoffman(kGolden).value - 1.0) <= 1e-12);
  const MeasureResult r = hoffman(Matrix{{1, 0}, {0, -1}, {-1, -1}});
  CHECK(std::abs(r.value - kPhi) <= 1e-12);
  REQUIRE(r.argmax_subset);
  CHECK(*r.argmax_subset == Subset{0, 2});
}

TEST_CASE("hoffman_simple examples") {
  CHECK(hoffman_simple(Matrix::identity(2)).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hoffman_simple(Matrix{{1}, {1}}).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(hoffman_simple(kGolden).value - hoffman(kGolden).value) <= 1e-12);
  CHECK_THROWS_AS(hoffman_simple(Matrix{{1}, {-1}}), NotStrictlyFeasibleError);
}

TEST_CASE("renegar examples") {
  CHECK(renegar_distance(Matrix::identity(2)).value == doctest::Approx(1.0).epsilon(1e-14));
  const MeasureResult r = renegar_distance(kGolden);
  CHECK(std::abs(r.value - 1.0) <= 1e-12);
  CHECK(!r.notes.empty());
  try {
    renegar_distance(Matrix{{1}, {-1}});
    FAIL("expected NotStrictlyFeasibleError");
  } catch (const NotStrictlyFeasibleError& e) {
    REQUIRE(e.certificate().size() == 2);
    CHECK(e.certificate()[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(e.certificate()[1] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(e.residual() <= 1e-8);
  }
}

TEST_CASE("grassmann examples") {
  CHECK(grassmann(Matrix::identity(2)).value == doctest::Approx(1.0).epsilon(1e-14));
  // range(A) has unit normal n = (1,1,-1)/sqrt(3), so v^T P v = 1 - (n.v)^2,
  // minimized over unit v >= 0 at (1,1,0)/sqrt(2) with value 1/3.
  const double g = grassmann(kGolden).value;
  CHECK(g >= 1.0);
  CHECK(g <= std::sqrt(3.0) * (1 + 1e-12));
  CHECK(std::abs(g - std::sqrt(3.0)) <= 1e-12);
  for (std::uint64_t s = 0; s < 20; ++s)
    CHECK(rel_diff(grassmann(kGolden * random_nonsingular(2, s)).value, g) <= 1e-7);
}

TEST_CASE("hoffmanbar right invariance on the golden matrix") {
  const double hb = hoffmanbar(kGolden).value;
  for (std::uint64_t s = 0; s < 20; ++s)
    CHECK(rel_diff(hoffmanbar(kGolden * random_nonsingular(2, s + 1000)).value, hb) <= 1e-7);
}

TEST_CASE("stack_pm and strip_zero_rows") {
  CHECK(stack_pm(Matrix{{1}}) == Matrix{{1}, {-1}});
  CHECK(stack_pm(Matrix::identity(2)) == Matrix{{1, 0}, {0, 1}, {-1, 0}, {0, -1}});

  const StrippedMatrix s = strip_zero_rows(Matrix{{1, 0}, {0, 0}, {0, 1}});
  CHECK(s.matrix == Matrix::identity(2));
  CHECK(s.kept == std::vector<Index>{0, 2});
  const StrippedMatrix t = strip_zero_rows(kGolden);
  CHECK(t.matrix == kGolden);
  CHECK(t.kept == std::vector<Index>{0, 1, 2});
}

TEST_CASE("wls_pseudoinverse examples") {
  const Matrix a{{1}, {1}};
  Matrix p = wls_pseudoinverse(a, Vector{1, 1});
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  p = wls_pseudoinverse(a, Vector{3, 1});
  CHECK(p(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(wls_pseudoinverse(a, Vector{1, 0}), DimensionError);
  CHECK_THROWS_AS(wls_pseudoinverse(a, Vector{1, 1, 1}), DimensionError);
}

TEST_CASE("wls_pseudoinverse is a left inverse for extreme weights") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-8, 8);
  for (int t = 0; t < 100; ++t) {
    const Matrix a = testing::gaussian(5, 3, rng);
    Vector d(5);
    for (auto& x : d) x = std::pow(10.0, u(rng));
    CHECK(max_abs_diff(wls_pseudoinverse(a, d) * a, Matrix::identity(3)) <= 1e-8);
  }
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(chi(Matrix{{1, 2}, {2, 4}}), RankDeficientError);
  CHECK_THROWS_AS(chi(Matrix{{1, 2}}), RankDeficientError);
  CHECK_THROWS_AS(chi(Matrix{}), DimensionError);
  Matrix nan{{1}, {0}};
  nan(1, 0) = std::nan("");
  CHECK_THROWS_AS(chi(nan), DimensionError);
  Caps caps;
  caps.subset_cap = 5;
  CHECK(binomial(6, 3) == 20);
  const Matrix tall = testing::random_corpus(12, 1).back();  // 5 x 3
  REQUIRE(binomial(tall.rows(), tall.cols()) > caps.subset_cap);
  CHECK_THROWS_AS(chi(tall, {}, caps), CapExceededError);
  CHECK_NOTHROW(chi(Matrix::identity(6), {}, caps));  // C(6, 6) = 1
}

TEST_CASE("parse_measure round trip") {
  for (MeasureKind k : kAllMeasures) CHECK(parse_measure(to_string(k)) == k);
  CHECK(!parse_measure("kappa"));
}

TEST_CASE("measure properties on a random corpus") {
  const auto corpus = testing::random_corpus(84, 33);
  for (const Matrix& a : corpus) {
    const double c = chi(a).value, cb = chibar(a).value;
    const double h = hoffman(a).value, hb = hoffmanbar(a).value;
    const double na = operator_norm(a);
    CHECK(h <= c * (1 + 1e-9));
    CHECK(cb <= na * c * (1 + 1e-9));
    CHECK(hb <= na * h * (1 + 1e-9));
    CHECK(rel_diff(chi(stack_pm(a)).value, c) <= 1e-7);
    CHECK(rel_diff(hoffman(stack_pm(a)).value, c) <= 1e-7);
    CHECK(std::abs(cb - chibar_by_blocks(a)) <= 1e-9 * cb);

    const Index m = a.rows();
    for (std::uint64_t k = 0; k < (1u << m); k += 1 + (k % 3)) {
      const Matrix sa = apply_signature(signature_at(m, k), a);
      CHECK(rel_diff(chi(sa).value, c) <= 1e-7);
      CHECK(rel_diff(chibar(sa).value, cb) <= 1e-7);
    }
    if (strictly_feasible_input(a)) {
      const double r = renegar_distance(a).value;
      CHECK(std::abs(h * r - 1.0) <= 1e-7);
      CHECK(rel_diff(hoffman_simple(a).value, h) <= 1e-9);
      CHECK(grassmann(a).value <= na / r * (1 + 1e-9));
    }
  }
}
