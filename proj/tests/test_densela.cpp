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

#include "condmeas/densela.hpp"
#include "condmeas/errors.hpp"
#include "condmeas/signed.hpp"
#include "support.hpp"

using namespace condmeas;
using condmeas::testing::kPhi;

TEST_CASE("sigma_extremes examples") {
  auto s = sigma_extremes(Matrix::identity(2));
  CHECK(s.min == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.max == doctest::Approx(1.0).epsilon(1e-14));

  // Gram [[2,1],[1,1]] has characteristic polynomial l^2 - 3l + 1.
  s = sigma_extremes(Matrix{{1, 0}, {1, 1}});
  CHECK(s.min == doctest::Approx(std::sqrt((3 - std::sqrt(5.0)) / 2)).epsilon(1e-13));
  CHECK(s.max == doctest::Approx(std::sqrt((3 + std::sqrt(5.0)) / 2)).epsilon(1e-13));
  CHECK(s.min == doctest::Approx(1 / kPhi).epsilon(1e-13));

  s = sigma_extremes(Matrix{{3, 0}, {0, 0}});
  CHECK(s.min == 0.0);
  CHECK(s.max == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("operator_norm examples") {
  CHECK(operator_norm(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(operator_norm(Matrix{{1, 0}, {0, 1}, {1, 1}}) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(operator_norm(Matrix{{3}, {4}}) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("sym_eig examples") {
  const Vector d{2, 1};
  auto e = sym_eig(Matrix::diagonal(d));
  REQUIRE(e.size() == 2);
  CHECK(e[0].value == 2.0);
  CHECK(e[1].value == 1.0);
  CHECK(std::abs(e[0].vector[0]) == doctest::Approx(1.0));
  CHECK(std::abs(e[1].vector[1]) == doctest::Approx(1.0));

  e = sym_eig(Matrix{{1, 1}, {1, 2}});
  CHECK(e[0].value == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(e[1].value == doctest::Approx((3 - std::sqrt(5.0)) / 2).epsilon(1e-14));

  CHECK_THROWS_AS(sym_eig(Matrix{{1, 2}, {0, 1}}), NonSymmetricError);
  CHECK_THROWS_AS(sym_eig(Matrix(2, 3)), DimensionError);
}

TEST_CASE("sym_eig of B^T B matches squared singular values") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Matrix b = testing::gaussian(5, 3, rng);
    const auto e = sym_eig(b.inner_gram());
    const Vector s = singular_values(b);
    REQUIRE(s.size() == 3);
    for (Index k = 0; k < 3; ++k)
      CHECK(e[k].value == doctest::Approx(s[k] * s[k]).epsilon(1e-10));
  }
}

TEST_CASE("sym_eig reconstruction on 1000 random symmetric matrices") {
  std::mt19937_64 rng(12);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Index n = 1 + static_cast<Index>(t % 8);
    const Matrix g = testing::random_symmetric(n, rng);
    const auto e = sym_eig(g);
    Matrix rec(n, n);
    for (const auto& p : e) {
      CHECK(norm2(p.vector) == doctest::Approx(1.0).epsilon(1e-13));
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) rec(i, j) += p.value * p.vector[i] * p.vector[j];
    }
    for (Index k = 1; k < e.size(); ++k) CHECK(e[k - 1].value >= e[k].value);
    worst = std::max(worst, operator_norm(g - rec) / operator_norm(g));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("gram_eig keeps tiny eigenvalues of ill-conditioned factors") {
  // Columns (1, 0) and (1, 1e-9): sigma_min ~ 7.07e-10, squared ~ 5e-19,
  // far below eps * ||G|| where the explicit Gram route loses it.
  const Matrix m{{1, 1}, {0, 1e-9}};
  const auto e = gram_eig(m);
  const Vector s = singular_values(m);
  CHECK(e[1].value == doctest::Approx(s[1] * s[1]).epsilon(1e-8));
  CHECK(s[0] * s[1] == doctest::Approx(1e-9).epsilon(1e-10));  // |det|
}

TEST_CASE("qr_orthonormal examples") {
  CHECK(max_abs_diff(qr_orthonormal(Matrix::identity(3)), Matrix::identity(3)) <= 1e-15);

  const Matrix q = qr_orthonormal(Matrix{{2, 0}, {0, 0}, {0, 3}});
  REQUIRE(q.cols() == 2);
  CHECK(std::abs(q(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(q(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(q(1, 0)) + std::abs(q(1, 1)) <= 1e-15);

  const Matrix a{{1, 0}, {0, 1}, {1, 1}};
  const Matrix qa = qr_orthonormal(a);
  CHECK(max_abs_diff(qa.inner_gram(), Matrix::identity(2)) <= 1e-14);
  // Same range: the projectors agree, and A is reproduced by Q Q^T A.
  const Matrix p = qa * qa.transpose();
  CHECK(max_abs_diff(p * a, a) <= 1e-14);
  CHECK(max_abs_diff(range_projector(a), p) <= 1e-14);

  CHECK_THROWS_AS(qr_orthonormal(Matrix(3, 2)), RankDeficientError);
}

TEST_CASE("qr_orthonormal is idempotent on its own output") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const Matrix a = testing::gaussian(6, 1 + t % 4, rng);
    const Matrix q = qr_orthonormal(a);
    const Matrix q2 = qr_orthonormal(q);
    CHECK(max_abs_diff(q * q.transpose(), q2 * q2.transpose()) <= 1e-10);
  }
}

TEST_CASE("solve_square examples") {
  const Vector b{3, -2};
  const Vector x = solve_square(Matrix::identity(2), b);
  CHECK(x[0] == 3.0);
  CHECK(x[1] == -2.0);

  const Vector y = solve_square(Matrix{{1, 0}, {1, 1}}, Vector{1, 2});
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(solve_square(Matrix{{1, 1}, {1, 1}}, Vector{1, 2}), SingularError);
  CHECK_THROWS_AS(solve_square(Matrix::identity(2), Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("rank_of examples") {
  CHECK(rank_of(Matrix::identity(3)) == 3);
  CHECK(rank_of(Matrix{{1, 1}, {1, 1}}) == 1);
  CHECK(rank_of(Matrix{{1, 0}, {0, 1}, {1, 1}}) == 2);
  CHECK(rank_of(Matrix(2, 2)) == 0);
}

TEST_CASE("householder_qr reproduces A") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 50; ++t) {
    const Matrix a = testing::gaussian(5, 3, rng);
    const ThinQr f = householder_qr(a);
    CHECK(max_abs_diff(f.q * f.r, a) <= 1e-13);
    CHECK(max_abs_diff(f.q.inner_gram(), Matrix::identity(3)) <= 1e-14);
    for (Index i = 1; i < 3; ++i)
      for (Index j = 0; j < i; ++j) CHECK(f.r(i, j) == 0.0);
  }
}

TEST_CASE("sigma_extremes transpose symmetry and sign invariance of the norm") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 200; ++t) {
    const Index m = 1 + t % 6, n = 1 + (t / 6) % 5;
    const Matrix a = testing::gaussian(m, n, rng);
    const auto s = sigma_extremes(a);
    const auto st = sigma_extremes(a.transpose());
    CHECK(std::abs(s.min - st.min) <= 1e-10);
    CHECK(std::abs(s.max - st.max) <= 1e-10);
    const Signature sig = signature_at(m, static_cast<std::uint64_t>(t) % (1u << m));
    CHECK(std::abs(operator_norm(apply_signature(sig, a)) - s.max) <= 1e-12 * s.max);
  }
}

TEST_CASE("singularity classification is relative to the whole matrix") {
  // Scaling A by any positive factor leaves rank decisions unchanged.
  const Matrix a{{1, 0}, {0, 1e-12}, {1, 1}};
  for (double s : {1e-8, 1.0, 1e8}) CHECK(rank_of(a.scaled(s)) == rank_of(a));
}

TEST_CASE("tolerance validation") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  t.verify_rtol = 0.0;
  CHECK_THROWS_AS(t.validate(), DimensionError);
  t = {};
  t.feas_tol = 0.5;
  CHECK_THROWS_AS(t.validate(), DimensionError);
}
