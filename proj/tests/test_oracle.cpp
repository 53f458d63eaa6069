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

#include "condmeas/errors.hpp"
#include "condmeas/measures.hpp"
#include "condmeas/oracle.hpp"
#include "support.hpp"

using namespace condmeas;
using condmeas::testing::kPhi;

namespace {

const Matrix kGolden{{1, 0}, {0, 1}, {1, 1}};
const Matrix kTwisted{{1, 0}, {0, -1}, {-1, -1}};

RngConfig config(std::size_t samples, std::uint64_t seed = 0) {
  RngConfig r;
  r.sample_count = samples;
  r.seed = seed;
  return r;
}

// Smallest distance from x0 to {z : Gz <= h} over a grid on [-r, r]^2 with
// step 2e-3, refined with step 2e-5 around the best point.
double grid_distance(const Vector& x0, const Matrix& g, const Vector& h, double r) {
  double best_d = INFINITY, bx = 0.0, by = 0.0;
  auto visit = [&](double cx, double cy, double half, double step) {
    const int n = static_cast<int>(std::lround(half / step));
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j) {
        const double x = cx + i * step, y = cy + j * step;
        bool ok = true;
        for (Index k = 0; k < g.rows() && ok; ++k) ok = g(k, 0) * x + g(k, 1) * y <= h[k];
        if (!ok) continue;
        const double d = std::hypot(x - x0[0], y - x0[1]);
        if (d < best_d) {
          best_d = d;
          bx = x;
          by = y;
        }
      }
  };
  visit(0.0, 0.0, r, 2e-3);
  visit(bx, by, 4e-3, 2e-5);
  return best_d;
}

}  // namespace

TEST_CASE("sample_chi_lower examples") {
  const WeightSample s = sample_chi_lower(Matrix::identity(3), config(2000));
  CHECK(std::abs(s.best - 1.0) <= 1e-9);

  // ||A_D^+|| = ||(d1, d2)|| / (d1 + d2) for A = [[1],[1]].
  const WeightSample t = sample_chi_lower(Matrix{{1}, {1}}, config(10000));
  CHECK(t.best > 0.99);
  CHECK(t.best <= 1.0 + 1e-12);
  REQUIRE(t.best_weights.size() == 2);
  CHECK(t.best == doctest::Approx(std::hypot(t.best_weights[0], t.best_weights[1]) /
                                  (t.best_weights[0] + t.best_weights[1]))
                      .epsilon(1e-12));
}

TEST_CASE("directed_chi_witness examples") {
  CHECK(directed_chi_witness(Matrix::identity(3), {0, 1, 2}) == doctest::Approx(1.0));
  CHECK(directed_chi_witness(Matrix{{1}, {1}}, {0}) >= 0.999);
  const double w = directed_chi_witness(kGolden, {0, 2});
  CHECK(w >= 0.999 * kPhi);
  CHECK(w <= kPhi * (1 + 1e-7));
}

TEST_CASE("sample_chibar_lower examples") {
  // Exactly 1 for every D; weights over 12 decades cost a few digits.
  CHECK(std::abs(sample_chibar_lower(Matrix::identity(2), config(1000)).best - 1.0) <= 1e-9);
  // Isometry: for orthonormal columns ||Q Q_D^+|| = ||Q_D^+|| sample by sample.
  std::mt19937_64 rng(51);
  const Matrix q = qr_orthonormal(testing::gaussian(5, 2, rng));
  const WeightSample a = sample_chi_lower(q, config(3000, 9));
  const WeightSample b = sample_chibar_lower(q, config(3000, 9));
  CHECK(a.best == doctest::Approx(b.best).epsilon(1e-12));
  CHECK(a.best_weights == b.best_weights);

  const double lower = sample_chibar_lower(kGolden, config(10000)).best;
  CHECK(lower <= chibar(kGolden).value * (1 + 1e-7));
  CHECK(lower >= 1.0);
}

TEST_CASE("constrained_lsq examples") {
  const Matrix i2 = Matrix::identity(2);
  Vector z = constrained_lsq(i2, Vector{2, 0}, i2, Vector{1, 1});
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(z[1]) <= 1e-14);

  z = constrained_lsq(i2, Vector{1, 1}, Matrix{{1, 1}}, Vector{1});
  CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(constrained_lsq(Matrix{{1}}, Vector{0}, Matrix{{1}, {-1}}, Vector{-1, -1}),
                  InfeasibleError);
  CHECK_THROWS_AS(constrained_lsq(Matrix{{1, 1}}, Vector{0}, i2, Vector{1, 1}),
                  RankDeficientError);
}

TEST_CASE("constrained_lsq agrees with a 2-D grid search") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    const Matrix g = testing::gaussian(3 + t % 3, 2, rng);
    // Feasible by construction: b = G xhat + p with p >= 0.
    const Vector xhat{u(rng) * 0.3, u(rng) * 0.3};
    Vector h = g * xhat;
    for (double& x : h) x += std::abs(u(rng));
    const Vector x0{u(rng), u(rng)};
    const Vector z = constrained_lsq(Matrix::identity(2), x0, g, h);
    const Vector gz = g * z;
    for (Index k = 0; k < h.size(); ++k) CHECK(gz[k] <= h[k] + 1e-9);
    const double ref = grid_distance(x0, g, h, 3.0);
    if (!std::isfinite(ref)) continue;
    ++checked;
    // The exact projection is never beaten by a grid point and the grid
    // comes within 1e-3 of it.
    const double dz = std::hypot(z[0] - x0[0], z[1] - x0[1]);
    CHECK(dz <= ref + 1e-12);
    CHECK(ref - dz <= 1e-3);
  }
  CHECK(checked >= 25);
}

TEST_CASE("hoffman_ratio single pairs") {
  // Feasible start point: ratio 0.
  CHECK(hoffman_ratio(Matrix::identity(2), Vector{1, 1}, Vector{0, 0}) == 0.0);
  // Box {x <= 0}: dist = ||x0_+|| = violation, ratio 1.
  CHECK(hoffman_ratio(Matrix::identity(2), Vector{0, 0}, Vector{1, 2}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hoffman_ratio_sample examples") {
  const RatioSample id = hoffman_ratio_sample(Matrix::identity(3), config(2000));
  CHECK(id.max_ratio <= 1.0 + 1e-7);
  CHECK(id.samples > 0);

  const RatioSample g = hoffman_ratio_sample(kGolden, config(10000));
  CHECK(g.max_ratio <= 1.0 + 1e-7);

  const RatioSample tw = hoffman_ratio_sample(kTwisted, config(10000));
  CHECK(tw.max_ratio <= kPhi * (1 + 1e-7));
  const double guided = hoffman_ratio_guided(kTwisted, hoffman(kTwisted));
  CHECK(guided >= 1.0);
  CHECK(guided == doctest::Approx(kPhi).epsilon(1e-9));
}

TEST_CASE("hoffman_ratio_guided reaches H on random matrices") {
  const auto corpus = testing::random_corpus(40, 53);
  for (const Matrix& a : corpus) {
    const MeasureResult h = hoffman(a);
    const double r = hoffman_ratio_guided(a, h);
    CHECK(r <= h.value * (1 + 1e-7));
    CHECK(r >= h.value * (1 - 1e-7));
  }
}

TEST_CASE("hoffmanbar_ratio_sample examples") {
  CHECK(hoffmanbar_ratio_sample(Matrix::identity(2), config(2000)).max_ratio <= 1.0 + 1e-7);

  std::mt19937_64 rng(54);
  const Matrix q = qr_orthonormal(testing::gaussian(4, 2, rng));
  const double h = hoffman(q).value;
  const RatioSample plain = hoffman_ratio_sample(q, config(10000, 3));
  const RatioSample bar = hoffmanbar_ratio_sample(q, config(10000, 3));
  CHECK(plain.max_ratio <= h * (1 + 1e-7));
  CHECK(bar.max_ratio <= h * (1 + 1e-7));
  // Same constant (hoffmanbar = hoffman for orthonormal columns): both
  // samplers should reach a comparable fraction of it.
  CHECK(bar.max_ratio >= 0.5 * h);
  CHECK(plain.max_ratio >= 0.5 * h);

  // 2Q spans the same range, so the bound does not move.
  const RatioSample scaled = hoffmanbar_ratio_sample(q.scaled(2.0), config(10000, 3));
  CHECK(scaled.max_ratio <= hoffmanbar(q).value * (1 + 1e-7));
  CHECK(hoffmanbar(q.scaled(2.0)).value == doctest::Approx(hoffmanbar(q).value).epsilon(1e-12));
}

TEST_CASE("cone_sample_check examples") {
  const ConeSampleRange id = cone_sample_check(Matrix::identity(3), config(5000));
  CHECK(id.min_seen == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.max_seen == doctest::Approx(1.0).epsilon(1e-12));
  const ConeSampleRange r = cone_sample_check(Matrix{{1, 1}, {1, 2}}, config(10000));
  CHECK(r.min_seen >= 1.0 - 1e-12);
  CHECK(r.max_seen <= kPhi + 1e-12);
}

TEST_CASE("samples do not depend on the thread count") {
  const Matrix a = testing::random_corpus(20, 55).back();
  const RngConfig cfg = config(3000, 77);
  const WeightSample one = sample_chi_lower(a, cfg, {}, 1);
  const WeightSample four = sample_chi_lower(a, cfg, {}, 4);
  CHECK(one.best == four.best);
  CHECK(one.best_weights == four.best_weights);
  CHECK(hoffman_ratio_sample(a, cfg, {}, 1).max_ratio ==
        hoffman_ratio_sample(a, cfg, {}, 3).max_ratio);
}

TEST_CASE("rng config validation") {
  RngConfig r;
  r.sample_count = 0;
  CHECK_THROWS_AS(r.validate(), DimensionError);
  r = {};
  r.weight_log_range = -1.0;
  CHECK_THROWS_AS(r.validate(), DimensionError);
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
}

TEST_CASE("constrained_lsq with a tiny constraint row") {
  // Bx >= 1 with a row of norm 1e-6 forces ||x|| ~ 1e6.
  const Matrix b{{1.0, 0.0}, {0.0, 1e-6}};
  const Vector x = constrained_lsq(Matrix::identity(2), Vector{0.0, 0.0}, b.scaled(-1.0),
                                   Vector{-1.0, -1.0});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1e6).epsilon(1e-9));
  // Same tiny row, but rows 3 and 4 leave Ax >= 1 empty.
  const Matrix a{{-0.38046561140602281, 0.17715775179467605},
                 {-0.15751099939107571, 0.46082271997851426},
                 {-1.1543405379988186e-06, 1.6967792042196296e-07},
                 {0.84902181935754428, -0.28363972348343391},
                 {-0.74342236104798365, 0.025319252589265061}};
  CHECK_THROWS_AS(
      constrained_lsq(Matrix::identity(2), Vector{0.0, 0.0}, a.scaled(-1.0), Vector(5, -1.0)),
      InfeasibleError);
}

TEST_CASE("hoffmanbar_ratio on a nearly degenerate vertex") {
  // The projection lands on a vertex with multipliers near 1e5.
  const Matrix a{{-0.044465439463531792, -0.59633615214482982, -0.34742079132566722},
                 {-0.31237223199670067, -1.4824369970314242, -0.89742602034362062},
                 {0.14998198484453512, 2.2865476612493509, -0.29303288305363301},
                 {-0.96924380268043542, -0.1610771075034784, -0.12907877602062817},
                 {1.2743492449784739, 0.14325837436145647, -0.56282968018009494},
                 {1.1298102618315355, 0.97846048739095726, -0.33700556768177747},
                 {0.19008729681711309, 0.3457709566919635, 0.20794119764936947}};
  const Vector b{-0.20018367057986963, -0.55165987874187994, 0.21385698756578897,
                 -0.26804775569430467, 0.096362509000688684, 0.24492492793096041,
                 0.15295165051954784};
  const Vector z0{-0.032566437512752233, -11.548168666164688, -1.8565090998035998};
  const double r = hoffmanbar_ratio(a, b, z0);
  CHECK(r > 0.0);
  CHECK(r <= hoffmanbar(a).value * (1.0 + 1e-7));
}
