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

#include "condmeas/coneig.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "condmeas/errors.hpp"

namespace condmeas {
namespace {

constexpr double kClusterRtol = 1e-9;
constexpr double kTieRtol = 1e-12;
constexpr double kNoiseRtol = 1e-15;
constexpr int kProjectionRounds = 64;
constexpr int kRandomStarts = 8;

// Eigenpairs of G[K,K] either from G itself or from a factor F with G = F F^T.
class GramSource {
 public:
  static GramSource explicit_matrix(const Matrix& g) {
    if (g.rows() != g.cols()) throw DimensionError("cone scan: Gram matrix is not square");
    GramSource s;
    s.g_ = &g;
    s.m_ = g.rows();
    if (s.m_ == 0) throw DimensionError("cone scan: empty matrix");
    const auto eig = sym_eig(g);
    const double top = std::max(0.0, eig.front().value);
    if (eig.back().value < -1e-9 * top)
      throw DimensionError("cone scan: matrix is not positive semidefinite");
    s.norm_ = top;
    return s;
  }

  static GramSource factor(const Matrix& f) {
    GramSource s;
    s.f_ = &f;
    s.m_ = f.rows();
    if (s.m_ == 0 || f.cols() == 0) throw DimensionError("cone scan: empty factor");
    const double top = operator_norm(f);
    s.norm_ = top * top;
    return s;
  }

  Index size() const noexcept { return m_; }
  double norm() const noexcept { return norm_; }

  std::vector<EigenPair> eig(const Subset& k) const {
    if (k.size() == 1) return {{diag(k[0]), Vector{1.0}}};
    if (g_) return sym_eig(g_->principal(k));
    return gram_eig(f_->select_rows(k).transpose());
  }

  double diag(Index i) const {
    if (g_) return (*g_)(i, i);
    const auto r = f_->row(i);
    return dot(r, r);
  }

  // v_K^T G[K,K] v_K
  double rayleigh(const Subset& k, const Vector& vk) const {
    if (g_) {
      double s = 0.0;
      for (Index a = 0; a < k.size(); ++a)
        for (Index b = 0; b < k.size(); ++b) s += vk[a] * (*g_)(k[a], k[b]) * vk[b];
      return s;
    }
    Vector y(f_->cols(), 0.0);
    for (Index a = 0; a < k.size(); ++a) {
      const auto r = f_->row(k[a]);
      for (Index j = 0; j < y.size(); ++j) y[j] += vk[a] * r[j];
    }
    return dot(y, y);
  }

 private:
  const Matrix* g_ = nullptr;
  const Matrix* f_ = nullptr;
  Index m_ = 0;
  double norm_ = 0.0;
};

std::optional<Vector> nonneg_representative(const Vector& u, double atol) {
  const double lo = *std::min_element(u.begin(), u.end());
  const double hi = *std::max_element(u.begin(), u.end());
  if (lo >= -atol) return u;
  if (hi <= atol) {
    Vector v = u;
    for (double& x : v) x = -x;
    return v;
  }
  return std::nullopt;
}

// Looks for a unit nonnegative vector inside span(basis) by alternating
// projection between the subspace and the orthant.
std::optional<Vector> nonneg_in_span(const std::vector<const Vector*>& basis, double atol,
                                     std::uint64_t seed) {
  for (const Vector* b : basis)
    if (auto v = nonneg_representative(*b, atol)) return v;

  const Index k = basis.front()->size();
  const auto project = [&](const Vector& x) {
    Vector y(k, 0.0);
    for (const Vector* b : basis) {
      const double c = dot(*b, x);
      for (Index i = 0; i < k; ++i) y[i] += c * (*b)[i];
    }
    return y;
  };
  const auto accept = [&](Vector& y) -> bool {
    const double ny = norm2(y);
    if (ny <= 1e-12) return false;
    for (double& x : y) x /= ny;
    return *std::min_element(y.begin(), y.end()) >= -atol;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int start = 0; start <= kRandomStarts; ++start) {
    Vector x(k, 1.0);
    if (start > 0)
      for (double& xi : x) xi = std::abs(normal(rng));
    for (int round = 0; round < kProjectionRounds; ++round) {
      Vector y = project(x);
      if (accept(y)) return y;
      for (Index i = 0; i < k; ++i) x[i] = std::max(0.0, y[i]);
      if (norm2(x) <= 1e-12) break;
    }
  }
  return std::nullopt;
}

// Calls visit(support, lambda, v_K, degenerate) for every candidate in
// enumeration order: cardinality, then lexicographic support, then
// eigenvalue descending.
//
// With search_span off, a multi-dimensional eigenspace only contributes the
// basis vectors that are nonnegative themselves. The extremes do not need
// more: if v >= 0 lies in such an eigenspace of G[K,K], moving along the
// eigenspace until an entry of v vanishes gives a nonnegative eigenvector
// with the same lambda on a smaller support, and repeating ends on a support
// where lambda is simple, which the scan visits earlier.
template <typename Visit>
void scan(const GramSource& src, const Tolerances& tol, const Caps& caps, bool search_span,
          Visit&& visit) {
  const Index m = src.size();
  if (m > caps.support_cap)
    throw CapExceededError("cone scan: " + std::to_string(m) + " rows exceed the support cap of " +
                           std::to_string(caps.support_cap));
  const double cluster = kClusterRtol * src.norm();
  Subset k;
  for (Index card = 1; card <= m; ++card) {
    k.resize(card);
    for (Index i = 0; i < card; ++i) k[i] = i;
    while (true) {
      const auto eig = src.eig(k);
      Index i = 0;
      while (i < eig.size()) {
        Index j = i + 1;
        while (j < eig.size() && eig[j - 1].value - eig[j].value <= cluster) ++j;
        if (j == i + 1) {
          if (auto v = nonneg_representative(eig[i].vector, tol.nonneg_atol))
            visit(k, std::max(0.0, eig[i].value), *v, false);
        } else {
          std::vector<const Vector*> basis;
          for (Index t = i; t < j; ++t) basis.push_back(&eig[t].vector);
          if (!search_span) {
            for (Index t = i; t < j; ++t)
              if (auto v = nonneg_representative(eig[t].vector, tol.nonneg_atol))
                visit(k, std::max(0.0, eig[t].value), *v, true);
            i = j;
            continue;
          }
          std::uint64_t mask = 0;
          for (Index r : k) mask |= std::uint64_t{1} << r;
          if (auto v = nonneg_in_span(basis, tol.nonneg_atol, 0x9E3779B97F4A7C15ULL ^ mask))
            visit(k, std::max(0.0, src.rayleigh(k, *v)), *v, true);
        }
        i = j;
      }
      // next combination
      Index pos = card;
      while (pos > 0 && k[pos - 1] == m - card + pos - 1) --pos;
      if (pos == 0) break;
      ++k[pos - 1];
      for (Index t = pos; t < card; ++t) k[t] = k[t - 1] + 1;
    }
  }
}

SupportCertificate make_cert(Index m, const Subset& k, double lambda, const Vector& vk,
                             bool degenerate) {
  SupportCertificate c;
  c.support = k;
  c.eigenvalue = lambda;
  c.witness.assign(m, 0.0);
  for (Index a = 0; a < k.size(); ++a) c.witness[k[a]] = vk[a];
  c.value = std::sqrt(lambda);
  c.degenerate = degenerate;
  return c;
}

std::vector<SupportCertificate> candidates(const GramSource& src, const Tolerances& tol,
                                           const Caps& caps) {
  std::vector<SupportCertificate> out;
  scan(src, tol, caps, true, [&](const Subset& k, double lambda, const Vector& vk, bool degenerate) {
    out.push_back(make_cert(src.size(), k, lambda, vk, degenerate));
  });
  return out;
}

ConeExtreme extreme(const GramSource& src, const Tolerances& tol, const Caps& caps,
                    bool maximize) {
  // Ties are judged relative to the values compared, with a floor at the
  // rounding level of the Gram matrix. A floor of kTieRtol * ||G|| would hide
  // genuinely smaller minima when the row norms are badly graded.
  const double floor = kNoiseRtol * src.norm();
  std::optional<SupportCertificate> best;
  scan(src, tol, caps, false, [&](const Subset& k, double lambda, const Vector& vk, bool degenerate) {
    const double slack = best ? std::max(floor, kTieRtol * best->eigenvalue) : 0.0;
    const bool better = !best || (maximize ? lambda > best->eigenvalue + slack
                                           : lambda < best->eigenvalue - slack);
    if (better) best = make_cert(src.size(), k, lambda, vk, degenerate);
  });
  if (!best) throw InternalError("cone scan produced no candidates");
  return {best->value, std::move(*best)};
}

}  // namespace

std::vector<SupportCertificate> cone_candidates(const Matrix& g, const Tolerances& tol,
                                                const Caps& caps) {
  return candidates(GramSource::explicit_matrix(g), tol, caps);
}

ConeExtreme cone_max(const Matrix& g, const Tolerances& tol, const Caps& caps) {
  return extreme(GramSource::explicit_matrix(g), tol, caps, true);
}

ConeExtreme cone_min(const Matrix& g, const Tolerances& tol, const Caps& caps) {
  return extreme(GramSource::explicit_matrix(g), tol, caps, false);
}

std::vector<SupportCertificate> cone_candidates_factor(const Matrix& f, const Tolerances& tol,
                                                       const Caps& caps) {
  return candidates(GramSource::factor(f), tol, caps);
}

ConeExtreme cone_max_factor(const Matrix& f, const Tolerances& tol, const Caps& caps) {
  return extreme(GramSource::factor(f), tol, caps, true);
}

ConeExtreme cone_min_factor(const Matrix& f, const Tolerances& tol, const Caps& caps) {
  return extreme(GramSource::factor(f), tol, caps, false);
}

}  // namespace condmeas
