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

#include "condmeas/densela.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "condmeas/errors.hpp"

namespace condmeas {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 60;

std::vector<EigenPair> sorted_pairs(const Vector& values, const Matrix& vecs) {
  const Index n = values.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] > values[b]; });
  std::vector<EigenPair> out;
  out.reserve(n);
  for (Index k : order) {
    Vector v = vecs.col(k);
    const double nv = norm2(v);
    if (nv > 0.0)
      for (double& x : v) x /= nv;
    out.push_back({values[k], std::move(v)});
  }
  return out;
}

// One-sided Jacobi: rotates the columns of w until mutually orthogonal and
// accumulates the rotations in v (n x n, n = w.cols()).
void one_sided_jacobi(Matrix& w, Matrix& v) {
  const Index rows = w.rows();
  const Index n = w.cols();
  v = Matrix::identity(n);
  // Columns below eps * ||W||_F are rounding noise (wide inputs always leave
  // some); rotating them against each other never settles.
  double frob2 = 0.0;
  for (double x : w.data()) frob2 += x * x;
  const double floor2 = kEps * kEps * frob2;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (Index i = 0; i < rows; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          alpha += wp * wp;
          beta += wq * wq;
          gamma += wp * wq;
        }
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        if (std::min(alpha, beta) <= floor2) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (Index i = 0; i < rows; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Index i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
}

Vector column_norms(const Matrix& w) {
  Vector out(w.cols());
  for (Index j = 0; j < w.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < w.rows(); ++i) s += w(i, j) * w(i, j);
    out[j] = std::sqrt(s);
  }
  return out;
}

}  // namespace

void Tolerances::validate() const {
  const auto check = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1e-2))
      throw DimensionError(std::string("tolerance ") + name + " must lie in (0, 1e-2)");
  };
  check(rank_rtol, "rank_rtol");
  check(nonneg_atol, "nonneg_atol");
  check(feas_tol, "feas_tol");
  check(verify_rtol, "verify_rtol");
}

Vector singular_values(const Matrix& a) {
  if (a.empty()) return {};
  // Work on the orientation with fewer columns: its Gram is the smaller one.
  Matrix w = a.rows() >= a.cols() ? a : a.transpose();
  Matrix v;
  one_sided_jacobi(w, v);
  Vector s = column_norms(w);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

SigmaExtremes sigma_extremes(const Matrix& a) {
  const Vector s = singular_values(a);
  if (s.empty()) return {0.0, 0.0};
  return {s.back(), s.front()};
}

double operator_norm(const Matrix& a) { return sigma_extremes(a).max; }

std::vector<EigenPair> sym_eig(const Matrix& g) {
  if (g.rows() != g.cols()) throw DimensionError("sym_eig: matrix is not square");
  const Index n = g.rows();
  const double scale = g.max_abs();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(g(i, j) - g(j, i)) > 1e-12 * scale)
        throw NonSymmetricError("sym_eig: matrix is not symmetric");

  Matrix a = g;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) a(j, i) = a(i, j) = 0.5 * (g(i, j) + g(j, i));
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        if (std::abs(apq) <= kEps * std::sqrt(std::abs(app * aqq)) ||
            std::abs(apq) <= kEps * kEps * scale)
          continue;
        rotated = true;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }
  Vector values(n);
  for (Index i = 0; i < n; ++i) values[i] = a(i, i);
  return sorted_pairs(values, v);
}

std::vector<EigenPair> gram_eig(const Matrix& m) {
  Matrix w = m;
  Matrix v;
  one_sided_jacobi(w, v);
  Vector s = column_norms(w);
  Vector values(s.size());
  for (Index j = 0; j < s.size(); ++j) values[j] = s[j] * s[j];
  return sorted_pairs(values, v);
}

Matrix qr_orthonormal(const Matrix& a, const Tolerances& tol) {
  const double anorm = operator_norm(a);
  if (a.empty() || anorm == 0.0) throw RankDeficientError("qr_orthonormal: zero matrix");
  const Index m = a.rows();
  std::vector<Vector> basis;
  for (Index j = 0; j < a.cols(); ++j) {
    Vector q = a.col(j);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& b : basis) {
        const double r = dot(b, q);
        for (Index i = 0; i < m; ++i) q[i] -= r * b[i];
      }
    const double nq = norm2(q);
    if (nq <= tol.rank_rtol * anorm) continue;
    for (double& x : q) x /= nq;
    basis.push_back(std::move(q));
  }
  Matrix out(m, basis.size());
  for (Index j = 0; j < basis.size(); ++j)
    for (Index i = 0; i < m; ++i) out(i, j) = basis[j][i];
  return out;
}

std::optional<Vector> lu_solve(Matrix a, Vector b, double pivot_rtol) {
  const Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw DimensionError("lu_solve: shape mismatch");
  const double scale = a.max_abs();
  if (scale == 0.0) return std::nullopt;
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= pivot_rtol * scale) return std::nullopt;
    if (piv != k) {
      for (Index j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  for (Index k = n; k-- > 0;) {
    double s = b[k];
    for (Index j = k + 1; j < n; ++j) s -= a(k, j) * b[j];
    b[k] = s / a(k, k);
  }
  return b;
}

Vector solve_square(const Matrix& a, std::span<const double> b, const Tolerances& tol) {
  if (a.rows() != a.cols()) throw DimensionError("solve_square: matrix is not square");
  if (b.size() != a.rows()) throw DimensionError("solve_square: right-hand side size mismatch");
  const auto [smin, smax] = sigma_extremes(a);
  if (!(smin > tol.rank_rtol * smax)) throw SingularError("solve_square: singular within tolerance");
  auto x = lu_solve(a, Vector(b.begin(), b.end()), 0.0);
  if (!x) throw SingularError("solve_square: zero pivot");
  return *x;
}

Index rank_of(const Matrix& a, const Tolerances& tol) {
  const Vector s = singular_values(a);
  if (s.empty() || s.front() == 0.0) return 0;
  const double cut = tol.rank_rtol * s.front();
  return static_cast<Index>(std::count_if(s.begin(), s.end(), [&](double x) { return x > cut; }));
}

ThinQr householder_qr(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (m < n) throw DimensionError("householder_qr: matrix must have at least as many rows as columns");
  Matrix r = a;
  std::vector<Vector> reflectors;
  reflectors.reserve(n);
  for (Index k = 0; k < n; ++k) {
    Vector v(m - k);
    for (Index i = k; i < m; ++i) v[i - k] = r(i, k);
    const double alpha = norm2(v);
    if (alpha == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    const double beta = v[0] >= 0.0 ? -alpha : alpha;
    v[0] -= beta;
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    for (Index j = k; j < n; ++j) {
      double s = 0.0;
      for (Index i = k; i < m; ++i) s += v[i - k] * r(i, j);
      for (Index i = k; i < m; ++i) r(i, j) -= 2.0 * s * v[i - k];
    }
    reflectors.push_back(std::move(v));
  }
  // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
  Matrix q(m, n);
  for (Index j = 0; j < n; ++j) q(j, j) = 1.0;
  for (Index k = n; k-- > 0;) {
    const Vector& v = reflectors[k];
    if (v.empty()) continue;
    for (Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Index i = k; i < m; ++i) s += v[i - k] * q(i, j);
      for (Index i = k; i < m; ++i) q(i, j) -= 2.0 * s * v[i - k];
    }
  }
  Matrix rr(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) rr(i, j) = r(i, j);
  return {std::move(q), std::move(rr)};
}

Matrix range_projector(const Matrix& a, const Tolerances& tol) {
  const Matrix q = qr_orthonormal(a, tol);
  return q * q.transpose();
}

}  // namespace condmeas
