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

#include "condmeas/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "condmeas/coneig.hpp"
#include "condmeas/errors.hpp"

namespace condmeas {
namespace {

constexpr char kRenegarNote[] =
    "renegar: distance taken as min ||A^T v|| over unit v >= 0, the reciprocal of the "
    "strictly-feasible Hoffman constant max{||v|| : v >= 0, ||A^T v|| = 1}";

struct BlockScore {
  Subset block;
  double value;
};

// Index of the lexicographically first block within verify_rtol of the max.
std::size_t pick_ties(const std::vector<BlockScore>& scores, double rtol, MeasureResult& out) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : scores) best = std::max(best, s.value);
  out.value = best;
  std::size_t primary = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].value >= best * (1.0 - rtol)) {
      if (primary == scores.size()) primary = i;
      out.ties.push_back(scores[i].block);
    }
  }
  out.argmax_subset = scores[primary].block;
  return primary;
}

Vector pad(const Subset& rows, std::span<const double> local, Index m, double scale) {
  Vector v(m, 0.0);
  for (Index a = 0; a < rows.size(); ++a) v[rows[a]] = local[a] * scale;
  return v;
}

void require_input(const Matrix& a) {
  if (a.empty()) throw DimensionError("matrix must have at least one row and one column");
  if (!a.all_finite()) throw DimensionError("matrix has non-finite entries");
}

// Throws NotStrictlyFeasibleError when the cone minimum of A A^T is within
// feas_tol of zero.
ConeExtreme feasible_cone_min(const Matrix& a, const Tolerances& tol, const Caps& caps,
                              const char* who) {
  ConeExtreme ce = cone_min_factor(a, tol, caps);
  if (!(ce.value > tol.feas_tol))
    throw NotStrictlyFeasibleError(std::string(who) + ": Ax > 0 has no solution (Gordan vector found)",
                                   ce.cert.witness, ce.value);
  return ce;
}

}  // namespace

std::string_view to_string(MeasureKind kind) noexcept {
  switch (kind) {
    case MeasureKind::chi: return "chi";
    case MeasureKind::chibar: return "chibar";
    case MeasureKind::hoffman: return "hoffman";
    case MeasureKind::hoffmanbar: return "hoffmanbar";
    case MeasureKind::renegar: return "renegar";
    case MeasureKind::grassmann: return "grassmann";
  }
  return "unknown";
}

std::optional<MeasureKind> parse_measure(std::string_view name) noexcept {
  for (MeasureKind k : kAllMeasures)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::uint64_t binomial(Index m, Index n) noexcept {
  if (n > m) return 0;
  n = std::min(n, m - n);
  std::uint64_t r = 1;
  for (Index i = 1; i <= n; ++i) {
    const std::uint64_t num = m - n + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / num)
      return std::numeric_limits<std::uint64_t>::max();
    r = r * num / i;
  }
  return r;
}

void for_each_row_subset(Index m, Index n, const Caps& caps,
                         const std::function<void(const Subset&)>& fn) {
  const std::uint64_t count = binomial(m, n);
  if (count > caps.subset_cap)
    throw CapExceededError("C(" + std::to_string(m) + ", " + std::to_string(n) +
                           ") row subsets exceed the subset cap of " +
                           std::to_string(caps.subset_cap));
  if (n == 0 || n > m) return;
  Subset j(n);
  std::iota(j.begin(), j.end(), Index{0});
  while (true) {
    fn(j);
    Index pos = n;
    while (pos > 0 && j[pos - 1] == m - n + pos - 1) --pos;
    if (pos == 0) return;
    ++j[pos - 1];
    for (Index t = pos; t < n; ++t) j[t] = j[t - 1] + 1;
  }
}

void require_full_column_rank(const Matrix& a, const Tolerances& tol) {
  require_input(a);
  tol.validate();
  const Index r = rank_of(a, tol);
  if (r != a.cols())
    throw RankDeficientError("matrix is not full column rank (rank " + std::to_string(r) +
                             " < " + std::to_string(a.cols()) + " columns)");
}

std::vector<Subset> nonsingular_blocks(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  const double cut = tol.rank_rtol * operator_norm(a);
  std::vector<Subset> out;
  for_each_row_subset(a.rows(), a.cols(), caps, [&](const Subset& j) {
    if (sigma_extremes(a.select_rows(j)).min > cut) out.push_back(j);
  });
  return out;
}

MeasureResult chi(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  require_full_column_rank(a, tol);
  const double cut = tol.rank_rtol * operator_norm(a);
  std::vector<BlockScore> scores;
  for_each_row_subset(a.rows(), a.cols(), caps, [&](const Subset& j) {
    const double smin = sigma_extremes(a.select_rows(j)).min;
    if (smin > cut) scores.push_back({j, 1.0 / smin});
  });
  if (scores.empty()) throw InternalError("chi: full column rank matrix without a non-singular block");

  MeasureResult out;
  out.kind = MeasureKind::chi;
  const auto& primary = scores[pick_ties(scores, tol.verify_rtol, out)];
  // v = u / sigma_min with u the left singular vector of the smallest singular
  // value: ||A_J^T v|| = 1 and ||v|| = ||A_J^{-1}||.
  const auto eig = gram_eig(a.select_rows(primary.block).transpose());
  out.witness = pad(primary.block, eig.back().vector, a.rows(), primary.value);
  return out;
}

MeasureResult hoffman_over_blocks(const Matrix& a, const std::vector<Subset>& blocks,
                                  const Tolerances& tol) {
  if (blocks.empty()) throw InternalError("hoffman: no non-singular block");
  std::vector<BlockScore> scores;
  std::vector<ConeExtreme> certs;
  scores.reserve(blocks.size());
  certs.reserve(blocks.size());
  for (const Subset& j : blocks) {
    ConeExtreme ce = cone_min_factor(a.select_rows(j), tol);
    if (!(ce.value > 0.0)) throw InternalError("hoffman: singular block passed the rank test");
    scores.push_back({j, 1.0 / ce.value});
    certs.push_back(std::move(ce));
  }
  MeasureResult out;
  out.kind = MeasureKind::hoffman;
  const std::size_t p = pick_ties(scores, tol.verify_rtol, out);
  const ConeExtreme& ce = certs[p];
  // Local witness lives on the block; lift it back to R^m and scale so that
  // ||A^T v|| = 1.
  Vector local(blocks[p].size());
  for (Index a_i = 0; a_i < local.size(); ++a_i) local[a_i] = ce.cert.witness[a_i];
  out.witness = pad(blocks[p], local, a.rows(), 1.0 / ce.value);
  out.degenerate = ce.cert.degenerate;
  return out;
}

MeasureResult hoffman(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  require_full_column_rank(a, tol);
  return hoffman_over_blocks(a, nonsingular_blocks(a, tol, caps), tol);
}

MeasureResult hoffman_simple(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  require_input(a);
  tol.validate();
  const ConeExtreme ce = feasible_cone_min(a, tol, caps, "hoffman_simple");
  MeasureResult out;
  out.kind = MeasureKind::hoffman;
  out.value = 1.0 / ce.value;
  out.argmax_subset = ce.cert.support;
  out.ties.push_back(ce.cert.support);
  Vector w = ce.cert.witness;
  for (double& x : w) x /= ce.value;
  out.witness = std::move(w);
  out.degenerate = ce.cert.degenerate;
  out.notes.push_back("hoffman via a single cone scan of A A^T (strictly feasible input)");
  return out;
}

MeasureResult chibar(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  require_full_column_rank(a, tol);
  MeasureResult out = chi(qr_orthonormal(a, tol), tol, caps);
  out.kind = MeasureKind::chibar;
  out.notes.push_back("chibar = chi(Q) for an orthonormal basis Q of range(A)");
  return out;
}

MeasureResult hoffmanbar(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  require_input(a);
  tol.validate();
  MeasureResult out = hoffman(qr_orthonormal(a, tol), tol, caps);
  out.kind = MeasureKind::hoffmanbar;
  out.notes.push_back("hoffmanbar = hoffman(Q) for an orthonormal basis Q of range(A)");
  return out;
}

MeasureResult renegar_distance(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  require_input(a);
  tol.validate();
  const ConeExtreme ce = feasible_cone_min(a, tol, caps, "renegar_distance");
  MeasureResult out;
  out.kind = MeasureKind::renegar;
  out.value = ce.value;
  out.argmax_subset = ce.cert.support;
  out.ties.push_back(ce.cert.support);
  out.witness = ce.cert.witness;
  out.degenerate = ce.cert.degenerate;
  out.notes.push_back(kRenegarNote);
  return out;
}

MeasureResult grassmann(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  require_input(a);
  tol.validate();
  const Matrix q = qr_orthonormal(a, tol);
  const ConeExtreme ce = feasible_cone_min(q, tol, caps, "grassmann");
  MeasureResult out;
  out.kind = MeasureKind::grassmann;
  out.value = 1.0 / ce.value;
  out.argmax_subset = ce.cert.support;
  out.ties.push_back(ce.cert.support);
  out.witness = ce.cert.witness;
  out.degenerate = ce.cert.degenerate;
  out.notes.push_back("grassmann = 1 / renegar(Q) for an orthonormal basis Q of range(A)");
  return out;
}

MeasureResult compute_measure(MeasureKind kind, const Matrix& a, const Tolerances& tol,
                              const Caps& caps) {
  switch (kind) {
    case MeasureKind::chi: return chi(a, tol, caps);
    case MeasureKind::chibar: return chibar(a, tol, caps);
    case MeasureKind::hoffman: return hoffman(a, tol, caps);
    case MeasureKind::hoffmanbar: return hoffmanbar(a, tol, caps);
    case MeasureKind::renegar: return renegar_distance(a, tol, caps);
    case MeasureKind::grassmann: return grassmann(a, tol, caps);
  }
  throw InternalError("unknown measure");
}

Matrix stack_pm(const Matrix& a) {
  const Index m = a.rows();
  Matrix s(2 * m, a.cols());
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      s(i, j) = a(i, j);
      s(m + i, j) = -a(i, j);
    }
  return s;
}

StrippedMatrix strip_zero_rows(const Matrix& a, const Tolerances&) {
  require_input(a);
  const double cut = 1e-12 * operator_norm(a);
  StrippedMatrix out;
  for (Index i = 0; i < a.rows(); ++i)
    if (norm2(a.row(i)) > cut) out.kept.push_back(i);
  if (out.kept.empty()) throw DimensionError("strip_zero_rows: every row is zero");
  out.matrix = a.select_rows(out.kept);
  return out;
}

Matrix wls_pseudoinverse(const Matrix& a, std::span<const double> d, const Tolerances& tol) {
  require_full_column_rank(a, tol);
  const Index m = a.rows();
  const Index n = a.cols();
  if (d.size() != m)
    throw DimensionError("wls_pseudoinverse: expected " + std::to_string(m) + " weights, got " +
                         std::to_string(d.size()));
  for (double w : d)
    if (!(w > 0.0) || !std::isfinite(w))
      throw DimensionError("wls_pseudoinverse: weights must be positive and finite");

  // Rows of D^{1/2} A ordered by decreasing norm.
  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), Index{0});
  Vector root(m);
  for (Index i = 0; i < m; ++i) root[i] = std::sqrt(d[i]);
  Vector weight(m);
  for (Index i = 0; i < m; ++i) weight[i] = root[i] * norm2(a.row(i));
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return weight[x] > weight[y]; });
  Matrix w(m, n);
  for (Index r = 0; r < m; ++r)
    for (Index j = 0; j < n; ++j) w(r, j) = root[order[r]] * a(order[r], j);

  const ThinQr qr = householder_qr(w);
  // Column order[r] of the result is sqrt(d) * R^{-1} (row r of Q)^T.
  Matrix out(n, m);
  for (Index r = 0; r < m; ++r) {
    Vector y(n);
    for (Index j = 0; j < n; ++j) y[j] = qr.q(r, j);
    for (Index k = n; k-- > 0;) {
      double s = y[k];
      for (Index t = k + 1; t < n; ++t) s -= qr.r(k, t) * y[t];
      if (qr.r(k, k) == 0.0) throw SingularError("wls_pseudoinverse: singular weighted factor");
      y[k] = s / qr.r(k, k);
    }
    for (Index j = 0; j < n; ++j) out(j, order[r]) = root[order[r]] * y[j];
  }
  return out;
}

}  // namespace condmeas
