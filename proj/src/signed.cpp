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

#include "condmeas/signed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "condmeas/coneig.hpp"
#include "condmeas/errors.hpp"
#include "condmeas/measures.hpp"
#include "condmeas/oracle.hpp"
#include "condmeas/parallel.hpp"

namespace condmeas {
namespace {

// Everything a scan needs to know about one signed matrix SA.
struct SignedEntry {
  double hoffman = 0.0;
  bool feasible = false;
  double renegar = 0.0;     // when feasible
  double hoffmanbar = 0.0;  // when requested
  double grassmann = 0.0;   // when requested and feasible
};

// 1 / cone_min of every sign pattern of every block. H(SA) sees S only
// through its restriction to each block, and only up to a global sign, so
// the table has 2^(n-1) entries per block however many signatures are
// scanned.
class BlockHoffmanTable {
 public:
  BlockHoffmanTable(const Matrix& a, std::vector<Subset> blocks, const Tolerances& tol,
                    std::size_t threads)
      : blocks_(std::move(blocks)), n_(a.cols()) {
    if (blocks_.empty()) throw InternalError("hoffman: no non-singular block");
    const std::size_t patterns = std::size_t{1} << (n_ - 1);
    values_.resize(blocks_.size() * patterns);
    parallel_for(blocks_.size(), threads, [&](std::size_t b) {
      const Matrix aj = a.select_rows(blocks_[b]);
      for (std::size_t p = 0; p < patterns; ++p) {
        Matrix f = aj;
        for (Index t = 1; t < n_; ++t)
          if ((p >> (t - 1)) & 1U)
            for (double& x : f.row(t)) x = -x;
        const double v = cone_min_factor(f, tol).value;
        if (!(v > 0.0)) throw InternalError("hoffman: singular block passed the rank test");
        values_[b * patterns + p] = 1.0 / v;
      }
    });
  }

  double hoffman(const Signature& s) const {
    const std::size_t patterns = std::size_t{1} << (n_ - 1);
    double best = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Subset& j = blocks_[b];
      const bool flip0 = s[j[0]] < 0;
      std::size_t p = 0;
      for (Index t = 1; t < n_; ++t)
        if ((s[j[t]] < 0) != flip0) p |= std::size_t{1} << (t - 1);
      best = std::max(best, values_[b * patterns + p]);
    }
    return best;
  }

 private:
  std::vector<Subset> blocks_;
  Index n_;
  std::vector<double> values_;
};

struct SweepOptions {
  bool feasibility = true;
  bool bar_measures = false;
};

struct Sweep {
  std::vector<SignedEntry> entries;  // indexed by counter position
};

Sweep sweep_signatures(const Matrix& a, const Tolerances& tol, const Caps& caps,
                       std::size_t threads, SweepOptions opt) {
  const Index m = a.rows();
  if (m > caps.signature_cap)
    throw CapExceededError("signature scan: " + std::to_string(m) +
                           " rows exceed the signature cap of " +
                           std::to_string(caps.signature_cap));
  const BlockHoffmanTable table(a, nonsingular_blocks(a, tol, caps), tol, threads);
  Matrix q;
  std::optional<BlockHoffmanTable> q_table;
  if (opt.bar_measures) {
    q = qr_orthonormal(a, tol);
    q_table.emplace(q, nonsingular_blocks(q, tol, caps), tol, threads);
  }
  const std::uint64_t count = std::uint64_t{1} << m;
  Sweep out;
  out.entries.resize(count);
  parallel_for(count, threads, [&](std::size_t k) {
    const Signature s = signature_at(m, k);
    const Matrix sa = apply_signature(s, a);
    SignedEntry& e = out.entries[k];
    e.hoffman = table.hoffman(s);
    if (opt.feasibility) {
      const FeasibilityDecision fd = strictly_feasible(sa, tol, caps);
      e.feasible = fd.feasible;
      if (fd.feasible) e.renegar = fd.gap;
    }
    if (opt.bar_measures) {
      const Matrix sq = apply_signature(s, q);
      e.hoffmanbar = q_table->hoffman(s);
      if (e.feasible) e.grassmann = 1.0 / cone_min_factor(sq, tol, caps).value;
    }
  });
  return out;
}

// First counter position maximizing field over entries passing filter.
template <typename Field, typename Filter>
std::optional<std::uint64_t> argmax_entry(const Sweep& sw, Field field, Filter filter) {
  std::optional<std::uint64_t> best;
  for (std::uint64_t k = 0; k < sw.entries.size(); ++k) {
    if (!filter(sw.entries[k])) continue;
    if (!best || field(sw.entries[k]) > field(sw.entries[*best])) best = k;
  }
  return best;
}

VerificationReport signed_max_report(std::string id, std::string statement, double lhs,
                                     const Sweep& sw, Index m, const Tolerances& tol,
                                     auto field, auto filter) {
  const auto k = argmax_entry(sw, field, filter);
  if (!k) {
    VerificationReport r = make_report(std::move(id), std::move(statement), lhs,
                                       std::numeric_limits<double>::quiet_NaN(), tol);
    r.pass = false;
    r.notes.push_back("no signature qualifies for the maximum");
    return r;
  }
  VerificationReport r =
      make_report(std::move(id), std::move(statement), lhs, field(sw.entries[*k]), tol);
  r.signature = signature_at(m, *k);
  return r;
}

bool rows_all_nonzero(const Matrix& a) {
  const double cut = 1e-12 * operator_norm(a);
  for (Index i = 0; i < a.rows(); ++i)
    if (norm2(a.row(i)) <= cut) return false;
  return true;
}

}  // namespace

Signature::Signature(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_)
    if (s != 1 && s != -1) throw DimensionError("signature entries must be +1 or -1");
}

std::string Signature::str() const {
  std::string out;
  out.reserve(signs_.size());
  for (int s : signs_) out.push_back(s > 0 ? '+' : '-');
  return out;
}

Signature signature_at(Index m, std::uint64_t k) {
  std::vector<int> signs(m, 1);
  for (Index i = 0; i < m; ++i)
    if ((k >> (m - 1 - i)) & 1U) signs[i] = -1;
  return Signature(std::move(signs));
}

std::vector<Signature> enumerate_signatures(Index m, const Caps& caps) {
  if (m > caps.signature_cap)
    throw CapExceededError("signature enumeration: m = " + std::to_string(m) +
                           " exceeds the signature cap of " + std::to_string(caps.signature_cap));
  std::vector<Signature> out;
  const std::uint64_t count = std::uint64_t{1} << m;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) out.push_back(signature_at(m, k));
  return out;
}

Matrix apply_signature(const Signature& s, const Matrix& a) {
  if (s.size() != a.rows())
    throw DimensionError("apply_signature: signature length " + std::to_string(s.size()) +
                         " does not match " + std::to_string(a.rows()) + " rows");
  Matrix out = a;
  for (Index i = 0; i < a.rows(); ++i)
    if (s[i] < 0)
      for (double& x : out.row(i)) x = -x;
  return out;
}

FeasibilityDecision strictly_feasible(const Matrix& a, const Tolerances& tol, const Caps& caps) {
  if (a.empty()) throw DimensionError("strictly_feasible: empty matrix");
  const ConeExtreme ce = cone_min_factor(a, tol, caps);
  FeasibilityDecision out;
  out.gap = ce.value;
  if (!(ce.value > tol.feas_tol)) {
    out.gordan = ce.cert.witness;
    return out;
  }
  // Minimum-norm x with Ax >= 1, i.e. -Ax <= -1.
  Matrix neg = a.scaled(-1.0);
  const Vector ones(a.rows(), -1.0);
  Vector x;
  try {
    x = constrained_lsq(Matrix::identity(a.cols()), Vector(a.cols(), 0.0), neg, ones, tol);
  } catch (const InfeasibleError&) {
    throw InternalError("strictly_feasible: positive cone gap but Ax >= 1 is infeasible");
  }
  const Vector ax = a * x;
  if (!(*std::min_element(ax.begin(), ax.end()) > 0.0))
    throw InternalError("strictly_feasible: recovered point fails Ax > 0");
  out.feasible = true;
  out.x = std::move(x);
  return out;
}

VerificationReport make_report(std::string identity, std::string statement, double lhs,
                               double rhs, const Tolerances& tol, CheckKind kind) {
  VerificationReport r;
  r.identity = std::move(identity);
  r.statement = std::move(statement);
  r.kind = kind;
  r.lhs = lhs;
  r.rhs = rhs;
  if (kind == CheckKind::equality) {
    r.abs_err = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.rel_err = scale > 0.0 ? r.abs_err / scale : 0.0;
    r.pass = r.rel_err <= tol.verify_rtol ||
             (r.abs_err <= tol.verify_rtol && std::abs(lhs) < 1.0 && std::abs(rhs) < 1.0);
  } else {
    r.abs_err = std::max(0.0, lhs - rhs);
    r.rel_err = std::abs(rhs) > 0.0 ? r.abs_err / std::abs(rhs) : r.abs_err;
    r.pass = lhs <= rhs * (1.0 + tol.verify_rtol);
  }
  if (std::isnan(lhs) || std::isnan(rhs)) r.pass = false;
  return r;
}

SignedScan signed_max_hoffman(const Matrix& a, bool filter_feasible, const Tolerances& tol,
                              const Caps& caps, std::size_t threads) {
  require_full_column_rank(a, tol);
  if (filter_feasible && !rows_all_nonzero(a))
    throw DimensionError("signed scan: --filter-feasible needs every row of A to be nonzero");
  const MeasureResult c = chi(a, tol, caps);
  const Sweep sw = sweep_signatures(a, tol, caps, threads, {filter_feasible, false});

  SignedScan out;
  out.chi = c.value;
  out.scanned = sw.entries.size();
  out.feasible = static_cast<std::size_t>(
      std::count_if(sw.entries.begin(), sw.entries.end(), [](const auto& e) { return e.feasible; }));
  const auto field = [](const SignedEntry& e) { return e.hoffman; };
  const auto filter = [&](const SignedEntry& e) { return !filter_feasible || e.feasible; };
  out.report = signed_max_report(filter_feasible ? "iii" : "i",
                                 filter_feasible
                                     ? "chi(A) = max over strictly feasible S of H(SA)"
                                     : "chi(A) = max over S of H(SA)",
                                 c.value, sw, a.rows(), tol, field, filter);
  if (const auto k = argmax_entry(sw, field, filter)) {
    out.value = sw.entries[*k].hoffman;
    out.argmax_index = *k;
    out.argmax = signature_at(a.rows(), *k);
  }
  if (c.argmax_subset) out.report.subsets.push_back(*c.argmax_subset);
  return out;
}

std::vector<VerificationReport> verify_identities(const Matrix& a, const Tolerances& tol,
                                                  std::uint64_t seed, const Caps& caps,
                                                  std::size_t threads) {
  require_full_column_rank(a, tol);
  const Index m = a.rows();
  const MeasureResult c = chi(a, tol, caps);
  const MeasureResult cb = chibar(a, tol, caps);
  const bool nonzero_rows = rows_all_nonzero(a);
  const Sweep sw = sweep_signatures(a, tol, caps, threads, {true, true});
  const auto any = [](const SignedEntry&) { return true; };
  const auto feasible = [](const SignedEntry& e) { return e.feasible; };

  std::vector<VerificationReport> out;

  out.push_back(signed_max_report("i", "chi(A) = max over S of H(SA)", c.value, sw, m, tol,
                                  [](const SignedEntry& e) { return e.hoffman; }, any));
  out.back().subsets.push_back(*c.argmax_subset);

  {
    const Matrix stacked = stack_pm(a);
    const MeasureResult hs = hoffman(stacked, tol, caps);
    out.push_back(make_report("ii", "chi(A) = H([A; -A])", c.value, hs.value, tol));
    if (hs.argmax_subset) out.back().subsets.push_back(*hs.argmax_subset);
  }

  if (nonzero_rows) {
    out.push_back(signed_max_report("iii", "chi(A) = max over strictly feasible S of H(SA)",
                                    c.value, sw, m, tol,
                                    [](const SignedEntry& e) { return e.hoffman; }, feasible));
  }

  out.push_back(signed_max_report("iv.a", "chibar(A) = max over S of Hbar(SA)", cb.value, sw, m,
                                  tol, [](const SignedEntry& e) { return e.hoffmanbar; }, any));
  {
    // range([A; -A]) embeds y as (y, -y), which has norm sqrt(2) ||y||, so the
    // stacked constant carries that factor: an orthonormal basis of the
    // stacked range is [Q; -Q] / sqrt(2) and H scales as 1 / ||basis||.
    const MeasureResult hbs = hoffmanbar(stack_pm(a), tol, caps);
    auto r = make_report("iv.b", "sqrt(2) chibar(A) = Hbar([A; -A])",
                         std::sqrt(2.0) * cb.value, hbs.value, tol);
    r.notes.push_back("the unscaled form chibar(A) = Hbar([A; -A]) is off by sqrt(2); "
                      "sampled image-space ratios of [A; -A] exceed chibar(A)");
    out.push_back(std::move(r));
  }

  {
    // Worst |H(SA) R(SA) - 1| over feasible signatures.
    std::optional<std::uint64_t> worst;
    double worst_err = -1.0;
    std::size_t count = 0;
    for (std::uint64_t k = 0; k < sw.entries.size(); ++k) {
      const auto& e = sw.entries[k];
      if (!e.feasible) continue;
      ++count;
      const double err = std::abs(e.hoffman * e.renegar - 1.0);
      if (err > worst_err) {
        worst_err = err;
        worst = k;
      }
    }
    if (worst) {
      const auto& e = sw.entries[*worst];
      out.push_back(make_report("v", "H(SA) * R(SA) = 1 for every strictly feasible S",
                                e.hoffman * e.renegar, 1.0, tol));
      out.back().signature = signature_at(m, *worst);
      out.back().notes.push_back("worst of " + std::to_string(count) + " feasible signatures");
    }
  }

  if (nonzero_rows) {
    out.push_back(signed_max_report(
        "vi", "chi(A) = max over strictly feasible S of 1/R(SA)", c.value, sw, m, tol,
        [](const SignedEntry& e) { return e.feasible ? 1.0 / e.renegar : 0.0; }, feasible));
    out.push_back(signed_max_report(
        "vii", "chibar(A) = max over strictly feasible S of G(SA)", cb.value, sw, m, tol,
        [](const SignedEntry& e) { return e.grassmann; }, feasible));
  } else {
    const StrippedMatrix st = strip_zero_rows(a, tol);
    const MeasureResult cs = chi(st.matrix, tol, caps);
    const Sweep ssw = sweep_signatures(st.matrix, tol, caps, threads, {true, false});
    const Index l = st.matrix.rows();
    out.push_back(signed_max_report(
        "viii.a", "chi(A~) = max over strictly feasible S of H(SA~), A~ = A without zero rows",
        cs.value, ssw, l, tol, [](const SignedEntry& e) { return e.hoffman; }, feasible));
    out.back().notes.push_back("zero rows removed: " + std::to_string(m - l));
    out.push_back(signed_max_report(
        "viii.b", "chi(A~) = max over strictly feasible S of 1/R(SA~)", cs.value, ssw, l, tol,
        [](const SignedEntry& e) { return e.feasible ? 1.0 / e.renegar : 0.0; }, feasible));
    // Same maximum written over signatures of the full A; zero rows keep +1.
    const std::vector<Subset> blocks = nonsingular_blocks(a, tol, caps);
    double best = std::numeric_limits<double>::quiet_NaN();
    std::optional<Signature> best_s;
    for (std::uint64_t k = 0; k < ssw.entries.size(); ++k) {
      if (!ssw.entries[k].feasible) continue;
      const Signature reduced = signature_at(l, k);
      std::vector<int> full(m, 1);
      for (Index t = 0; t < l; ++t) full[st.kept[t]] = reduced[t];
      Signature s(std::move(full));
      const double h = hoffman_over_blocks(apply_signature(s, a), blocks, tol).value;
      if (!best_s || h > best) {
        best = h;
        best_s = std::move(s);
      }
    }
    out.push_back(make_report("viii.c",
                              "chi(A) = max over S with SA~ strictly feasible of H(SA)", c.value,
                              best, tol));
    if (best_s) out.back().signature = *best_s;
  }

  {
    const Matrix r = random_nonsingular(a.cols(), seed);
    const Matrix ar = a * r;
    out.push_back(make_report("ix.a", "chibar(AR) = chibar(A) for a random non-singular R",
                              chibar(ar, tol, caps).value, cb.value, tol));
    out.push_back(make_report("ix.b", "Hbar(AR) = Hbar(A) for a random non-singular R",
                              hoffmanbar(ar, tol, caps).value, hoffmanbar(a, tol, caps).value,
                              tol));
    // G needs a strictly feasible orientation; use the first feasible signature.
    const auto k = argmax_entry(
        sw, [](const SignedEntry&) { return 0.0; }, feasible);
    if (k) {
      const Signature s = signature_at(m, *k);
      const Matrix sa = apply_signature(s, a);
      out.push_back(make_report("ix.c", "G(SAR) = G(SA) for a random non-singular R",
                                grassmann(sa * r, tol, caps).value, grassmann(sa, tol, caps).value,
                                tol));
      out.back().signature = s;
    }
  }
  return out;
}

Matrix random_nonsingular(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  while (true) {
    Matrix r(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) r(i, j) = normal(rng);
    const auto [smin, smax] = sigma_extremes(r);
    if (smin * 100.0 > smax) return r;
  }
}

}  // namespace condmeas
