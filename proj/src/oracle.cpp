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

#include "condmeas/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "condmeas/errors.hpp"
#include "condmeas/measures.hpp"
#include "condmeas/parallel.hpp"

namespace condmeas {
namespace {

constexpr double kPrimalRtol = 1e-9;
constexpr double kDualRtol = 1e-9;
constexpr int kRefineSteps = 2;
constexpr double kNearMiss = 1e4;
constexpr double kDirectedWeight = 1e8;

std::size_t stream_count(std::size_t samples) {
  return (samples + kSamplesPerStream - 1) / kSamplesPerStream;
}

// Runs body(rng, first, last) once per stream and returns the per-stream
// results in stream order.
template <typename T, typename Body>
std::vector<T> run_streams(const RngConfig& cfg, std::size_t threads, Body&& body) {
  const std::size_t streams = stream_count(cfg.sample_count);
  std::vector<T> out(streams);
  parallel_for(streams, threads, [&](std::size_t s) {
    std::mt19937_64 rng(stream_seed(cfg.seed, s));
    const std::size_t first = s * kSamplesPerStream;
    const std::size_t last = std::min(cfg.sample_count, first + kSamplesPerStream);
    out[s] = body(rng, first, last);
  });
  return out;
}

Vector gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

double log_uniform(std::mt19937_64& rng, double decades) {
  std::uniform_real_distribution<double> u(-decades, decades);
  return std::pow(10.0, u(rng));
}

Vector log_uniform_weights(std::mt19937_64& rng, Index m, double decades) {
  Vector d(m);
  for (double& x : d) x = log_uniform(rng, decades);
  return d;
}

double positive_part_norm(std::span<const double> r) {
  Vector p(r.size());
  for (Index i = 0; i < r.size(); ++i) p[i] = std::max(0.0, r[i]);
  return norm2(p);
}

// Feasible right-hand side b = A xhat + p with p >= 0, about half the
// entries of p exactly zero so that some constraints are tight.
Vector feasible_rhs(const Matrix& a, std::span<const double> xhat, std::mt19937_64& rng) {
  Vector b = a * xhat;
  std::bernoulli_distribution tight(0.5);
  std::normal_distribution<double> normal;
  for (double& bi : b)
    if (!tight(rng)) bi += std::abs(normal(rng)) * log_uniform(rng, 1.0);
  return b;
}

WeightSample best_of(const std::vector<WeightSample>& parts) {
  WeightSample out;
  for (const auto& p : parts)
    if (!p.best_weights.empty() && (out.best_weights.empty() || p.best > out.best)) out = p;
  return out;
}

RatioSample merge(const std::vector<RatioSample>& parts) {
  RatioSample out;
  for (const auto& p : parts) {
    out.max_ratio = std::max(out.max_ratio, p.max_ratio);
    out.samples += p.samples;
  }
  return out;
}

}  // namespace

void RngConfig::validate() const {
  if (sample_count < 1) throw DimensionError("sample_count must be at least 1");
  if (!(weight_log_range > 0.0) || !std::isfinite(weight_log_range))
    throw DimensionError("weight_log_range must be positive");
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

WeightSample sample_chi_lower(const Matrix& a, const RngConfig& cfg, const Tolerances& tol,
                              std::size_t threads) {
  cfg.validate();
  require_full_column_rank(a, tol);
  return best_of(run_streams<WeightSample>(cfg, threads, [&](auto& rng, std::size_t first,
                                                             std::size_t last) {
    WeightSample best;
    for (std::size_t k = first; k < last; ++k) {
      Vector d = log_uniform_weights(rng, a.rows(), cfg.weight_log_range);
      const double v = operator_norm(wls_pseudoinverse(a, d, tol));
      if (best.best_weights.empty() || v > best.best) best = {v, std::move(d)};
    }
    return best;
  }));
}

WeightSample sample_chibar_lower(const Matrix& a, const RngConfig& cfg, const Tolerances& tol,
                                 std::size_t threads) {
  cfg.validate();
  require_full_column_rank(a, tol);
  return best_of(run_streams<WeightSample>(cfg, threads, [&](auto& rng, std::size_t first,
                                                             std::size_t last) {
    WeightSample best;
    for (std::size_t k = first; k < last; ++k) {
      Vector d = log_uniform_weights(rng, a.rows(), cfg.weight_log_range);
      const double v = operator_norm(a * wls_pseudoinverse(a, d, tol));
      if (best.best_weights.empty() || v > best.best) best = {v, std::move(d)};
    }
    return best;
  }));
}

double directed_chi_witness(const Matrix& a, const Subset& block, const Tolerances& tol) {
  Vector d(a.rows(), 1.0);
  for (Index i : block) {
    if (i >= a.rows()) throw DimensionError("directed_chi_witness: row index out of range");
    d[i] = kDirectedWeight;
  }
  return operator_norm(wls_pseudoinverse(a, d, tol));
}

Vector constrained_lsq(const Matrix& c, std::span<const double> d, const Matrix& g,
                       std::span<const double> h, const Tolerances& tol) {
  const Index n = c.cols();
  if (c.rows() != d.size()) throw DimensionError("constrained_lsq: C and d disagree in size");
  if (g.cols() != n) throw DimensionError("constrained_lsq: G and C disagree in columns");
  if (g.rows() != h.size()) throw DimensionError("constrained_lsq: G and h disagree in size");
  (void)tol;

  // Unit constraint rows and an O(1) Hessian keep every KKT pivot on the
  // same scale; neither changes the minimizer or the multiplier signs.
  Matrix hess = c.inner_gram();
  Vector grad = transpose_times(c, d);
  const double hscale = hess.max_abs();
  if (hscale > 0.0) {
    for (Index i = 0; i < n; ++i) {
      for (double& x : hess.row(i)) x /= hscale;
      grad[i] /= hscale;
    }
  }
  const Index p = g.rows();
  Vector row_norm(p);
  for (Index i = 0; i < p; ++i) row_norm[i] = norm2(g.row(i));
  Matrix gn = g;
  Vector hn(h.begin(), h.end());
  for (Index i = 0; i < p; ++i) {
    if (row_norm[i] == 0.0) continue;
    for (double& x : gn.row(i)) x /= row_norm[i];
    hn[i] /= row_norm[i];
  }

  const auto feasible = [&](const Vector& z, double widen) {
    const double zn = norm2(z);
    for (Index i = 0; i < p; ++i)
      if (dot(g.row(i), z) >
          h[i] + widen * kPrimalRtol * (1.0 + std::abs(h[i]) + row_norm[i] * zn))
        return false;
    return true;
  };

  Subset f;
  for (Index card = 0; card <= std::min(p, n); ++card) {
    f.resize(card);
    for (Index i = 0; i < card; ++i) f[i] = i;
    while (true) {
      const Index size = n + card;
      Matrix kkt(size, size);
      Vector rhs(size);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) kkt(i, j) = hess(i, j);
        rhs[i] = grad[i];
      }
      for (Index a = 0; a < card; ++a) {
        for (Index j = 0; j < n; ++j) {
          kkt(n + a, j) = gn(f[a], j);
          kkt(j, n + a) = gn(f[a], j);
        }
        rhs[n + a] = hn[f[a]];
      }
      auto sol = lu_solve(kkt, rhs, 1e-12);
      if (!sol && card == 0)
        throw RankDeficientError("constrained_lsq: C is not full column rank");
      if (sol) {
        double lam_scale = 1.0;
        for (Index a = 0; a < card; ++a) lam_scale = std::max(lam_scale, std::abs((*sol)[n + a]));
        bool dual_ok = true;
        for (Index a = 0; a < card; ++a)
          if ((*sol)[n + a] < -kDualRtol * lam_scale) dual_ok = false;
        if (dual_ok) {
          Vector z(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(n));
          // Large multipliers make the KKT system ill-conditioned enough that
          // z can miss the feasibility test by rounding; refine near misses.
          for (int step = 0; !feasible(z, 1.0) && feasible(z, kNearMiss) && step < kRefineSteps;
               ++step) {
            Vector res = kkt * *sol;
            for (Index i = 0; i < size; ++i) res[i] = rhs[i] - res[i];
            const auto corr = lu_solve(kkt, std::move(res), 0.0);
            if (!corr) break;
            for (Index i = 0; i < size; ++i) (*sol)[i] += (*corr)[i];
            z.assign(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(n));
          }
          if (feasible(z, 1.0)) return z;
        }
      }
      Index pos = card;
      while (pos > 0 && f[pos - 1] == p - card + pos - 1) --pos;
      if (pos == 0) break;
      ++f[pos - 1];
      for (Index t = pos; t < card; ++t) f[t] = f[t - 1] + 1;
    }
  }
  throw InfeasibleError("constrained_lsq: {z : Gz <= h} is empty");
}

double hoffman_ratio(const Matrix& a, std::span<const double> b, std::span<const double> x0,
                     const Tolerances& tol) {
  Vector r = a * x0;
  for (Index i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double resid = positive_part_norm(r);
  if (resid == 0.0) return 0.0;
  const Vector z = constrained_lsq(Matrix::identity(a.cols()), x0, a, b, tol);
  Vector diff(x0.begin(), x0.end());
  for (Index j = 0; j < diff.size(); ++j) diff[j] -= z[j];
  return norm2(diff) / resid;
}

double hoffmanbar_ratio(const Matrix& a, std::span<const double> b, std::span<const double> z0,
                        const Tolerances& tol) {
  const Vector y = a * z0;
  Vector r = y;
  for (Index i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double resid = positive_part_norm(r);
  if (resid == 0.0) return 0.0;
  // With A = QR and w = Rz, ||Az - y|| = ||w - Q'y|| and Az <= b is Qw <= b,
  // which keeps A'A (squared condition number) out of the KKT systems.
  const Matrix q = qr_orthonormal(a, tol);
  const Vector w0 = transpose_times(q, y);
  Vector diff = constrained_lsq(Matrix::identity(a.cols()), w0, q, b, tol);
  for (Index j = 0; j < diff.size(); ++j) diff[j] -= w0[j];
  return norm2(diff) / resid;
}

RatioSample hoffman_ratio_sample(const Matrix& a, const RngConfig& cfg, const Tolerances& tol,
                                 std::size_t threads) {
  cfg.validate();
  require_full_column_rank(a, tol);
  return merge(run_streams<RatioSample>(cfg, threads, [&](auto& rng, std::size_t first,
                                                          std::size_t last) {
    RatioSample out;
    for (std::size_t k = first; k < last; ++k) {
      const Vector xhat = gaussian(rng, a.cols());
      const Vector b = feasible_rhs(a, xhat, rng);
      Vector x0 = gaussian(rng, a.cols());
      const double step = log_uniform(rng, 1.0);
      for (Index j = 0; j < x0.size(); ++j) x0[j] = xhat[j] + step * x0[j];
      const double ratio = hoffman_ratio(a, b, x0, tol);
      if (ratio == 0.0) continue;
      ++out.samples;
      out.max_ratio = std::max(out.max_ratio, ratio);
    }
    return out;
  }));
}

RatioSample hoffmanbar_ratio_sample(const Matrix& a, const RngConfig& cfg, const Tolerances& tol,
                                    std::size_t threads) {
  cfg.validate();
  require_full_column_rank(a, tol);
  return merge(run_streams<RatioSample>(cfg, threads, [&](auto& rng, std::size_t first,
                                                          std::size_t last) {
    RatioSample out;
    for (std::size_t k = first; k < last; ++k) {
      const Vector xhat = gaussian(rng, a.cols());
      const Vector b = feasible_rhs(a, xhat, rng);
      Vector z0 = gaussian(rng, a.cols());
      const double step = log_uniform(rng, 1.0);
      for (Index j = 0; j < z0.size(); ++j) z0[j] = xhat[j] + step * z0[j];
      const double ratio = hoffmanbar_ratio(a, b, z0, tol);
      if (ratio == 0.0) continue;
      ++out.samples;
      out.max_ratio = std::max(out.max_ratio, ratio);
    }
    return out;
  }));
}

double hoffman_ratio_guided(const Matrix& a, const MeasureResult& hr, const Tolerances& tol) {
  if (!hr.witness || hr.witness->size() != a.rows())
    throw DimensionError("hoffman_ratio_guided: result carries no witness for this matrix");
  Vector v = *hr.witness;
  for (double& x : v) x = std::max(0.0, x);
  const Vector y = transpose_times(a, v);
  const double yn = norm2(y);
  Vector b(a.rows(), 0.0);
  for (Index i = 0; i < a.rows(); ++i)
    if (v[i] == 0.0) b[i] = 1.0 + 10.0 * norm2(a.row(i)) * yn;
  return hoffman_ratio(a, b, y, tol);
}

ConeSampleRange cone_sample_check(const Matrix& g, const RngConfig& cfg, std::size_t threads) {
  cfg.validate();
  if (g.rows() != g.cols() || g.empty()) throw DimensionError("cone_sample_check: G must be square");
  const auto parts = run_streams<ConeSampleRange>(cfg, threads, [&](auto& rng, std::size_t first,
                                                                    std::size_t last) {
    ConeSampleRange out{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t k = first; k < last; ++k) {
      Vector v = gaussian(rng, g.rows());
      for (double& x : v) x = std::abs(x);
      const double nv = norm2(v);
      for (double& x : v) x /= nv;
      const double q = std::sqrt(std::max(0.0, dot(v, g * v)));
      out.min_seen = std::min(out.min_seen, q);
      out.max_seen = std::max(out.max_seen, q);
    }
    return out;
  });
  ConeSampleRange out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& p : parts) {
    out.min_seen = std::min(out.min_seen, p.min_seen);
    out.max_seen = std::max(out.max_seen, p.max_seen);
  }
  return out;
}

}  // namespace condmeas
