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

#include "condmeas/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "condmeas/coneig.hpp"
#include "condmeas/errors.hpp"
#include "condmeas/io.hpp"
#include "condmeas/oracle.hpp"

namespace condmeas::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string input;
  std::string format;
  std::string output;
  std::vector<std::string> measures;
  std::vector<std::string> tol;
  std::string point;
  std::string rhs;
  std::string weights;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  bool pretty = false;
  bool filter_feasible = false;
  bool force = false;
  bool timing = false;
};

// Raised caps for --force. Validation still runs on every input.
Caps forced_caps() {
  Caps c;
  c.subset_cap = 10000000;
  c.signature_cap = 20;
  c.support_cap = 24;
  return c;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json subsets_json(const std::vector<Subset>& s) {
  json out = json::array();
  for (const auto& j : s) out.push_back(j);
  return out;
}

json vectors_json(const std::vector<Vector>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(v);
  return out;
}

json caps_json(const Caps& c, bool forced) {
  return {{"subset_cap", c.subset_cap},
          {"signature_cap", c.signature_cap},
          {"support_cap", c.support_cap},
          {"forced", forced}};
}

class PhaseClock {
 public:
  explicit PhaseClock(json& sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  void mark(const std::string& phase) {
    const auto now = std::chrono::steady_clock::now();
    sink_[phase] = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
  }

 private:
  json& sink_;
  std::chrono::steady_clock::time_point start_;
};

bool all_pass(const json& doc) {
  for (const auto& r : doc["verifications"])
    if (!r["pass"].get<bool>()) return false;
  return true;
}

bool has_zero_row(const Matrix& a) {
  const double scale = a.max_abs();
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s = std::max(s, std::abs(v));
    if (s <= 1e-12 * scale) return true;
  }
  return false;
}

void run_compute(const Options& opt, const Matrix& a, const Tolerances& tol, const Caps& caps,
                 json& doc, PhaseClock& clock) {
  require_full_column_rank(a, tol);
  std::vector<MeasureKind> kinds;
  const bool explicit_list = !opt.measures.empty();
  if (explicit_list) {
    for (const auto& name : opt.measures) {
      const auto k = parse_measure(name);
      if (!k) throw DimensionError("--measures: unknown measure '" + name + "'");
      if (std::find(kinds.begin(), kinds.end(), *k) == kinds.end()) kinds.push_back(*k);
    }
  } else {
    kinds.assign(std::begin(kAllMeasures), std::end(kAllMeasures));
  }
  for (MeasureKind k : kinds) {
    try {
      const MeasureResult r = compute_measure(k, a, tol, caps);
      if (r.degenerate)
        doc["warnings"].push_back(std::string(r.name()) +
                                  ": certificate taken from a degenerate eigenspace");
      if (k == MeasureKind::renegar) doc["warnings"].push_back(r.notes.front());
      doc["measures"].push_back(to_json(r));
    } catch (const NotStrictlyFeasibleError& e) {
      if (explicit_list) throw;
      doc["warnings"].push_back(std::string(to_string(k)) + ": skipped, " + e.what());
    }
  }
  clock.mark("measures");
}

void run_scan(const Options& opt, const Matrix& a, const Tolerances& tol, const Caps& caps,
              std::size_t threads, json& doc, PhaseClock& clock) {
  require_full_column_rank(a, tol);
  const SignedScan s = signed_max_hoffman(a, opt.filter_feasible, tol, caps, threads);
  doc["scan"] = {{"value", s.value},
                 {"argmax", s.argmax.str()},
                 {"argmax_index", s.argmax_index},
                 {"scanned", s.scanned},
                 {"feasible", s.feasible},
                 {"chi", s.chi},
                 {"filter_feasible", opt.filter_feasible}};
  doc["verifications"].push_back(to_json(s.report));
  if (opt.filter_feasible && has_zero_row(a))
    doc["warnings"].push_back("zero rows present: no signature is strictly feasible");
  clock.mark("scan");
}

void run_verify(const Options& opt, const Matrix& a, const Tolerances& tol, const Caps& caps,
                std::size_t threads, json& doc, PhaseClock& clock) {
  require_full_column_rank(a, tol);
  for (const auto& r : verify_identities(a, tol, opt.seed, caps, threads))
    doc["verifications"].push_back(to_json(r));
  clock.mark("identities");

  RngConfig rng;
  rng.seed = opt.seed;
  rng.sample_count = opt.samples;
  rng.validate();
  const MeasureResult c = chi(a, tol, caps);
  const MeasureResult cb = chibar(a, tol, caps);
  const MeasureResult h = hoffman(a, tol, caps);
  const MeasureResult hb = hoffmanbar(a, tol, caps);
  for (const auto* r : {&c, &cb, &h, &hb}) doc["measures"].push_back(to_json(*r));

  auto add = [&](VerificationReport r, std::vector<std::string> notes = {}) {
    r.notes = std::move(notes);
    doc["verifications"].push_back(to_json(r));
  };
  const WeightSample ws = sample_chi_lower(a, rng, tol, threads);
  add(make_report("oracle.chi", "sampled ||A_D^+|| <= chi(A)", ws.best, c.value, tol,
                  CheckKind::upper_bound));
  const WeightSample wb = sample_chibar_lower(a, rng, tol, threads);
  add(make_report("oracle.chibar", "sampled ||A A_D^+|| <= chibar(A)", wb.best, cb.value, tol,
                  CheckKind::upper_bound));
  const double directed = directed_chi_witness(a, *c.argmax_subset, tol);
  add(make_report("oracle.chi_directed", "0.999 chi(A) <= ||A_D^+|| with weight 1e8 on argmax",
                  0.999 * c.value, directed, tol, CheckKind::upper_bound));
  const RatioSample hs = hoffman_ratio_sample(a, rng, tol, threads);
  add(make_report("oracle.hoffman", "sampled error-bound ratio <= H(A)", hs.max_ratio, h.value,
                  tol, CheckKind::upper_bound),
      {"infeasible start points: " + std::to_string(hs.samples)});
  const RatioSample hbs = hoffmanbar_ratio_sample(a, rng, tol, threads);
  add(make_report("oracle.hoffmanbar", "sampled image-space ratio <= Hbar(A)", hbs.max_ratio,
                  hb.value, tol, CheckKind::upper_bound),
      {"infeasible start points: " + std::to_string(hbs.samples)});
  const ConeSampleRange cr = cone_sample_check(a.outer_gram(), rng, threads);
  add(make_report("oracle.cone_max", "sampled sqrt(v^T A A^T v) <= cone max", cr.max_seen,
                  cone_max_factor(a, tol, caps).value, tol, CheckKind::upper_bound));
  add(make_report("oracle.cone_min", "cone min <= sampled sqrt(v^T A A^T v)",
                  cone_min_factor(a, tol, caps).value, cr.min_seen, tol, CheckKind::upper_bound));
  clock.mark("oracles");

  if (has_zero_row(a))
    doc["warnings"].push_back(
        "zero rows present: strict-feasibility identities checked on the stripped matrix");
  for (const auto* r : {&c, &cb, &h, &hb})
    if (r->degenerate)
      doc["warnings"].push_back(std::string(r->name()) +
                                ": certificate taken from a degenerate eigenspace");
}

void run_project(const Options& opt, const Matrix& a, const Tolerances& tol, json& doc,
                 PhaseClock& clock) {
  if (opt.point.empty()) throw DimensionError("--point is required for project");
  if (opt.rhs.empty()) throw DimensionError("--rhs is required for project");
  const Vector x0 = parse_vector(opt.point, "--point");
  const Vector b = parse_vector(opt.rhs, "--rhs");
  if (x0.size() != a.cols())
    throw DimensionError("--point: expected " + std::to_string(a.cols()) + " values, got " +
                         std::to_string(x0.size()));
  if (b.size() != a.rows())
    throw DimensionError("--rhs: expected " + std::to_string(a.rows()) + " values, got " +
                         std::to_string(b.size()));
  const Vector x = constrained_lsq(Matrix::identity(a.cols()), x0, a, b, tol);
  Vector diff(x.size());
  for (Index i = 0; i < x.size(); ++i) diff[i] = x[i] - x0[i];
  const Vector ax0 = a * x0;
  Vector viol(b.size());
  for (Index i = 0; i < b.size(); ++i) viol[i] = std::max(0.0, ax0[i] - b[i]);
  const double dist = norm2(diff);
  const double resid = norm2(viol);
  doc["projection"] = {{"point", x0},
                       {"rhs", b},
                       {"projection", x},
                       {"distance", dist},
                       {"violation", resid},
                       {"ratio", resid > 0.0 ? dist / resid : 0.0}};
  clock.mark("project");
}

void run_wls(const Options& opt, const Matrix& a, const Tolerances& tol, json& doc,
             PhaseClock& clock) {
  if (opt.weights.empty()) throw DimensionError("--weights is required for wls");
  if (opt.rhs.empty()) throw DimensionError("--rhs is required for wls");
  const Vector d = parse_vector(opt.weights, "--weights");
  const Vector b = parse_vector(opt.rhs, "--rhs");
  if (d.size() != a.rows())
    throw DimensionError("--weights: expected " + std::to_string(a.rows()) + " values, got " +
                         std::to_string(d.size()));
  for (Index i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0))
      throw DimensionError("--weights: entry " + std::to_string(i + 1) + " is not positive");
  if (b.size() != a.rows())
    throw DimensionError("--rhs: expected " + std::to_string(a.rows()) + " values, got " +
                         std::to_string(b.size()));
  const Matrix p = wls_pseudoinverse(a, d, tol);
  doc["wls"] = {{"weights", d},
                {"rhs", b},
                {"solution", p * b},
                {"pseudoinverse_norm", operator_norm(p)}};
  clock.mark("wls");
}

int fail(std::ostream& err, int code, const std::string& msg) {
  err << "condmeas: " << msg << '\n';
  return code;
}

}  // namespace

Tolerances parse_tolerances(const std::vector<std::string>& specs, Tolerances base) {
  for (const auto& spec : specs) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const std::size_t comma = std::min(spec.find(',', start), spec.size());
      const std::string item = spec.substr(start, comma - start);
      start = comma + 1;
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw DimensionError("--tol: expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc() || ptr != val.data() + val.size() || val.empty())
        throw DimensionError("--tol: '" + key + "' has non-numeric value '" + val + "'");
      if (key == "rank_rtol") {
        base.rank_rtol = v;
      } else if (key == "nonneg_atol") {
        base.nonneg_atol = v;
      } else if (key == "feas_tol") {
        base.feas_tol = v;
      } else if (key == "verify_rtol") {
        base.verify_rtol = v;
      } else {
        throw DimensionError("--tol: unknown tolerance '" + key + "'");
      }
    }
  }
  try {
    base.validate();
  } catch (const DimensionError& e) {
    throw DimensionError(std::string("--tol: ") + e.what());
  }
  return base;
}

std::size_t threads_from_env() {
  const char* raw = std::getenv("CONDMEAS_THREADS");
  if (raw == nullptr) return 1;
  const std::string_view s(raw);
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || n == 0)
    throw DimensionError("CONDMEAS_THREADS must be a positive integer, got '" +
                         std::string(s) + "'");
  return n;
}

json to_json(const MeasureResult& r) {
  json j;
  j["name"] = std::string(r.name());
  j["value"] = r.value;
  j["argmax_subset"] = r.argmax_subset ? json(*r.argmax_subset) : json(nullptr);
  j["ties"] = subsets_json(r.ties);
  j["witness"] = r.witness ? json(*r.witness) : json(nullptr);
  j["degenerate"] = r.degenerate;
  j["notes"] = r.notes;
  return j;
}

json to_json(const VerificationReport& r) {
  json j;
  j["identity"] = r.identity;
  j["statement"] = r.statement;
  j["kind"] = r.kind == CheckKind::equality ? "equality" : "upper_bound";
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["abs_err"] = r.abs_err;
  j["rel_err"] = r.rel_err;
  j["pass"] = r.pass;
  j["signature"] = r.signature ? json(r.signature->str()) : json(nullptr);
  j["subsets"] = subsets_json(r.subsets);
  j["vectors"] = vectors_json(r.vectors);
  j["notes"] = r.notes;
  return j;
}

json to_json(const Tolerances& t) {
  return {{"rank_rtol", t.rank_rtol},
          {"nonneg_atol", t.nonneg_atol},
          {"feas_tol", t.feas_tol},
          {"verify_rtol", t.verify_rtol}};
}

json matrix_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    rows.push_back(Vector(r.begin(), r.end()));
  }
  return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Exact condition measures of small full-column-rank matrices", "condmeas"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", opt.input, "matrix file (.csv or .json)")->required();
    sub->add_option("--format", opt.format, "force the matrix format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", opt.tol, "tolerance overrides, key=value[,key=value...]");
    sub->add_option("--output", opt.output, "write the report here instead of stdout");
    sub->add_flag("--pretty", opt.pretty, "indent the report");
    sub->add_flag("--force", opt.force, "raise enumeration caps");
    sub->add_flag("--timing", opt.timing, "include per-phase wall time (not reproducible)");
    sub->add_option("--seed", opt.seed, "RNG seed");
  };

  auto* compute = app.add_subcommand("compute", "compute condition measures");
  add_common(compute);
  compute->add_option("--measures", opt.measures, "comma-separated measure names")
      ->delimiter(',');

  auto* scan = app.add_subcommand("scan-signed", "max of H(SA) over row signatures S");
  add_common(scan);
  scan->add_flag("--filter-feasible", opt.filter_feasible,
                 "only signatures with SA x > 0 solvable");

  auto* verify = app.add_subcommand("verify", "check identities and oracle bounds");
  add_common(verify);
  verify->add_option("--samples", opt.samples, "oracle samples per check");

  auto* project = app.add_subcommand("project", "project a point onto {x : Ax <= b}");
  add_common(project);
  project->add_option("--point", opt.point, "x0, comma-separated");
  project->add_option("--rhs", opt.rhs, "b, comma-separated");

  auto* wls = app.add_subcommand("wls", "weighted least squares A_D^+ b");
  add_common(wls);
  wls->add_option("--weights", opt.weights, "positive diagonal of D, comma-separated");
  wls->add_option("--rhs", opt.rhs, "b, comma-separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json doc;
  json timing = json::object();
  PhaseClock clock(timing);
  try {
    const std::size_t threads = threads_from_env();
    const Tolerances tol = parse_tolerances(opt.tol);
    const Caps caps = opt.force ? forced_caps() : Caps{};

    std::optional<MatrixFormat> fmt;
    if (opt.format == "csv") fmt = MatrixFormat::csv;
    if (opt.format == "json") fmt = MatrixFormat::json;
    if (!fmt) {
      try {
        fmt = infer_format(opt.input);
      } catch (const DimensionError& e) {
        throw DimensionError(std::string("--input: ") + e.what());
      }
    }
    const std::string bytes = read_file(opt.input);
    Matrix a;
    try {
      a = parse_matrix_text(bytes, *fmt);
    } catch (const ParseError& e) {
      throw ParseError(opt.input + ":" + std::to_string(e.line()) + ":" +
                           std::to_string(e.column()) + ": " + e.what(),
                       e.line(), e.column());
    }
    clock.mark("parse");

    doc["command"] = command;
    doc["input"] = {{"path", opt.input},
                    {"format", *fmt == MatrixFormat::csv ? "csv" : "json"},
                    {"m", a.rows()},
                    {"n", a.cols()},
                    {"checksum", "fnv1a64:" + hex64(fnv1a64(bytes))},
                    {"matrix", matrix_json(a)}};
    doc["tolerances"] = to_json(tol);
    doc["caps"] = caps_json(caps, opt.force);
    doc["seed"] = opt.seed;
    doc["measures"] = json::array();
    doc["verifications"] = json::array();
    doc["warnings"] = json::array();

    if (command == "compute") {
      run_compute(opt, a, tol, caps, doc, clock);
    } else if (command == "scan-signed") {
      run_scan(opt, a, tol, caps, threads, doc, clock);
    } else if (command == "verify") {
      doc["samples"] = opt.samples;
      run_verify(opt, a, tol, caps, threads, doc, clock);
    } else if (command == "project") {
      run_project(opt, a, tol, doc, clock);
    } else {
      run_wls(opt, a, tol, doc, clock);
    }
  } catch (const CapExceededError& e) {
    return fail(err, kCapExceeded, std::string(e.what()) + " (use --force to raise the cap)");
  } catch (const ParseError& e) {
    return fail(err, kInputError, e.what());
  } catch (const NotStrictlyFeasibleError& e) {
    return fail(err, kInputError, std::string("--input: ") + e.what());
  } catch (const RankDeficientError& e) {
    return fail(err, kInputError, std::string("--input: ") + e.what());
  } catch (const Error& e) {
    return fail(err, kInputError, e.what());
  } catch (const std::exception& e) {
    return fail(err, kInputError, std::string("internal error: ") + e.what());
  }

  if (opt.timing) doc["timing_ms"] = timing;
  const std::string text = dump_document(doc, opt.pretty);
  if (opt.output.empty()) {
    out << text;
  } else {
    std::ofstream f(opt.output, std::ios::binary);
    if (!f || !(f << text)) return fail(err, kInputError, "--output: cannot write '" + opt.output + "'");
  }
  return all_pass(doc) ? kOk : kVerificationFailed;
}

}  // namespace condmeas::cli
