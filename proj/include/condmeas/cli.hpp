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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "condmeas/densela.hpp"
#include "condmeas/measures.hpp"
#include "condmeas/signed.hpp"

namespace condmeas::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kVerificationFailed = 2,
  kCapExceeded = 3,
};

// "verify_rtol=1e-9,feas_tol=1e-8" applied on top of base. Unknown keys and
// malformed values throw DimensionError naming the offending entry.
Tolerances parse_tolerances(const std::vector<std::string>& specs, Tolerances base = {});

// CONDMEAS_THREADS, or 1 when unset. Throws DimensionError when set to
// anything but a positive integer.
std::size_t threads_from_env();

nlohmann::json to_json(const MeasureResult& r);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const Tolerances& t);
nlohmann::json matrix_json(const Matrix& a);

// Full command-line entry point. Reports go to `out` (or --output), error
// messages to `err`; the return value is the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace condmeas::cli
