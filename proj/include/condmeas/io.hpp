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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "condmeas/matrix.hpp"

namespace condmeas {

enum class MatrixFormat { csv, json };

// Extension-based: ".csv" or ".json" (case-insensitive). Throws
// DimensionError for anything else.
MatrixFormat infer_format(std::string_view path);

// CSV: one row per line, comma-separated decimal literals, no header.
// JSON: {"rows": [[...], ...]}. Both reject empty input, ragged rows and
// NaN/Inf; ParseError carries 1-based line and column.
Matrix parse_matrix_text(std::string_view text, MatrixFormat format);
Matrix parse_matrix(const std::string& path, std::optional<MatrixFormat> format = std::nullopt);

// "1, 2.5, -3" -> {1, 2.5, -3}
Vector parse_vector(std::string_view text, std::string_view what);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string read_file(const std::string& path);

// Key-sorted JSON text in which every double is printed with 17 significant
// digits, so equal documents always produce equal bytes.
std::string dump_document(const nlohmann::json& doc, bool pretty);

}  // namespace condmeas
