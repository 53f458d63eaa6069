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

#include "condmeas/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "condmeas/errors.hpp"

namespace condmeas {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Parses one finite decimal literal; column is 1-based for messages.
double parse_number(std::string_view field, std::size_t line, std::size_t column) {
  const std::string_view t = trim(field);
  if (t.empty()) throw ParseError("empty field", line, column);
  std::string_view body = t;
  if (body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size())
    throw ParseError("not a decimal number: '" + std::string(t) + "'", line, column);
  if (!std::isfinite(value))
    throw ParseError("non-finite value: '" + std::string(t) + "'", line, column);
  return value;
}

std::string located(const ParseError& e) {
  return std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what();
}

Matrix parse_csv(std::string_view text) {
  std::vector<Vector> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t blank_tail_start = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (blank_tail_start == 0) blank_tail_start = line_no;
    } else {
      if (blank_tail_start != 0)
        throw ParseError("blank line inside matrix data", blank_tail_start, 1);
      Vector row;
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = line.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
        row.push_back(parse_number(line.substr(start, end - start), line_no, start + 1));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size())
        throw ParseError("ragged row: expected " + std::to_string(rows.front().size()) +
                             " values, found " + std::to_string(row.size()),
                         line_no, 1);
      rows.push_back(std::move(row));
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  if (rows.empty()) throw ParseError("empty input", 1, 1);
  return Matrix::from_rows(rows);
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Matrix parse_json(std::string_view text) {
  if (trim(text).empty()) throw ParseError("empty input", 1, 1);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("invalid JSON", line, col);
  }
  if (!doc.is_object() || !doc.contains("rows"))
    throw ParseError("expected an object with key \"rows\"", 1, 1);
  const auto& rows = doc["rows"];
  if (!rows.is_array() || rows.empty()) throw ParseError("\"rows\" must be a non-empty array", 1, 1);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.is_array() || r.empty())
      throw ParseError("rows[" + std::to_string(i) + "] must be a non-empty array", 1, 1);
    Vector row;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (!r[j].is_number())
        throw ParseError("rows[" + std::to_string(i) + "][" + std::to_string(j) +
                             "] is not a number",
                         1, 1);
      const double v = r[j].get<double>();
      if (!std::isfinite(v))
        throw ParseError("rows[" + std::to_string(i) + "][" + std::to_string(j) +
                             "] is not finite",
                         1, 1);
      row.push_back(v);
    }
    if (!out.empty() && row.size() != out.front().size())
      throw ParseError("ragged row: rows[" + std::to_string(i) + "] has " +
                           std::to_string(row.size()) + " values, expected " +
                           std::to_string(out.front().size()),
                       1, 1);
    out.push_back(std::move(row));
  }
  return Matrix::from_rows(out);
}

void format_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void dump_value(std::string& out, const nlohmann::json& j, bool pretty, int depth) {
  const auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += pretty ? ": " : ":";
        dump_value(out, it.value(), pretty, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_value(out, e, pretty, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float:
      format_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

MatrixFormat infer_format(std::string_view path) {
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string_view::npos ? "" : std::string(path.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "csv") return MatrixFormat::csv;
  if (ext == "json") return MatrixFormat::json;
  throw DimensionError("cannot infer matrix format from '" + std::string(path) +
                       "'; use .csv/.json or --format");
}

Matrix parse_matrix_text(std::string_view text, MatrixFormat format) {
  return format == MatrixFormat::csv ? parse_csv(text) : parse_json(text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DimensionError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix parse_matrix(const std::string& path, std::optional<MatrixFormat> format) {
  const MatrixFormat fmt = format ? *format : infer_format(path);
  const std::string text = read_file(path);
  try {
    return parse_matrix_text(text, fmt);
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + located(e), e.line(), e.column());
  }
}

Vector parse_vector(std::string_view text, std::string_view what) {
  Vector out;
  std::size_t start = 0;
  const std::string_view t = trim(text);
  if (t.empty()) throw DimensionError(std::string(what) + ": empty vector");
  while (true) {
    const std::size_t comma = t.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? t.size() : comma;
    try {
      out.push_back(parse_number(t.substr(start, end - start), 1, start + 1));
    } catch (const ParseError& e) {
      throw DimensionError(std::string(what) + ": " + located(e));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string dump_document(const nlohmann::json& doc, bool pretty) {
  std::string out;
  dump_value(out, doc, pretty, 0);
  out += '\n';
  return out;
}

}  // namespace condmeas
