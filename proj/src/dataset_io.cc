/*
 * Copyright 2026 The Glocal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "glocal/dataset_io.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace glocal {
namespace {

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SchemaFile ParseSchemaFile(const std::string& text) {
  SchemaFile out;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || Trim(line)[0] == '#') continue;
    const std::vector<std::string> cols = Split(line, '\t');
    const std::string where = "schema line " + std::to_string(line_no);
    if (cols.size() < 2 || cols.size() > 3) {
      throw SchemaError(where + ": expected 2 or 3 tab-separated fields");
    }
    const std::string name = Trim(cols[0]);
    const std::string kind = Trim(cols[1]);
    std::vector<std::string> values;
    if (cols.size() == 3) {
      for (const std::string& v : Split(cols[2], ',')) values.push_back(Trim(v));
    }
    if (kind == "y") {
      if (values.size() != 2) {
        throw SchemaError(where + ": label line needs two class names");
      }
      out.target_name = name;
      out.class_names = values;
      continue;
    }
    Feature f;
    f.name = name;
    if (kind == "c") {
      f.kind = FeatureKind::kCategorical;
      f.categories = values;
    } else if (kind == "n") {
      f.kind = FeatureKind::kContinuous;
      if (!values.empty()) {
        if (values.size() != 2) {
          throw SchemaError(where + ": numeric range must be <min>,<max>");
        }
        const auto lo = ParseNumber(values[0]);
        const auto hi = ParseNumber(values[1]);
        if (!lo || !hi) throw SchemaError(where + ": bad numeric range");
        f.min = *lo;
        f.max = *hi;
      }
    } else {
      throw SchemaError(where + ": kind must be c, n or y");
    }
    out.domain_given.push_back(!values.empty());
    out.features.push_back(std::move(f));
  }
  if (out.features.empty()) throw SchemaError("schema declares no features");
  return out;
}

std::string FormatSchemaFile(const FeatureSchema& schema) {
  std::string out;
  for (const Feature& f : schema.features()) {
    out += f.name;
    if (f.is_categorical()) {
      out += "\tc\t";
      for (std::size_t i = 0; i < f.categories.size(); ++i) {
        if (i > 0) out += ',';
        out += f.categories[i];
      }
    } else {
      out += "\tn\t" + FormatNumber(f.min) + "," + FormatNumber(f.max);
    }
    out += '\n';
  }
  out += schema.target_name() + "\ty\t" + schema.class_name(0) + "," +
         schema.class_name(1) + "\n";
  return out;
}

std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      row_has_content = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_has_content || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      row_has_content = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw SchemaError("unterminated quoted CSV field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string FormatCsvRow(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  return out;
}

LoadedDataset ParseDataset(const std::string& csv_text,
                           const std::string& schema_text) {
  SchemaFile sf = ParseSchemaFile(schema_text);
  const auto rows = ParseCsv(csv_text);
  if (rows.empty()) throw SchemaError("CSV has no header row");
  const std::vector<std::string>& header = rows.front();

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> feature_col;
  for (const Feature& f : sf.features) {
    auto c = column(f.name);
    if (!c) throw SchemaError("CSV lacks column for feature " + f.name);
    feature_col.push_back(*c);
  }
  std::optional<std::size_t> label_col;
  std::string target = sf.target_name.value_or("class");
  if (sf.target_name) {
    label_col = column(*sf.target_name);
  } else if ((label_col = column("class"))) {
  } else {
    for (std::size_t c = header.size(); c-- > 0;) {
      if (std::find(feature_col.begin(), feature_col.end(), c) ==
          feature_col.end()) {
        label_col = c;
        target = header[c];
        break;
      }
    }
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw SchemaError("CSV row " + std::to_string(r) + " has " +
                        std::to_string(rows[r].size()) + " fields, header has " +
                        std::to_string(header.size()));
    }
  }
  // Fill domains that the sidecar left open.
  for (std::size_t i = 0; i < sf.features.size(); ++i) {
    if (sf.domain_given[i]) continue;
    Feature& f = sf.features[i];
    if (f.is_categorical()) {
      std::set<std::string> seen;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        seen.insert(rows[r][feature_col[i]]);
      }
      f.categories.assign(seen.begin(), seen.end());
    } else {
      if (rows.size() < 2) {
        throw SchemaError("no range for " + f.name + " and no data rows");
      }
      bool first = true;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto v = ParseNumber(rows[r][feature_col[i]]);
        if (!v) {
          throw SchemaError("bad number '" + rows[r][feature_col[i]] +
                            "' for " + f.name + " on CSV row " +
                            std::to_string(r));
        }
        f.min = first ? *v : std::min(f.min, *v);
        f.max = first ? *v : std::max(f.max, *v);
        first = false;
      }
    }
  }

  LoadedDataset out;
  out.data.schema = FeatureSchema(std::move(sf.features), target,
                                  std::move(sf.class_names));
  out.labeled = label_col.has_value();
  const FeatureSchema& schema = out.data.schema;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::vector<std::string> tokens;
    tokens.reserve(feature_col.size());
    for (std::size_t c : feature_col) tokens.push_back(rows[r][c]);
    try {
      out.data.records.push_back(ParseRecord(schema, tokens));
      CheckConforms(schema, out.data.records.back());
    } catch (const SchemaError& e) {
      throw SchemaError("CSV row " + std::to_string(r) + ": " + e.what());
    }
    Label label = 0;
    if (label_col) {
      auto l = schema.ParseLabel(Trim(rows[r][*label_col]));
      if (!l) {
        throw SchemaError("CSV row " + std::to_string(r) + ": bad label '" +
                          rows[r][*label_col] + "'");
      }
      label = *l;
    }
    out.data.labels.push_back(label);
  }
  return out;
}

LoadedDataset LoadDataset(const std::string& csv_path,
                          const std::string& schema_path) {
  return ParseDataset(ReadFile(csv_path), ReadFile(schema_path));
}

std::string FormatDataset(const LabeledDataset& data, bool with_labels) {
  std::vector<std::string> header;
  for (const Feature& f : data.schema.features()) header.push_back(f.name);
  if (with_labels) header.push_back(data.schema.target_name());
  std::string out = FormatCsvRow(header) + "\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    std::vector<std::string> fields;
    for (std::size_t i = 0; i < data.schema.size(); ++i) {
      fields.push_back(FormatValue(data.schema, data.records[r], i));
    }
    if (with_labels) fields.push_back(data.schema.class_name(data.labels[r]));
    out += FormatCsvRow(fields) + "\n";
  }
  return out;
}

Record ParseInlineRecord(const FeatureSchema& schema, const std::string& text) {
  const auto rows = ParseCsv(text);
  if (rows.size() != 1) throw SchemaError("expected one record");
  std::vector<std::string> tokens;
  for (const std::string& t : rows.front()) tokens.push_back(Trim(t));
  Record r = ParseRecord(schema, tokens);
  CheckConforms(schema, r);
  return r;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace glocal
