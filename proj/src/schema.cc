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

#include "glocal/schema.h"

#include <charconv>
#include <cmath>
#include <system_error>
#include <unordered_set>

namespace glocal {

std::optional<int> Feature::CategoryIndex(std::string_view value) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == value) return static_cast<int>(i);
  }
  return std::nullopt;
}

FeatureSchema::FeatureSchema(std::vector<Feature> features,
                             std::string target_name,
                             std::vector<std::string> class_names)
    : features_(std::move(features)),
      target_name_(std::move(target_name)),
      class_names_(std::move(class_names)) {
  if (class_names_.size() != 2 || class_names_[0] == class_names_[1]) {
    throw SchemaError("exactly two distinct class names are required");
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const Feature& f = features_[i];
    if (f.name.empty()) throw SchemaError("empty feature name");
    if (!index_.emplace(f.name, static_cast<int>(i)).second) {
      throw SchemaError("duplicate feature name: " + f.name);
    }
    if (f.is_categorical()) {
      if (f.categories.empty()) {
        throw SchemaError("categorical feature without values: " + f.name);
      }
      std::unordered_set<std::string> seen(f.categories.begin(),
                                           f.categories.end());
      if (seen.size() != f.categories.size()) {
        throw SchemaError("duplicate category in feature: " + f.name);
      }
    } else if (!(f.min <= f.max)) {
      throw SchemaError("invalid range for feature: " + f.name);
    }
  }
}

std::optional<int> FeatureSchema::FeatureIndex(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Label> FeatureSchema::ParseLabel(std::string_view text) const {
  for (Label l = 0; l < 2; ++l) {
    if (class_names_[l] == text) return l;
  }
  if (text == "0") return 0;
  if (text == "1") return 1;
  return std::nullopt;
}

std::string FeatureSchema::KindSignature() const {
  std::string out;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (i > 0) out += ',';
    out += features_[i].is_categorical() ? 'c' : 'n';
  }
  return out;
}

void CheckConforms(const FeatureSchema& schema, const Record& record) {
  if (record.size() != schema.size()) {
    throw SchemaError("record arity " + std::to_string(record.size()) +
                      " does not match schema arity " +
                      std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Feature& f = schema.feature(i);
    const double v = record[i];
    if (f.is_categorical()) {
      if (v != std::floor(v) || v < 0 ||
          v >= static_cast<double>(f.categories.size())) {
        throw SchemaError("categorical value out of domain for " + f.name);
      }
    } else if (!std::isfinite(v)) {
      throw SchemaError("non-finite value for " + f.name);
    }
  }
}

Record ParseRecord(const FeatureSchema& schema,
                   const std::vector<std::string>& tokens) {
  if (tokens.size() != schema.size()) {
    throw SchemaError("expected " + std::to_string(schema.size()) +
                      " values, got " + std::to_string(tokens.size()));
  }
  std::vector<double> values(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Feature& f = schema.feature(i);
    if (f.is_categorical()) {
      auto idx = f.CategoryIndex(tokens[i]);
      if (!idx) {
        throw SchemaError("unknown category '" + tokens[i] + "' for " +
                          f.name);
      }
      values[i] = *idx;
    } else {
      auto v = ParseNumber(tokens[i]);
      if (!v) throw SchemaError("bad number '" + tokens[i] + "' for " + f.name);
      values[i] = *v;
    }
  }
  return Record(std::move(values));
}

std::string FormatValue(const FeatureSchema& schema, const Record& record,
                        std::size_t i) {
  const Feature& f = schema.feature(i);
  if (f.is_categorical()) return f.categories.at(record.category(i));
  return FormatNumber(record[i]);
}

std::size_t LabeledDataset::CountLabel(Label label) const {
  std::size_t n = 0;
  for (Label l : labels) n += (l == label);
  return n;
}

Label LabeledDataset::MajorityClass() const {
  return CountLabel(1) > CountLabel(0) ? 1 : 0;
}

void LabeledDataset::Validate() const {
  if (records.size() != labels.size()) {
    throw SchemaError("record and label counts differ");
  }
  for (Label l : labels) {
    if (l != 0 && l != 1) throw SchemaError("label outside {0,1}");
  }
  for (const Record& r : records) CheckConforms(schema, r);
}

std::string FormatNumber(double value) {
  if (value == 0.0) value = 0.0;  // Drops the sign of -0.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> ParseNumber(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace glocal
