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

// Tabular data model: feature schema, records and labeled datasets.

#ifndef GLOCAL_SCHEMA_H_
#define GLOCAL_SCHEMA_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace glocal {

// Binary class label, always 0 or 1.
using Label = int;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FeatureKind { kCategorical, kContinuous };

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  // Categorical only.
  std::vector<std::string> categories;
  // Continuous only. Observed range.
  double min = 0.0;
  double max = 0.0;

  bool is_categorical() const { return kind == FeatureKind::kCategorical; }
  double range() const { return max - min; }
  // Index of `value` in `categories`, if present.
  std::optional<int> CategoryIndex(std::string_view value) const;

  bool operator==(const Feature&) const = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Validates names are unique, value sets non-empty and min <= max.
  explicit FeatureSchema(std::vector<Feature> features,
                         std::string target_name = "class",
                         std::vector<std::string> class_names = {"0", "1"});

  std::size_t size() const { return features_.size(); }
  const Feature& feature(std::size_t i) const { return features_.at(i); }
  const std::vector<Feature>& features() const { return features_; }
  std::optional<int> FeatureIndex(std::string_view name) const;

  const std::string& target_name() const { return target_name_; }
  const std::string& class_name(Label label) const {
    return class_names_.at(label);
  }
  // Accepts a class name or the literal "0"/"1".
  std::optional<Label> ParseLabel(std::string_view text) const;

  // "n,n,c" style kind list used by the oracle handshake.
  std::string KindSignature() const;

  bool operator==(const FeatureSchema& other) const {
    return features_ == other.features_ && target_name_ == other.target_name_ &&
           class_names_ == other.class_names_;
  }

 private:
  std::vector<Feature> features_;
  std::string target_name_ = "class";
  std::vector<std::string> class_names_ = {"0", "1"};
  std::unordered_map<std::string, int> index_;
};

// One value per schema feature. Continuous values are stored as-is;
// categorical values are stored as the index into the feature's category list.
class Record {
 public:
  Record() = default;
  explicit Record(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  int category(std::size_t i) const { return static_cast<int>(values_[i]); }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const Record&) const = default;
  auto operator<=>(const Record&) const = default;

 private:
  std::vector<double> values_;
};

// Throws SchemaError when the arity differs, a categorical index is out of
// range or a continuous value is not finite.
void CheckConforms(const FeatureSchema& schema, const Record& record);

// Builds a record from textual values (category names / decimal numbers).
Record ParseRecord(const FeatureSchema& schema,
                   const std::vector<std::string>& tokens);
// Textual value of feature `i` of `record`; numbers use shortest round-trip.
std::string FormatValue(const FeatureSchema& schema, const Record& record,
                        std::size_t i);

struct LabeledDataset {
  FeatureSchema schema;
  std::vector<Record> records;
  std::vector<Label> labels;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  // Label count per class.
  std::size_t CountLabel(Label label) const;
  // Majority class, ties resolve to 0.
  Label MajorityClass() const;
  // Throws SchemaError on |records| != |labels| or labels outside {0,1}.
  void Validate() const;
};

// Shortest decimal representation that parses back to the same double.
std::string FormatNumber(double value);
// Parses a full decimal number; nullopt on trailing garbage.
std::optional<double> ParseNumber(std::string_view text);

}  // namespace glocal

#endif  // GLOCAL_SCHEMA_H_
