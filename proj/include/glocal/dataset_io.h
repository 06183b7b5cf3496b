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

// CSV datasets with a tab-separated schema sidecar.
//
// Sidecar lines:
//   <name>\tc[\t<cat1>,<cat2>,...]   categorical; categories default to the
//                                     sorted distinct values in the data
//   <name>\tn[\t<min>,<max>]         numeric; range defaults to the data range
//   <name>\ty\t<class0>,<class1>     optional: label column and class names
// Blank lines and lines starting with '#' are ignored.
//
// The CSV has a header row. The label column is the "y" column if declared,
// else a column named "class", else the last column that is not a feature.
// A CSV without such a column is unlabeled.

#ifndef GLOCAL_DATASET_IO_H_
#define GLOCAL_DATASET_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "glocal/schema.h"

namespace glocal {

struct SchemaFile {
  std::vector<Feature> features;
  // Per feature: categories (categorical) or min/max (numeric) were given.
  std::vector<bool> domain_given;
  std::optional<std::string> target_name;
  std::vector<std::string> class_names = {"0", "1"};
};

SchemaFile ParseSchemaFile(const std::string& text);
// Writes every domain explicitly, so reading it back needs no data.
std::string FormatSchemaFile(const FeatureSchema& schema);

// RFC 4180 style: quoted fields may hold commas, quotes ("") and newlines.
std::vector<std::vector<std::string>> ParseCsv(const std::string& text);
std::string FormatCsvRow(const std::vector<std::string>& fields);

struct LoadedDataset {
  LabeledDataset data;  // Labels are all 0 when unlabeled.
  bool labeled = false;
};

LoadedDataset ParseDataset(const std::string& csv_text,
                           const std::string& schema_text);
LoadedDataset LoadDataset(const std::string& csv_path,
                          const std::string& schema_path);
// Features in schema order, then the label column if with_labels.
std::string FormatDataset(const LabeledDataset& data, bool with_labels = true);

// Parses "v1,v2,..." (CSV quoting allowed) into a record.
Record ParseInlineRecord(const FeatureSchema& schema, const std::string& text);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& content);

}  // namespace glocal

#endif  // GLOCAL_DATASET_IO_H_
