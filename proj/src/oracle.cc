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

#include "glocal/oracle.h"

namespace glocal {

std::vector<Label> Oracle::DoPredictBatch(
    std::span<const Record> records) const {
  std::vector<Label> out;
  out.reserve(records.size());
  for (const Record& r : records) out.push_back(DoPredict(r));
  return out;
}

LabeledDataset Relabel(const Oracle& oracle, const LabeledDataset& data) {
  LabeledDataset out;
  out.schema = data.schema;
  out.records = data.records;
  out.labels = oracle.PredictBatch(out.records);
  return out;
}

}  // namespace glocal
