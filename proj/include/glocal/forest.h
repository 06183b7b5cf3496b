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

// Random forest black box: bagged CART trees with per-split feature sampling.

#ifndef GLOCAL_FOREST_H_
#define GLOCAL_FOREST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "glocal/decision_tree.h"
#include "glocal/oracle.h"
#include "glocal/schema.h"

namespace glocal {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 16;
  std::uint64_t seed = 0;
};

class ForestModel : public Oracle {
 public:
  ForestModel(FeatureSchema schema, std::vector<DecisionTree> trees,
              ForestParams params);

  bool concurrency_safe() const override { return true; }

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestParams& params() const { return params_; }
  // ceil(sqrt(number of features)).
  int features_per_split() const;

  // Plain-text dump; LoadForest reads it back. Schema is not included.
  std::string Dump() const;

 protected:
  // Majority vote; ties go to class 0.
  Label DoPredict(const Record& record) const override;

 private:
  // All trees packed in preorder for prediction.
  struct FlatNode {
    enum Kind : std::int32_t { kLeaf, kThreshold, kCategory };
    double value = 0.0;
    std::int32_t feature = 0;
    Kind kind = kLeaf;
    std::int32_t right = 0;  // Label for leaves.
  };

  FeatureSchema schema_;
  std::vector<DecisionTree> trees_;
  ForestParams params_;
  std::vector<FlatNode> flat_;
  std::vector<int> roots_;
};

// Bootstrap samples of size n, Gini CART, ceil(sqrt(m)) candidate features per
// split. Throws std::invalid_argument on fewer than two records or a single
// class.
ForestModel TrainForest(const LabeledDataset& data, const ForestParams& params);

ForestModel LoadForest(const std::string& dump, const FeatureSchema& schema);

}  // namespace glocal

#endif  // GLOCAL_FOREST_H_
