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

// Binary CART decision trees with Gini impurity.
//
// Continuous splits are "value <= threshold" with thresholds at midpoints
// between consecutive distinct values. Categorical splits are one-vs-rest
// "value == category". The left child always holds the records satisfying the
// split condition.

#ifndef GLOCAL_DECISION_TREE_H_
#define GLOCAL_DECISION_TREE_H_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "glocal/schema.h"

namespace glocal {

struct TreeNode {
  // Internal nodes.
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;  // Continuous split.
  int category = 0;        // Categorical split.
  int left = -1;
  int right = -1;
  // Leaves (also filled for internal nodes, for diagnostics).
  Label label = 0;
  std::array<std::int64_t, 2> counts = {0, 0};

  bool is_leaf() const { return left < 0; }
  bool Satisfies(const Record& record) const {
    return categorical ? record.category(feature) == category
                       : record[feature] <= threshold;
  }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  // Node index of the leaf reached by `record`.
  int LeafIndex(const Record& record) const;
  Label Predict(const Record& record) const {
    return nodes_[LeafIndex(record)].label;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_[i]; }
  int depth() const;
  int num_leaves() const;
  // Parent of every node, -1 for the root.
  std::vector<int> Parents() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct CartParams {
  int max_depth = 8;
  int min_leaf = 1;
  // Features sampled per split; 0 means all features.
  int features_per_split = 0;
};

// Grows a tree on the rows `rows` of (records, labels). Ties in impurity are
// broken by lowest feature index, then lowest threshold (category index).
// `rng` is only used when features_per_split > 0.
DecisionTree GrowCart(const FeatureSchema& schema,
                      std::span<const Record> records,
                      std::span<const Label> labels,
                      std::span<const int> rows, const CartParams& params,
                      std::mt19937_64* rng = nullptr);

// One line per node in preorder:
//   split <feature> n <threshold> <count0> <count1>
//   split <feature> c <category> <count0> <count1>
//   leaf <label> <count0> <count1>
std::string DumpTree(const DecisionTree& tree);
// Inverse of DumpTree, consuming lines from `lines` starting at `*pos`.
DecisionTree LoadTree(const std::vector<std::string>& lines, std::size_t* pos);

}  // namespace glocal

#endif  // GLOCAL_DECISION_TREE_H_
