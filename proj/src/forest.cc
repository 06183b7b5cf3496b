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

#include "glocal/forest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "glocal/random.h"

namespace glocal {

ForestModel::ForestModel(FeatureSchema schema, std::vector<DecisionTree> trees,
                         ForestParams params)
    : schema_(std::move(schema)), trees_(std::move(trees)), params_(params) {
  if (trees_.empty()) throw std::invalid_argument("forest without trees");
  for (const DecisionTree& t : trees_) {
    roots_.push_back(static_cast<int>(flat_.size()));
    // Preorder, so a left child always follows its parent.
    std::vector<std::pair<int, int>> stack = {{0, -1}};
    while (!stack.empty()) {
      const auto [id, parent] = stack.back();
      stack.pop_back();
      const int pos = static_cast<int>(flat_.size());
      if (parent >= 0) flat_[parent].right = pos;
      const TreeNode& n = t.node(id);
      FlatNode f;
      if (n.is_leaf()) {
        f.kind = FlatNode::kLeaf;
        f.right = n.label;
      } else {
        f.kind = n.categorical ? FlatNode::kCategory : FlatNode::kThreshold;
        f.feature = n.feature;
        f.value = n.categorical ? n.category : n.threshold;
        stack.push_back({n.right, pos});
        stack.push_back({n.left, -1});
      }
      flat_.push_back(f);
    }
  }
}

int ForestModel::features_per_split() const {
  return static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(schema_.size()))));
}

Label ForestModel::DoPredict(const Record& record) const {
  std::size_t ones = 0;
  const std::vector<double>& v = record.values();
  for (int id : roots_) {
    while (true) {
      const FlatNode& f = flat_[id];
      if (f.kind == FlatNode::kLeaf) {
        ones += f.right == 1;
        break;
      }
      const bool left = f.kind == FlatNode::kThreshold
                            ? v[f.feature] <= f.value
                            : static_cast<int>(v[f.feature]) ==
                                  static_cast<int>(f.value);
      id = left ? id + 1 : f.right;
    }
  }
  return 2 * ones > roots_.size() ? 1 : 0;
}

std::string ForestModel::Dump() const {
  std::ostringstream out;
  out << "forest " << trees_.size() << ' ' << params_.max_depth << ' '
      << params_.seed << '\n';
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    out << "tree " << i << '\n' << DumpTree(trees_[i]);
  }
  return out.str();
}

ForestModel TrainForest(const LabeledDataset& data,
                        const ForestParams& params) {
  data.Validate();
  if (data.size() < 2) {
    throw std::invalid_argument("forest training needs at least two records");
  }
  if (data.CountLabel(0) == 0 || data.CountLabel(1) == 0) {
    throw std::invalid_argument("forest training needs both classes");
  }
  if (params.n_trees < 1 || params.max_depth < 1) {
    throw std::invalid_argument("n_trees and max_depth must be positive");
  }
  const int n = static_cast<int>(data.size());
  CartParams cart;
  cart.max_depth = params.max_depth;
  cart.min_leaf = 1;
  cart.features_per_split = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(data.schema.size()))));

  std::vector<DecisionTree> trees;
  trees.reserve(params.n_trees);
  std::vector<int> rows(n);
  for (int t = 0; t < params.n_trees; ++t) {
    std::mt19937_64 rng(DeriveSeed(params.seed, "forest.tree", t));
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int& r : rows) r = pick(rng);
    trees.push_back(
        GrowCart(data.schema, data.records, data.labels, rows, cart, &rng));
  }
  return ForestModel(data.schema, std::move(trees), params);
}

ForestModel LoadForest(const std::string& dump, const FeatureSchema& schema) {
  std::vector<std::string> lines;
  std::istringstream in(dump);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error("empty forest dump");
  std::istringstream header(lines[0]);
  std::string magic;
  std::size_t n_trees = 0;
  ForestParams params;
  header >> magic >> n_trees >> params.max_depth >> params.seed;
  if (!header || magic != "forest") {
    throw std::runtime_error("malformed forest dump header");
  }
  params.n_trees = static_cast<int>(n_trees);
  std::vector<DecisionTree> trees;
  std::size_t pos = 1;
  for (std::size_t t = 0; t < n_trees; ++t) {
    if (pos >= lines.size() || lines[pos] != "tree " + std::to_string(t)) {
      throw std::runtime_error("missing tree header in forest dump");
    }
    ++pos;
    trees.push_back(LoadTree(lines, &pos));
  }
  for (const DecisionTree& tree : trees) {
    for (const TreeNode& node : tree.nodes()) {
      if (!node.is_leaf() &&
          node.feature >= static_cast<int>(schema.size())) {
        throw std::runtime_error("forest dump references unknown feature");
      }
    }
  }
  return ForestModel(schema, std::move(trees), params);
}

}  // namespace glocal
