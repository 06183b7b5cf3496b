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

#include "glocal/surrogate.h"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "glocal/rule_text.h"

namespace glocal {
namespace {

struct PathStep {
  int node = 0;
  bool left = true;
};

struct LeafPath {
  int leaf = 0;
  std::vector<PathStep> steps;
};

std::vector<LeafPath> EnumerateLeafPaths(const DecisionTree& tree) {
  std::vector<LeafPath> out;
  struct Frame {
    int node;
    std::vector<PathStep> steps;
  };
  std::vector<Frame> frames = {{0, {}}};
  while (!frames.empty()) {
    Frame f = std::move(frames.back());
    frames.pop_back();
    const TreeNode& n = tree.node(f.node);
    if (n.is_leaf()) {
      out.push_back({f.node, std::move(f.steps)});
      continue;
    }
    Frame right{n.right, f.steps};
    right.steps.push_back({f.node, false});
    Frame left{n.left, std::move(f.steps)};
    left.steps.push_back({f.node, true});
    // Left first in output order.
    frames.push_back(std::move(right));
    frames.push_back(std::move(left));
  }
  return out;
}

bool StepHolds(const DecisionTree& tree, const PathStep& step,
               const Record& x) {
  return tree.node(step.node).Satisfies(x) == step.left;
}

// Premise of a path; excluded categories per feature are reported through
// `excluded` instead of being added.
Premise PathPremise(const DecisionTree& tree,
                    const std::vector<PathStep>& steps,
                    std::map<int, std::set<int>>* excluded) {
  Premise premise;
  for (const PathStep& s : steps) {
    const TreeNode& n = tree.node(s.node);
    if (n.categorical) {
      if (s.left) {
        premise.Add(CategoricalEq{n.feature, n.category});
      } else if (excluded != nullptr) {
        (*excluded)[n.feature].insert(n.category);
      }
    } else if (s.left) {
      premise.Add(UpperBound(n.feature, n.threshold, /*closed=*/true));
    } else {
      premise.Add(LowerBound(n.feature, n.threshold, /*closed=*/false));
    }
  }
  return premise;
}

std::string Bool(bool b) { return b ? "true" : "false"; }

}  // namespace

DecisionTree FitTree(const FeatureSchema& schema, const Neighborhood& n,
                     const TreeParams& params) {
  std::vector<int> rows(n.size());
  std::iota(rows.begin(), rows.end(), 0);
  CartParams cart;
  cart.max_depth = params.max_depth;
  cart.min_leaf = params.min_leaf;
  cart.features_per_split = 0;
  return GrowCart(schema, n.records, n.labels, rows, cart);
}

Rule ExtractRule(const DecisionTree& tree, const Record& x) {
  std::vector<PathStep> steps;
  int id = 0;
  while (!tree.node(id).is_leaf()) {
    const TreeNode& n = tree.node(id);
    const bool left = n.Satisfies(x);
    steps.push_back({id, left});
    id = left ? n.left : n.right;
  }
  Rule rule;
  rule.premise = PathPremise(tree, steps, nullptr);
  rule.consequent = tree.node(id).label;
  return rule;
}

std::vector<Counterfactual> ExtractCounterfactuals(const DecisionTree& tree,
                                                   const FeatureSchema& schema,
                                                   const Record& x, Label y) {
  std::vector<Counterfactual> out;
  int best = std::numeric_limits<int>::max();
  for (const LeafPath& path : EnumerateLeafPaths(tree)) {
    const Label leaf_label = tree.node(path.leaf).label;
    if (leaf_label == y) continue;
    const int changes = static_cast<int>(std::count_if(
        path.steps.begin(), path.steps.end(),
        [&](const PathStep& s) { return !StepHolds(tree, s, x); }));
    if (changes > best) continue;
    if (changes < best) {
      best = changes;
      out.clear();
    }
    std::map<int, std::set<int>> excluded;
    Counterfactual cf;
    cf.rule.premise = PathPremise(tree, path.steps, &excluded);
    cf.rule.consequent = leaf_label;
    cf.change_count = changes;
    for (const auto& [feature, cats] : excluded) {
      if (cf.rule.premise.FindCategorical(feature) != nullptr) continue;
      const int own = x.category(feature);
      if (!cats.contains(own)) {
        cf.rule.premise.Add(CategoricalEq{feature, own});
        continue;
      }
      const int k = static_cast<int>(schema.feature(feature).categories.size());
      for (int c = 0; c < k; ++c) {
        if (!cats.contains(c)) {
          cf.rule.premise.Add(CategoricalEq{feature, c});
          break;
        }
      }
    }
    out.push_back(std::move(cf));
  }
  return out;
}

Explanation Explain(const Oracle& oracle, const FeatureSchema& schema,
                    const Record& x, const NeighborhoodConfig& cfg,
                    const TreeParams& params) {
  const Neighborhood n = GenerateNeighborhood(x, schema, cfg, oracle);
  const DecisionTree tree = FitTree(schema, n, params);
  Explanation e;
  e.instance = x;
  e.label = n.origin_label;
  e.factual = ExtractRule(tree, x);
  e.counterfactuals = ExtractCounterfactuals(tree, schema, x, e.label);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    agree += tree.Predict(n.records[i]) == n.labels[i];
  }
  e.fidelity = static_cast<double>(agree) / static_cast<double>(n.size());
  e.neighborhood_size = n.size();
  e.unfaithful_at_x = e.factual.consequent != e.label;
  e.locally_constant = n.locally_constant;
  return e;
}

std::string FormatExplanation(const Explanation& e,
                              const FeatureSchema& schema) {
  std::string out = FormatRule(e.factual, schema) + "\n";
  for (const Counterfactual& cf : e.counterfactuals) {
    out += "CF[" + std::to_string(cf.change_count) + "] " +
           FormatRule(cf.rule, schema) + "\n";
  }
  std::string instance;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i > 0) instance += ",";
    instance += FormatValue(schema, e.instance, i);
  }
  out += "# instance=" + instance + "\n";
  out += "# label=" + schema.class_name(e.label) + "\n";
  out += "# fidelity=" + FormatNumber(e.fidelity) + "\n";
  out += "# neighborhood_size=" + std::to_string(e.neighborhood_size) + "\n";
  out += "# unfaithful_at_x=" + Bool(e.unfaithful_at_x) + "\n";
  out += "# locally_constant=" + Bool(e.locally_constant) + "\n";
  return out;
}

}  // namespace glocal
