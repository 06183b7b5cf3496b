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

// Local surrogate: a decision tree fitted on a neighborhood, read off as a
// factual rule plus minimal-change counterfactual rules.

#ifndef GLOCAL_SURROGATE_H_
#define GLOCAL_SURROGATE_H_

#include <string>
#include <vector>

#include "glocal/decision_tree.h"
#include "glocal/neighborhood.h"
#include "glocal/oracle.h"
#include "glocal/rule.h"
#include "glocal/schema.h"

namespace glocal {

struct TreeParams {
  int min_leaf = 5;
  int max_depth = 8;
};

// Gini CART over all features; stops on pure nodes, nodes smaller than
// 2 * min_leaf and at max_depth.
DecisionTree FitTree(const FeatureSchema& schema, const Neighborhood& n,
                     const TreeParams& params);

// Conjunction of the split conditions on x's root-to-leaf path. Negative
// categorical conditions ("!= c") are left out.
Rule ExtractRule(const DecisionTree& tree, const Record& x);

struct Counterfactual {
  Rule rule;
  // Path conditions of the target leaf that x violates.
  int change_count = 0;

  bool operator==(const Counterfactual&) const = default;
};

// Path rules of the leaves labeled != y with the smallest change count, in
// leaf order. A feature constrained only by "!= c" conditions is pinned to
// x's value when x satisfies them, else to the lowest admissible category, so
// every record matching the premise reaches the target leaf.
std::vector<Counterfactual> ExtractCounterfactuals(
    const DecisionTree& tree, const FeatureSchema& schema, const Record& x,
    Label y);

struct Explanation {
  Record instance;
  Label label = 0;  // Black-box label y' of the instance.
  Rule factual;
  std::vector<Counterfactual> counterfactuals;
  // Agreement of the surrogate with the oracle labels of its neighborhood.
  double fidelity = 0.0;
  std::size_t neighborhood_size = 0;
  // The surrogate predicts a different class than the oracle on x; the
  // factual consequent then follows the surrogate leaf.
  bool unfaithful_at_x = false;
  bool locally_constant = false;

  bool operator==(const Explanation&) const = default;
};

Explanation Explain(const Oracle& oracle, const FeatureSchema& schema,
                    const Record& x, const NeighborhoodConfig& cfg,
                    const TreeParams& params);

// Factual rule line, "CF[k] <rule>" lines, then "# key=value" trailers.
std::string FormatExplanation(const Explanation& e,
                              const FeatureSchema& schema);

}  // namespace glocal

#endif  // GLOCAL_SURROGATE_H_
