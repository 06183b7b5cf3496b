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

#include <random>

#include "glocal/rule_text.h"
#include "glocal/synthetic.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace glocal {
namespace {

FeatureSchema ColorSchema() {
  return FeatureSchema({{"x1", FeatureKind::kContinuous, {}, 0.0, 1.0},
                        {"color", FeatureKind::kCategorical, {"red", "green", "blue"}}});
}

TreeNode Split(int feature, double threshold, int left, int right) {
  TreeNode n;
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return n;
}

TreeNode CategorySplit(int feature, int category, int left, int right) {
  TreeNode n = Split(feature, 0.0, left, right);
  n.categorical = true;
  n.category = category;
  return n;
}

TreeNode Leaf(Label label) {
  TreeNode n;
  n.label = label;
  return n;
}

// x1 <= 0.5 -> 0; otherwise color = red -> `red_label`, else the other class.
DecisionTree HandTree(Label red_label) {
  return DecisionTree({Split(0, 0.5, 1, 2), Leaf(0), CategorySplit(1, 0, 3, 4),
                       Leaf(red_label), Leaf(1 - red_label)});
}

std::string Text(const Counterfactual& cf, const FeatureSchema& s) {
  return FormatRule(cf.rule, s);
}

// Conditions on the path to `leaf` that x violates, walked independently of
// the extraction code.
int ViolatedOnPath(const DecisionTree& tree, int leaf, const Record& x) {
  const std::vector<int> parents = tree.Parents();
  int count = 0;
  for (int child = leaf, p = parents[leaf]; p >= 0; child = p, p = parents[p]) {
    const bool goes_left = tree.node(p).left == child;
    if (tree.node(p).Satisfies(x) != goes_left) ++count;
  }
  return count;
}

Neighborhood UniformNeighborhood(const FeatureSchema& s, const Oracle& oracle,
                                 const Record& x, int size, std::uint64_t seed) {
  NeighborhoodConfig cfg;
  cfg.method = NeighborhoodMethod::kUniform;
  cfg.size = size;
  cfg.seed = seed;
  return GenerateUniform(x, s, cfg, oracle);
}

TEST(FitTree, ConstantNeighborhoodIsSingleLeaf) {
  const FeatureSchema s = ColorSchema();
  const ConstantOracle oracle(1);
  const Neighborhood n = UniformNeighborhood(s, oracle, Record({0.2, 1}), 200, 1);
  const DecisionTree t = FitTree(s, n, TreeParams{});
  EXPECT_EQ(t.num_leaves(), 1);
  EXPECT_EQ(t.node(0).label, 1);
}

TEST(FitTree, ThresholdRecovered) {
  const FeatureSchema s = ColorSchema();
  const ThresholdOracle oracle(0, 0.5);
  const Neighborhood n = UniformNeighborhood(s, oracle, Record({0.2, 1}), 1000, 2);
  const DecisionTree t = FitTree(s, n, TreeParams{});
  EXPECT_EQ(t.node(0).feature, 0);
  EXPECT_FALSE(t.node(0).categorical);
  EXPECT_NEAR(t.node(0).threshold, 0.5, 0.05);
}

TEST(FitTree, XorNeedsTwoLevels) {
  const FeatureSchema s({{"a", FeatureKind::kContinuous, {}, 0.0, 1.0},
                         {"b", FeatureKind::kContinuous, {}, 0.0, 1.0}});
  const FunctionOracle oracle(
      [](const Record& r) { return (r[0] > 0.5) != (r[1] > 0.5) ? 1 : 0; });
  const Neighborhood n = UniformNeighborhood(s, oracle, Record({0.2, 0.2}), 2000, 3);
  const DecisionTree t = FitTree(s, n, TreeParams{});
  EXPECT_GE(t.depth(), 2);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n.size(); ++i) agree += t.Predict(n.records[i]) == n.labels[i];
  EXPECT_GE(static_cast<double>(agree) / n.size(), 0.95);
}

TEST(ExtractRule, PathConditions) {
  const FeatureSchema s = ColorSchema();
  const DecisionTree t = HandTree(1);
  EXPECT_EQ(FormatRule(ExtractRule(t, Record({0.3, 1})), s), "x1 <= 0.5 -> class = 0");
  EXPECT_EQ(FormatRule(ExtractRule(t, Record({0.9, 0})), s),
            "x1 > 0.5, color = red -> class = 1");
  // "!= red" is not expressible as a single equality and is left out.
  EXPECT_EQ(FormatRule(ExtractRule(t, Record({0.9, 2})), s), "x1 > 0.5 -> class = 0");
}

TEST(Counterfactuals, MinimalChanges) {
  const FeatureSchema s = ColorSchema();
  const DecisionTree t = HandTree(1);
  auto cf = ExtractCounterfactuals(t, s, Record({0.3, 1}), 0);
  ASSERT_EQ(cf.size(), 1u);
  EXPECT_EQ(cf[0].change_count, 2);
  EXPECT_EQ(Text(cf[0], s), "x1 > 0.5, color = red -> class = 1");
  cf = ExtractCounterfactuals(t, s, Record({0.3, 0}), 0);
  ASSERT_EQ(cf.size(), 1u);
  EXPECT_EQ(cf[0].change_count, 1);
  // Starting from a class 1 leaf, both class 0 leaves are candidates and the
  // one-change leaves win.
  cf = ExtractCounterfactuals(t, s, Record({0.9, 0}), 1);
  ASSERT_EQ(cf.size(), 2u);
  EXPECT_EQ(Text(cf[0], s), "x1 <= 0.5 -> class = 0");
  EXPECT_EQ(cf[1].change_count, 1);
}

TEST(Counterfactuals, NegativeConditionsArePinned) {
  const FeatureSchema s = ColorSchema();
  const DecisionTree t = HandTree(0);  // color != red -> 1
  auto cf = ExtractCounterfactuals(t, s, Record({0.3, 2}), 0);
  ASSERT_EQ(cf.size(), 1u);
  EXPECT_EQ(cf[0].change_count, 1);
  EXPECT_EQ(Text(cf[0], s), "x1 > 0.5, color = blue -> class = 1");
  cf = ExtractCounterfactuals(t, s, Record({0.3, 0}), 0);
  ASSERT_EQ(cf.size(), 1u);
  EXPECT_EQ(cf[0].change_count, 2);
  EXPECT_EQ(Text(cf[0], s), "x1 > 0.5, color = green -> class = 1");
}

TEST(Counterfactuals, NoneWhenTreeIsConstant) {
  const FeatureSchema s = ColorSchema();
  EXPECT_TRUE(ExtractCounterfactuals(DecisionTree({Leaf(0)}), s, Record({0.1, 0}), 0)
                  .empty());
}

TEST(CounterfactualProperties, ValidAndMinimal) {
  std::mt19937_64 rng(41);
  const FeatureSchema s = testing::MixedSchema();
  for (int trial = 0; trial < 30; ++trial) {
    // A random concept over the mixed schema.
    const Rule concept_rule = testing::RandomRule(s, rng);
    const FunctionOracle oracle(
        [&](const Record& r) { return Covers(concept_rule.premise, r) ? 1 : 0; });
    const Record x = testing::RandomRecord(s, rng);
    const Neighborhood n = UniformNeighborhood(s, oracle, x, 300, trial);
    TreeParams params;
    params.min_leaf = 2;
    const DecisionTree t = FitTree(s, n, params);
    const Label y = t.Predict(x);
    const auto cfs = ExtractCounterfactuals(t, s, x, y);
    int best = 1 << 30;
    for (int leaf = 0; leaf < static_cast<int>(t.nodes().size()); ++leaf) {
      if (t.node(leaf).is_leaf() && t.node(leaf).label != y) {
        best = std::min(best, ViolatedOnPath(t, leaf, x));
      }
    }
    for (const Counterfactual& cf : cfs) {
      EXPECT_EQ(cf.change_count, best);
      EXPECT_NE(cf.rule.consequent, y);
      // Every record matching the premise is classified differently.
      int covered = 0;
      for (int k = 0; k < 3000 && covered < 100; ++k) {
        const Record z = testing::RandomRecord(s, rng);
        if (!Covers(cf.rule.premise, z)) continue;
        ++covered;
        ASSERT_EQ(t.Predict(z), cf.rule.consequent);
      }
    }
    if (best == 1 << 30) EXPECT_TRUE(cfs.empty());
  }
}

TEST(Explain, ThresholdInstance) {
  const FeatureSchema s = testing::OneFeatureSchema();
  const ThresholdOracle oracle(0, 0.5);
  NeighborhoodConfig cfg;
  cfg.seed = 3;
  const Explanation e = Explain(oracle, s, Record({0.3}), cfg, TreeParams{});
  EXPECT_EQ(e.label, 0);
  EXPECT_FALSE(e.unfaithful_at_x);
  EXPECT_FALSE(e.locally_constant);
  EXPECT_EQ(e.neighborhood_size, 1001u);
  EXPECT_GE(e.fidelity, 0.95);
  const NumericInterval* iv = e.factual.premise.FindInterval(0);
  ASSERT_NE(iv, nullptr);
  EXPECT_NEAR(iv->upper, 0.5, 0.05);
  EXPECT_EQ(e.factual.consequent, 0);
  ASSERT_EQ(e.counterfactuals.size(), 1u);
  EXPECT_EQ(e.counterfactuals[0].change_count, 1);
  EXPECT_EQ(e.counterfactuals[0].rule.consequent, 1);
}

TEST(Explain, ConstantOracle) {
  const FeatureSchema s = testing::MixedSchema();
  const ConstantOracle oracle(1);
  NeighborhoodConfig cfg;
  cfg.size = 100;
  cfg.ga.population_size = 50;
  cfg.ga.generations = 5;
  const Explanation e = Explain(oracle, s, Record({0.3, 0.1, 0.9, 1, 2}), cfg, TreeParams{});
  EXPECT_TRUE(e.locally_constant);
  EXPECT_TRUE(e.factual.premise.empty());
  EXPECT_EQ(e.factual.consequent, 1);
  EXPECT_TRUE(e.counterfactuals.empty());
  EXPECT_EQ(e.fidelity, 1.0);
  EXPECT_EQ(FormatExplanation(e, s),
            "-> class = 1\n"
            "# instance=0.3,0.1,0.9,q,x-1\n"
            "# label=1\n"
            "# fidelity=1\n"
            "# neighborhood_size=101\n"
            "# unfaithful_at_x=false\n"
            "# locally_constant=true\n");
}

TEST(Explain, DeterministicAndBeatsConstantClassifier) {
  const LabeledDataset d = MakeSyntheticDataset(20, 4);
  const FunctionOracle oracle(SyntheticConcept);
  NeighborhoodConfig cfg;
  cfg.size = 300;
  cfg.ga.population_size = 100;
  cfg.ga.generations = 8;
  for (std::size_t i = 0; i < d.size(); ++i) {
    cfg.seed = i;
    const Explanation a = Explain(oracle, d.schema, d.records[i], cfg, TreeParams{});
    const Explanation b = Explain(oracle, d.schema, d.records[i], cfg, TreeParams{});
    EXPECT_EQ(a, b);
    const Neighborhood n = GenerateNeighborhood(d.records[i], d.schema, cfg, oracle);
    const double majority = std::max(n.class_balance(), 1.0 - n.class_balance());
    EXPECT_GE(a.fidelity + 1e-12, majority);
    if (!a.unfaithful_at_x) EXPECT_TRUE(Covers(a.factual.premise, d.records[i]));
  }
}

}  // namespace
}  // namespace glocal
