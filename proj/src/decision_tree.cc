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

#include "glocal/decision_tree.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace glocal {
namespace {

// Impurities closer than this are treated as ties.
constexpr double kTieEpsilon = 1e-12;

// n * Gini(node), i.e. n - (c0^2 + c1^2) / n.
double ScaledGini(double c0, double c1) {
  const double n = c0 + c1;
  if (n == 0) return 0.0;
  return n - (c0 * c0 + c1 * c1) / n;
}

struct Split {
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  int category = 0;
  double impurity = 0.0;
};

class CartBuilder {
 public:
  CartBuilder(const FeatureSchema& schema, std::span<const Record> records,
              std::span<const Label> labels, const CartParams& params,
              std::mt19937_64* rng)
      : schema_(schema),
        records_(records),
        labels_(labels),
        params_(params),
        rng_(rng) {}

  std::vector<TreeNode> Build(std::vector<int> rows) {
    Grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int Grow(std::vector<int>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::array<std::int64_t, 2> counts = {0, 0};
    for (int r : rows) ++counts[labels_[r]];
    nodes_[id].counts = counts;
    nodes_[id].label = counts[1] > counts[0] ? 1 : 0;

    const std::int64_t n = static_cast<std::int64_t>(rows.size());
    const bool pure = counts[0] == 0 || counts[1] == 0;
    if (pure || n < 2 * std::max(params_.min_leaf, 1) ||
        depth >= params_.max_depth) {
      return id;
    }
    const double parent = ScaledGini(counts[0], counts[1]);
    std::optional<Split> best;
    for (int f : CandidateFeatures()) {
      EvaluateFeature(f, rows, counts, &best);
    }
    if (!best || best->impurity >= parent - kTieEpsilon) return id;

    std::vector<int> left;
    std::vector<int> right;
    for (int r : rows) {
      const Record& rec = records_[r];
      const bool sat = best->categorical
                           ? rec.category(best->feature) == best->category
                           : rec[best->feature] <= best->threshold;
      (sat ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = best->feature;
    nodes_[id].categorical = best->categorical;
    nodes_[id].threshold = best->categorical ? 0.0 : best->threshold;
    nodes_[id].category = best->categorical ? best->category : 0;
    const int l = Grow(left, depth + 1);
    const int r = Grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<int> CandidateFeatures() {
    const int m = static_cast<int>(schema_.size());
    std::vector<int> features(m);
    std::iota(features.begin(), features.end(), 0);
    const int k = params_.features_per_split;
    if (k <= 0 || k >= m || rng_ == nullptr) return features;
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, m - 1);
      std::swap(features[i], features[pick(*rng_)]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());
    return features;
  }

  void Consider(const Split& candidate, std::optional<Split>* best) {
    if (!best->has_value() ||
        candidate.impurity < (*best)->impurity - kTieEpsilon) {
      *best = candidate;
      return;
    }
    // Near tie: prefer the lower feature, then the lower threshold.
    if (std::abs(candidate.impurity - (*best)->impurity) <= kTieEpsilon) {
      const Split& b = **best;
      const double ct =
          candidate.categorical ? candidate.category : candidate.threshold;
      const double bt = b.categorical ? b.category : b.threshold;
      if (candidate.feature < b.feature ||
          (candidate.feature == b.feature && ct < bt)) {
        *best = candidate;
      }
    }
  }

  void EvaluateFeature(int f, const std::vector<int>& rows,
                       const std::array<std::int64_t, 2>& totals,
                       std::optional<Split>* best) {
    const int min_leaf = std::max(params_.min_leaf, 1);
    const std::int64_t n = static_cast<std::int64_t>(rows.size());
    const Feature& feature = schema_.feature(f);
    if (feature.is_categorical()) {
      const int k = static_cast<int>(feature.categories.size());
      std::vector<std::array<std::int64_t, 2>> per(k, {0, 0});
      for (int r : rows) ++per[records_[r].category(f)][labels_[r]];
      for (int c = 0; c < k; ++c) {
        const std::int64_t nl = per[c][0] + per[c][1];
        if (nl < min_leaf || n - nl < min_leaf) continue;
        Split s;
        s.feature = f;
        s.categorical = true;
        s.category = c;
        s.impurity = ScaledGini(per[c][0], per[c][1]) +
                     ScaledGini(totals[0] - per[c][0], totals[1] - per[c][1]);
        Consider(s, best);
      }
      return;
    }
    order_.assign(rows.begin(), rows.end());
    std::sort(order_.begin(), order_.end(), [&](int a, int b) {
      return records_[a][f] < records_[b][f];
    });
    std::array<std::int64_t, 2> left = {0, 0};
    for (std::int64_t i = 0; i + 1 < n; ++i) {
      ++left[labels_[order_[i]]];
      const double v = records_[order_[i]][f];
      const double next = records_[order_[i + 1]][f];
      if (v == next) continue;
      const std::int64_t nl = i + 1;
      if (nl < min_leaf || n - nl < min_leaf) continue;
      double mid = v + (next - v) / 2.0;
      if (!(mid < next)) mid = v;
      Split s;
      s.feature = f;
      s.threshold = mid;
      s.impurity = ScaledGini(left[0], left[1]) +
                   ScaledGini(totals[0] - left[0], totals[1] - left[1]);
      Consider(s, best);
    }
  }

  const FeatureSchema& schema_;
  std::span<const Record> records_;
  std::span<const Label> labels_;
  CartParams params_;
  std::mt19937_64* rng_;
  std::vector<TreeNode> nodes_;
  std::vector<int> order_;
};

void DumpNode(const DecisionTree& tree, int id, std::ostringstream& out) {
  const TreeNode& n = tree.node(id);
  if (n.is_leaf()) {
    out << "leaf " << n.label << ' ' << n.counts[0] << ' ' << n.counts[1]
        << '\n';
    return;
  }
  out << "split " << n.feature;
  if (n.categorical) {
    out << " c " << n.category;
  } else {
    out << " n " << FormatNumber(n.threshold);
  }
  out << ' ' << n.counts[0] << ' ' << n.counts[1] << '\n';
  DumpNode(tree, n.left, out);
  DumpNode(tree, n.right, out);
}

int LoadNode(const std::vector<std::string>& lines, std::size_t* pos,
             std::vector<TreeNode>* nodes, int depth) {
  if (depth > 10000) throw std::runtime_error("tree dump too deep");
  if (*pos >= lines.size()) throw std::runtime_error("truncated tree dump");
  std::istringstream in(lines[(*pos)++]);
  std::string kind;
  in >> kind;
  const int id = static_cast<int>(nodes->size());
  nodes->emplace_back();
  TreeNode node;
  if (kind == "leaf") {
    in >> node.label >> node.counts[0] >> node.counts[1];
    if (!in || (node.label != 0 && node.label != 1)) {
      throw std::runtime_error("malformed leaf line in tree dump");
    }
    (*nodes)[id] = node;
    return id;
  }
  if (kind != "split") throw std::runtime_error("malformed tree dump line");
  std::string type;
  std::string value;
  in >> node.feature >> type >> value >> node.counts[0] >> node.counts[1];
  if (!in || node.feature < 0) throw std::runtime_error("malformed split line");
  if (type == "c") {
    node.categorical = true;
    node.category = std::stoi(value);
  } else if (type == "n") {
    auto v = ParseNumber(value);
    if (!v) throw std::runtime_error("malformed split threshold");
    node.threshold = *v;
  } else {
    throw std::runtime_error("unknown split type in tree dump");
  }
  node.label = node.counts[1] > node.counts[0] ? 1 : 0;
  node.left = LoadNode(lines, pos, nodes, depth + 1);
  node.right = LoadNode(lines, pos, nodes, depth + 1);
  (*nodes)[id] = node;
  return id;
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) nodes_.emplace_back();
}

int DecisionTree::LeafIndex(const Record& record) const {
  int id = 0;
  while (!nodes_[id].is_leaf()) {
    const TreeNode& n = nodes_[id];
    id = n.Satisfies(record) ? n.left : n.right;
  }
  return id;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // Children always have larger indices than their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return best;
}

int DecisionTree::num_leaves() const {
  return static_cast<int>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<int> DecisionTree::Parents() const {
  std::vector<int> parents(nodes_.size(), -1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf()) {
      parents[nodes_[i].left] = static_cast<int>(i);
      parents[nodes_[i].right] = static_cast<int>(i);
    }
  }
  return parents;
}

DecisionTree GrowCart(const FeatureSchema& schema,
                      std::span<const Record> records,
                      std::span<const Label> labels,
                      std::span<const int> rows, const CartParams& params,
                      std::mt19937_64* rng) {
  if (records.size() != labels.size()) {
    throw std::invalid_argument("records and labels differ in size");
  }
  CartBuilder builder(schema, records, labels, params, rng);
  return DecisionTree(builder.Build(std::vector<int>(rows.begin(), rows.end())));
}

std::string DumpTree(const DecisionTree& tree) {
  std::ostringstream out;
  DumpNode(tree, 0, out);
  return out.str();
}

DecisionTree LoadTree(const std::vector<std::string>& lines, std::size_t* pos) {
  std::vector<TreeNode> nodes;
  LoadNode(lines, pos, &nodes, 0);
  return DecisionTree(std::move(nodes));
}

}  // namespace glocal
