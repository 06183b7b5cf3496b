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

// Bottom-up synthesis of a global explanation from local ones.
//
// Local factual rules are grouped by consequent and merged pairwise in order
// of increasing Jaccard distance between their cover sets, which yields one
// dendrogram per class. Horizontal cuts of the dendrograms are scored with a
// BIC over a CPAR-style weighted vote and the best cut is the global
// explanation.

#ifndef GLOCAL_LOCAL2GLOBAL_H_
#define GLOCAL_LOCAL2GLOBAL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glocal/neighborhood.h"
#include "glocal/oracle.h"
#include "glocal/rule.h"
#include "glocal/schema.h"
#include "glocal/surrogate.h"

namespace glocal {

// Set of record indices of a reference dataset.
class CoverSet {
 public:
  CoverSet() = default;
  explicit CoverSet(std::size_t universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  void Insert(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool Contains(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1;
  }
  std::size_t universe() const { return universe_; }
  std::size_t Count() const;
  std::size_t IntersectionCount(const CoverSet& other) const;
  std::size_t UnionCount(const CoverSet& other) const;
  bool IsSubsetOf(const CoverSet& other) const;
  // Calls fn(i) for every member in increasing order.
  template <typename Fn>
  void ForEach(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = __builtin_ctzll(bits);
        fn(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }
  std::vector<std::size_t> Members() const;

  bool operator==(const CoverSet&) const = default;
  auto operator<=>(const CoverSet&) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

CoverSet ComputeCover(const Premise& premise, const LabeledDataset& data);

// 1 - |A n B| / |A u B|; two empty covers are at distance 1.
double JaccardDistance(const CoverSet& a, const CoverSet& b);
double JaccardDistance(const Rule& a, const Rule& b,
                       const LabeledDataset& data);

// ---------------------------------------------------------------------------
// Local step.

struct CollectOptions {
  NeighborhoodConfig neighborhood;  // neighborhood.seed is the run seed.
  TreeParams tree;
  int jobs = 1;
  // Keep explanations whose surrogate disagrees with the oracle on x.
  bool include_unfaithful = false;
};

struct LocalCollection {
  // One per record, in record order.
  std::vector<Explanation> explanations;
  // Distinct factual rules of the kept explanations, sorted by rule text.
  std::vector<Rule> rules;
  std::size_t unfaithful = 0;
  std::size_t locally_constant = 0;
};

// Explains every record of `data`. The neighborhood seed of record i is
// derived from the run seed and i, so each explanation is reproducible alone.
LocalCollection CollectLocal(const Oracle& oracle, const LabeledDataset& data,
                             const CollectOptions& options);

NeighborhoodConfig InstanceConfig(const NeighborhoodConfig& run,
                                  std::size_t index);

// Removes syntactic duplicates; result sorted by rule text.
std::vector<Rule> DedupeRules(std::vector<Rule> rules,
                              const FeatureSchema& schema);

// ---------------------------------------------------------------------------
// Voting and scoring.

inline constexpr int kCparTopK = 5;

// (n_correct + 1) / (n_covered + 2).
double LaplaceAccuracy(std::size_t n_correct, std::size_t n_covered);

// Rules evaluated once over a reference dataset. Rules with identical cover
// sets and consequents vote once: they are indistinguishable on the data.
class RuleVoter {
 public:
  RuleVoter(const std::vector<Rule>& rules, const LabeledDataset& data);

  struct Votes {
    // Summed and averaged top-k Laplace accuracies per class.
    std::array<double, 2> mass = {0.0, 0.0};
    std::array<double, 2> mean = {0.0, 0.0};
    std::array<int, 2> count = {0, 0};
    bool covered() const { return count[0] + count[1] > 0; }
  };

  // Votes for every record of the reference dataset.
  const std::vector<Votes>& votes() const { return votes_; }
  // Votes for an arbitrary record.
  Votes VotesFor(const Record& record) const;
  std::size_t rule_count() const { return rule_count_; }

 private:
  struct Scored {
    Premise premise;
    Label consequent;
    double laplace;
  };
  std::vector<Scored> distinct_;
  std::vector<Votes> votes_;
  std::size_t rule_count_ = 0;
};

// Class with the higher mean vote; default_class when nothing covers the
// record or the means are equal.
Label CparDecide(const RuleVoter::Votes& votes, Label default_class);
Label CparPredict(const std::vector<Rule>& rules, const Record& record,
                  Label default_class, const LabeledDataset& data);

// Fraction of records where the CPAR vote matches the dataset label.
double Fidelity(const std::vector<Rule>& rules, Label default_class,
                const LabeledDataset& relabeled);
double Fidelity(const RuleVoter& voter, Label default_class,
                const LabeledDataset& relabeled);
// Fraction of records covered by at least one rule.
double Coverage(const RuleVoter& voter);

// -BIC = -(k ln n - 2 ln L). Per-record likelihood of the black-box label y:
// (v_y + 1) / (v_0 + v_1 + 2) from summed top-k vote masses, or
// (n_y + 1) / (n + 2) for records no rule covers.
// k counts syntactically distinct rules.
double QBic(const std::vector<Rule>& rules, const LabeledDataset& relabeled);
double QBic(const RuleVoter& voter, std::size_t k,
            const LabeledDataset& relabeled);

// ---------------------------------------------------------------------------
// Dendrogram.

struct DendroNode {
  Rule rule;
  std::string text;
  CoverSet cover;
  // Merge distance; -1 for leaves.
  double height = -1.0;
  int left = -1;
  int right = -1;
  int parent = -1;

  bool is_leaf() const { return left < 0; }
};

struct Dendrogram {
  // Leaves first (in input order), then internal nodes in merge order.
  std::vector<DendroNode> nodes;
  std::size_t leaf_count = 0;
  // Root node per class; nullopt when the class has no leaf.
  std::array<std::optional<int>, 2> roots;
  std::size_t reference_size = 0;

  // Max of own height and the children's effective heights.
  std::vector<double> EffectiveHeights() const;
  std::vector<int> Leaves(int node) const;
};

// Greedy agglomeration within each class: repeatedly merges the closest pair
// (ties broken by the lexicographic order of the pair's rule texts) and
// recomputes the merged rule's cover from `data`. Throws on empty input.
Dendrogram BuildDendrogram(const std::vector<Rule>& rules,
                           const LabeledDataset& data);

struct Cut {
  // -1 for the all-leaves cut.
  double height = -1.0;
  std::vector<int> nodes;
};

// All-leaves cut, then one cut per distinct effective merge height; the last
// one is the all-roots cut.
std::vector<Cut> CandidateCuts(const Dendrogram& d);

struct CutScore {
  double height = -1.0;
  std::size_t rules = 0;
  std::size_t predicates = 0;
  double q = 0.0;
  double fidelity = 0.0;
};

struct GlobalExplanation {
  std::vector<Rule> rules;
  double q = 0.0;
  double fidelity = 0.0;
  std::size_t predicate_count = 0;
  Label default_class = 0;
  double cut_height = -1.0;
  std::vector<int> cut_nodes;

  std::size_t rule_count() const { return rules.size(); }
};

// Scores every candidate cut and returns the maximizer of q (ties: fewer
// rules, then lower height). `scores`, if given, receives one row per cut.
GlobalExplanation SelectCut(const Dendrogram& d, const LabeledDataset& relabeled,
                            std::vector<CutScore>* scores = nullptr);

// Evaluates an arbitrary rule set the same way SelectCut scores a cut.
GlobalExplanation EvaluateRuleSet(std::vector<Rule> rules,
                                  const LabeledDataset& relabeled,
                                  std::optional<Label> default_class = {});

std::string DendrogramToDot(const Dendrogram& d);
// "# q=.. fidelity=.. k=.. default=.." header followed by one rule per line.
std::string FormatGlobalExplanation(const GlobalExplanation& g,
                                    const FeatureSchema& schema);

struct RuleFile {
  std::vector<Rule> rules;
  std::optional<Label> default_class;
};
// Parses a rule file; "#" lines are comments except for a "default=" key.
RuleFile ParseRuleFile(const std::string& text, const FeatureSchema& schema);

std::size_t PredicateCount(const std::vector<Rule>& rules);

}  // namespace glocal

#endif  // GLOCAL_LOCAL2GLOBAL_H_
