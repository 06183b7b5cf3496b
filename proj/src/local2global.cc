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

#include "glocal/local2global.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "glocal/random.h"
#include "glocal/rule_algebra.h"
#include "glocal/rule_text.h"

namespace glocal {

std::size_t CoverSet::Count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::size_t CoverSet::IntersectionCount(const CoverSet& other) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += std::popcount(words_[i] & other.words_[i]);
  }
  return n;
}

std::size_t CoverSet::UnionCount(const CoverSet& other) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += std::popcount(words_[i] | other.words_[i]);
  }
  return n;
}

bool CoverSet::IsSubsetOf(const CoverSet& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

std::vector<std::size_t> CoverSet::Members() const {
  std::vector<std::size_t> out;
  ForEach([&](std::size_t i) { out.push_back(i); });
  return out;
}

CoverSet ComputeCover(const Premise& premise, const LabeledDataset& data) {
  CoverSet cover(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (Covers(premise, data.records[i])) cover.Insert(i);
  }
  return cover;
}

double JaccardDistance(const CoverSet& a, const CoverSet& b) {
  if (a.universe() != b.universe()) {
    throw std::invalid_argument("cover sets over different datasets");
  }
  const std::size_t uni = a.UnionCount(b);
  if (uni == 0) return 1.0;
  return 1.0 - static_cast<double>(a.IntersectionCount(b)) /
                   static_cast<double>(uni);
}

double JaccardDistance(const Rule& a, const Rule& b,
                       const LabeledDataset& data) {
  return JaccardDistance(ComputeCover(a.premise, data),
                         ComputeCover(b.premise, data));
}

// ---------------------------------------------------------------------------

NeighborhoodConfig InstanceConfig(const NeighborhoodConfig& run,
                                  std::size_t index) {
  NeighborhoodConfig cfg = run;
  cfg.seed = DeriveSeed(run.seed, "explain", index);
  return cfg;
}

std::vector<Rule> DedupeRules(std::vector<Rule> rules,
                              const FeatureSchema& schema) {
  std::map<std::string, Rule> by_text;
  for (Rule& r : rules) by_text.emplace(FormatRule(r, schema), std::move(r));
  std::vector<Rule> out;
  out.reserve(by_text.size());
  for (auto& [text, rule] : by_text) out.push_back(std::move(rule));
  return out;
}

LocalCollection CollectLocal(const Oracle& oracle, const LabeledDataset& data,
                             const CollectOptions& options) {
  options.neighborhood.Validate();
  LocalCollection out;
  out.explanations.resize(data.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < data.size(); i = next++) {
      out.explanations[i] =
          Explain(oracle, data.schema, data.records[i],
                  InstanceConfig(options.neighborhood, i), options.tree);
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int t = 0; t < jobs; ++t) {
      threads.emplace_back([&] {
        try {
          worker();
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next = data.size();
        }
      });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
  }
  std::vector<Rule> rules;
  for (const Explanation& e : out.explanations) {
    out.unfaithful += e.unfaithful_at_x;
    out.locally_constant += e.locally_constant;
    if (e.unfaithful_at_x && !options.include_unfaithful) continue;
    rules.push_back(e.factual);
  }
  out.rules = DedupeRules(std::move(rules), data.schema);
  return out;
}

// ---------------------------------------------------------------------------

double LaplaceAccuracy(std::size_t n_correct, std::size_t n_covered) {
  return (static_cast<double>(n_correct) + 1.0) /
         (static_cast<double>(n_covered) + 2.0);
}

namespace {

// Keeps the k largest values seen, in decreasing order.
struct TopK {
  std::array<double, kCparTopK> values{};
  int size = 0;

  void Push(double v) {
    int pos = size < kCparTopK ? size++ : kCparTopK;
    if (pos == kCparTopK) {
      if (v <= values[kCparTopK - 1]) return;
      pos = kCparTopK - 1;
    }
    while (pos > 0 && values[pos - 1] < v) {
      values[pos] = values[pos - 1];
      --pos;
    }
    values[pos] = v;
  }
  double Sum() const {
    double s = 0.0;
    for (int i = 0; i < size; ++i) s += values[i];
    return s;
  }
};

RuleVoter::Votes Finalize(const std::array<TopK, 2>& top) {
  RuleVoter::Votes v;
  for (int c = 0; c < 2; ++c) {
    v.count[c] = top[c].size;
    v.mass[c] = top[c].Sum();
    v.mean[c] = top[c].size > 0 ? v.mass[c] / top[c].size : 0.0;
  }
  return v;
}

}  // namespace

RuleVoter::RuleVoter(const std::vector<Rule>& rules,
                     const LabeledDataset& data)
    : rule_count_(rules.size()) {
  std::map<std::pair<Label, CoverSet>, bool> seen;
  std::vector<std::array<TopK, 2>> top(data.size());
  for (const Rule& rule : rules) {
    CoverSet cover = ComputeCover(rule.premise, data);
    if (!seen.emplace(std::make_pair(rule.consequent, cover), true).second) {
      continue;
    }
    std::size_t correct = 0;
    cover.ForEach([&](std::size_t i) {
      correct += data.labels[i] == rule.consequent;
    });
    const double laplace = LaplaceAccuracy(correct, cover.Count());
    cover.ForEach([&](std::size_t i) { top[i][rule.consequent].Push(laplace); });
    distinct_.push_back({rule.premise, rule.consequent, laplace});
  }
  votes_.reserve(data.size());
  for (const auto& t : top) votes_.push_back(Finalize(t));
}

RuleVoter::Votes RuleVoter::VotesFor(const Record& record) const {
  std::array<TopK, 2> top;
  for (const Scored& s : distinct_) {
    if (Covers(s.premise, record)) top[s.consequent].Push(s.laplace);
  }
  return Finalize(top);
}

Label CparDecide(const RuleVoter::Votes& votes, Label default_class) {
  if (!votes.covered()) return default_class;
  if (votes.count[0] == 0) return 1;
  if (votes.count[1] == 0) return 0;
  if (votes.mean[0] > votes.mean[1]) return 0;
  if (votes.mean[1] > votes.mean[0]) return 1;
  return default_class;
}

Label CparPredict(const std::vector<Rule>& rules, const Record& record,
                  Label default_class, const LabeledDataset& data) {
  return CparDecide(RuleVoter(rules, data).VotesFor(record), default_class);
}

double Fidelity(const RuleVoter& voter, Label default_class,
                const LabeledDataset& relabeled) {
  if (relabeled.empty()) return 0.0;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < relabeled.size(); ++i) {
    agree += CparDecide(voter.votes()[i], default_class) == relabeled.labels[i];
  }
  return static_cast<double>(agree) / static_cast<double>(relabeled.size());
}

double Fidelity(const std::vector<Rule>& rules, Label default_class,
                const LabeledDataset& relabeled) {
  return Fidelity(RuleVoter(rules, relabeled), default_class, relabeled);
}

double Coverage(const RuleVoter& voter) {
  if (voter.votes().empty()) return 0.0;
  const auto covered = std::count_if(
      voter.votes().begin(), voter.votes().end(),
      [](const RuleVoter::Votes& v) { return v.covered(); });
  return static_cast<double>(covered) /
         static_cast<double>(voter.votes().size());
}

double QBic(const RuleVoter& voter, std::size_t k,
            const LabeledDataset& relabeled) {
  const std::size_t n = relabeled.size();
  if (n == 0) throw std::invalid_argument("q on an empty dataset");
  const std::array<std::size_t, 2> class_counts = {relabeled.CountLabel(0),
                                                    relabeled.CountLabel(1)};
  double log_likelihood = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Label y = relabeled.labels[i];
    const RuleVoter::Votes& v = voter.votes()[i];
    double p;
    if (v.covered()) {
      p = (v.mass[y] + 1.0) / (v.mass[0] + v.mass[1] + 2.0);
    } else {
      p = (static_cast<double>(class_counts[y]) + 1.0) /
          (static_cast<double>(n) + 2.0);
    }
    log_likelihood += std::log(p);
  }
  const double bic = static_cast<double>(k) * std::log(static_cast<double>(n)) -
                     2.0 * log_likelihood;
  return -bic;
}

double QBic(const std::vector<Rule>& rules, const LabeledDataset& relabeled) {
  if (rules.empty()) throw std::invalid_argument("q of an empty rule set");
  // Syntactic duplicates are one rule of the set.
  std::vector<const Rule*> distinct;
  for (const Rule& r : rules) {
    if (std::none_of(distinct.begin(), distinct.end(),
                     [&](const Rule* d) { return *d == r; })) {
      distinct.push_back(&r);
    }
  }
  return QBic(RuleVoter(rules, relabeled), distinct.size(), relabeled);
}

// ---------------------------------------------------------------------------

std::vector<double> Dendrogram::EffectiveHeights() const {
  std::vector<double> eff(nodes.size(), -1.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const DendroNode& n = nodes[i];
    if (n.is_leaf()) continue;
    eff[i] = std::max({n.height, eff[n.left], eff[n.right]});
  }
  return eff;
}

std::vector<int> Dendrogram::Leaves(int node) const {
  std::vector<int> out;
  std::vector<int> stack = {node};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const DendroNode& n = nodes[id];
    if (n.is_leaf()) {
      out.push_back(id);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

namespace {

class Agglomerator {
 public:
  Agglomerator(Dendrogram& d, const LabeledDataset& data)
      : d_(d), data_(data) {}

  // Merges the given leaves down to one root and returns it.
  int Run(std::vector<int> active) {
    best_.assign(d_.nodes.size(), {-1, 0.0});
    for (int i : active) RecomputeRow(i, active);
    while (active.size() > 1) {
      int a = -1;
      for (int i : active) {
        if (a < 0 || Better(best_[i].second, i, best_[i].first,
                            best_[a].second, a, best_[a].first)) {
          a = i;
        }
      }
      const int b = best_[a].first;
      const double height = best_[a].second;
      const int m = MergeNodes(a, b, height);
      std::erase_if(active, [&](int x) { return x == a || x == b; });
      best_.resize(d_.nodes.size(), {-1, 0.0});
      for (int k : active) {
        if (best_[k].first == a || best_[k].first == b) {
          RecomputeRow(k, active, m);
          continue;
        }
        const double dist = Distance(k, m);
        if (Better(dist, k, m, best_[k].second, k, best_[k].first)) {
          best_[k] = {m, dist};
        }
      }
      active.push_back(m);
      RecomputeRow(m, active);
    }
    return active.front();
  }

 private:
  double Distance(int a, int b) const {
    return JaccardDistance(d_.nodes[a].cover, d_.nodes[b].cover);
  }

  // Lexicographic order on (distance, sorted pair of texts, sorted ids).
  bool Better(double d1, int a1, int b1, double d2, int a2, int b2) const {
    if (b2 < 0) return true;
    if (d1 != d2) return d1 < d2;
    auto key = [&](int x, int y) {
      const std::string& tx = d_.nodes[x].text;
      const std::string& ty = d_.nodes[y].text;
      return tx <= ty ? std::tie(tx, ty) : std::tie(ty, tx);
    };
    const auto k1 = key(a1, b1);
    const auto k2 = key(a2, b2);
    if (k1 != k2) return k1 < k2;
    return std::minmax(a1, b1) < std::minmax(a2, b2);
  }

  void RecomputeRow(int i, const std::vector<int>& active, int extra = -1) {
    best_[i] = {-1, 0.0};
    auto consider = [&](int j) {
      if (j == i) return;
      const double dist = Distance(i, j);
      if (Better(dist, i, j, best_[i].second, i, best_[i].first)) {
        best_[i] = {j, dist};
      }
    };
    for (int j : active) consider(j);
    if (extra >= 0) consider(extra);
  }

  int MergeNodes(int a, int b, double height) {
    DendroNode node;
    node.rule = Merge(d_.nodes[a].rule, d_.nodes[b].rule);
    node.text = FormatRule(node.rule, data_.schema);
    node.cover = ComputeCover(node.rule.premise, data_);
    node.height = height;
    node.left = std::min(a, b);
    node.right = std::max(a, b);
    const int id = static_cast<int>(d_.nodes.size());
    d_.nodes[a].parent = id;
    d_.nodes[b].parent = id;
    d_.nodes.push_back(std::move(node));
    return id;
  }

  Dendrogram& d_;
  const LabeledDataset& data_;
  // Per node: closest active partner and its distance.
  std::vector<std::pair<int, double>> best_;
};

}  // namespace

Dendrogram BuildDendrogram(const std::vector<Rule>& rules,
                           const LabeledDataset& data) {
  if (rules.empty()) throw std::invalid_argument("no rules to aggregate");
  Dendrogram d;
  d.reference_size = data.size();
  d.leaf_count = rules.size();
  std::array<std::vector<int>, 2> by_class;
  for (const Rule& r : rules) {
    DendroNode leaf;
    leaf.rule = r;
    leaf.text = FormatRule(r, data.schema);
    leaf.cover = ComputeCover(r.premise, data);
    by_class[r.consequent].push_back(static_cast<int>(d.nodes.size()));
    d.nodes.push_back(std::move(leaf));
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].empty()) continue;
    d.roots[c] = Agglomerator(d, data).Run(by_class[c]);
  }
  return d;
}

std::vector<Cut> CandidateCuts(const Dendrogram& d) {
  const std::vector<double> eff = d.EffectiveHeights();
  std::vector<Cut> cuts;
  Cut leaves;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    if (d.nodes[i].is_leaf()) leaves.nodes.push_back(static_cast<int>(i));
  }
  cuts.push_back(std::move(leaves));
  std::set<double> heights;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    if (!d.nodes[i].is_leaf()) heights.insert(eff[i]);
  }
  for (double h : heights) {
    Cut cut;
    cut.height = h;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const int parent = d.nodes[i].parent;
      if (eff[i] <= h && (parent < 0 || eff[parent] > h)) {
        cut.nodes.push_back(static_cast<int>(i));
      }
    }
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

std::size_t PredicateCount(const std::vector<Rule>& rules) {
  std::size_t n = 0;
  for (const Rule& r : rules) n += r.premise.size();
  return n;
}

namespace {

// Votes for a cut from the cached node covers.
class CutScorer {
 public:
  CutScorer(const Dendrogram& d, const LabeledDataset& data)
      : d_(d), data_(data) {
    laplace_.resize(d.nodes.size());
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
      const DendroNode& n = d.nodes[i];
      std::size_t correct = 0;
      n.cover.ForEach([&](std::size_t r) {
        correct += data.labels[r] == n.rule.consequent;
      });
      laplace_[i] = LaplaceAccuracy(correct, n.cover.Count());
    }
  }

  CutScore Score(const Cut& cut, Label default_class,
                 std::vector<Rule>* rules) const {
    std::vector<Rule> cut_rules;
    for (int id : cut.nodes) cut_rules.push_back(d_.nodes[id].rule);
    *rules = DedupeRules(std::move(cut_rules), data_.schema);

    std::map<std::pair<Label, const CoverSet*>, bool, CoverLess> seen;
    std::vector<std::array<TopK, 2>> top(data_.size());
    for (int id : cut.nodes) {
      const DendroNode& n = d_.nodes[id];
      if (!seen.emplace(std::make_pair(n.rule.consequent, &n.cover), true)
               .second) {
        continue;
      }
      const double l = laplace_[id];
      n.cover.ForEach([&](std::size_t r) { top[r][n.rule.consequent].Push(l); });
    }
    const std::size_t n = data_.size();
    const std::array<std::size_t, 2> class_counts = {data_.CountLabel(0),
                                                      data_.CountLabel(1)};
    double log_likelihood = 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const RuleVoter::Votes v = Finalize(top[i]);
      const Label y = data_.labels[i];
      const double p =
          v.covered()
              ? (v.mass[y] + 1.0) / (v.mass[0] + v.mass[1] + 2.0)
              : (static_cast<double>(class_counts[y]) + 1.0) /
                    (static_cast<double>(n) + 2.0);
      log_likelihood += std::log(p);
      agree += CparDecide(v, default_class) == y;
    }
    CutScore s;
    s.height = cut.height;
    s.rules = rules->size();
    s.predicates = PredicateCount(*rules);
    s.q = -(static_cast<double>(s.rules) * std::log(static_cast<double>(n)) -
            2.0 * log_likelihood);
    s.fidelity = static_cast<double>(agree) / static_cast<double>(n);
    return s;
  }

 private:
  struct CoverLess {
    bool operator()(const std::pair<Label, const CoverSet*>& a,
                    const std::pair<Label, const CoverSet*>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return *a.second < *b.second;
    }
  };

  const Dendrogram& d_;
  const LabeledDataset& data_;
  std::vector<double> laplace_;
};

}  // namespace

GlobalExplanation SelectCut(const Dendrogram& d,
                            const LabeledDataset& relabeled,
                            std::vector<CutScore>* scores) {
  if (relabeled.size() != d.reference_size) {
    throw std::invalid_argument("dendrogram built over a different dataset");
  }
  const Label default_class = relabeled.MajorityClass();
  const CutScorer scorer(d, relabeled);
  GlobalExplanation best;
  bool have = false;
  if (scores != nullptr) scores->clear();
  for (const Cut& cut : CandidateCuts(d)) {
    std::vector<Rule> rules;
    const CutScore s = scorer.Score(cut, default_class, &rules);
    if (scores != nullptr) scores->push_back(s);
    const bool better =
        !have || s.q > best.q ||
        (s.q == best.q && (s.rules < best.rules.size() ||
                           (s.rules == best.rules.size() &&
                            s.height < best.cut_height)));
    if (!better) continue;
    have = true;
    best.rules = std::move(rules);
    best.q = s.q;
    best.fidelity = s.fidelity;
    best.predicate_count = s.predicates;
    best.default_class = default_class;
    best.cut_height = s.height;
    best.cut_nodes = cut.nodes;
  }
  return best;
}

GlobalExplanation EvaluateRuleSet(std::vector<Rule> rules,
                                  const LabeledDataset& relabeled,
                                  std::optional<Label> default_class) {
  GlobalExplanation g;
  g.rules = std::move(rules);
  g.default_class = default_class.value_or(relabeled.MajorityClass());
  const RuleVoter voter(g.rules, relabeled);
  g.q = QBic(voter, g.rules.size(), relabeled);
  g.fidelity = Fidelity(voter, g.default_class, relabeled);
  g.predicate_count = PredicateCount(g.rules);
  return g;
}

namespace {

std::string DotEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string DendrogramToDot(const Dendrogram& d) {
  std::ostringstream out;
  out << "digraph dendrogram {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const DendroNode& n = d.nodes[i];
    out << "  n" << i << " [label=\"";
    if (!n.is_leaf()) out << "h=" << FormatNumber(n.height) << " | ";
    out << DotEscape(n.text) << "\"];\n";
  }
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const DendroNode& n = d.nodes[i];
    if (n.is_leaf()) continue;
    out << "  n" << i << " -> n" << n.left << ";\n";
    out << "  n" << i << " -> n" << n.right << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string FormatGlobalExplanation(const GlobalExplanation& g,
                                    const FeatureSchema& schema) {
  std::string out = "# q=" + FormatNumber(g.q) +
                    " fidelity=" + FormatNumber(g.fidelity) +
                    " k=" + std::to_string(g.rule_count()) +
                    " default=" + schema.class_name(g.default_class) + "\n";
  for (const Rule& r : g.rules) out += FormatRule(r, schema) + "\n";
  return out;
}

RuleFile ParseRuleFile(const std::string& text, const FeatureSchema& schema) {
  RuleFile file;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream words(line.substr(first + 1));
      for (std::string w; words >> w;) {
        if (w.rfind("default=", 0) == 0) {
          file.default_class = schema.ParseLabel(w.substr(8));
          if (!file.default_class) {
            throw ParseError("unknown default class on line " +
                                 std::to_string(line_no),
                             first);
          }
        }
      }
      continue;
    }
    try {
      file.rules.push_back(ParseRule(line, schema));
    } catch (const ParseError& e) {
      std::string message = e.what();
      message = message.substr(0, message.rfind(" at column "));
      throw ParseError("line " + std::to_string(line_no) + ": " + message,
                       e.position());
    }
  }
  return file;
}

}  // namespace glocal
