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

#include "glocal/rule_algebra.h"

#include <algorithm>
#include <vector>

#include "glocal/rule_text.h"

namespace glocal {
namespace {

bool LowerWithin(const NumericInterval& outer, const NumericInterval& inner) {
  if (outer.lower < inner.lower) return true;
  if (outer.lower > inner.lower) return false;
  return outer.lower_closed || !inner.lower_closed;
}

bool UpperWithin(const NumericInterval& outer, const NumericInterval& inner) {
  if (outer.upper > inner.upper) return true;
  if (outer.upper < inner.upper) return false;
  return outer.upper_closed || !inner.upper_closed;
}

bool IsUpperDirection(Relation r) {
  return r == Relation::kLe || r == Relation::kLt;
}

// Does `specific` imply `general`? Requires specific = lambda * general for
// some lambda > 0 on the left-hand side.
bool LinearImplies(const LinearConstraint& specific,
                   const LinearConstraint& general) {
  if (specific.terms.size() != general.terms.size()) return false;
  const double s0 = specific.terms[0].second;
  const double g0 = general.terms[0].second;
  if ((s0 > 0) != (g0 > 0)) return false;
  for (std::size_t i = 0; i < specific.terms.size(); ++i) {
    if (specific.terms[i].first != general.terms[i].first) return false;
    if (specific.terms[i].second * g0 != s0 * general.terms[i].second) {
      return false;
    }
  }
  if (IsUpperDirection(specific.relation) !=
      IsUpperDirection(general.relation)) {
    return false;
  }
  const double scaled = specific.threshold * (g0 / s0);
  const bool general_strict = general.relation == Relation::kLt ||
                              general.relation == Relation::kGt;
  const bool specific_strict = specific.relation == Relation::kLt ||
                               specific.relation == Relation::kGt;
  const bool upper = IsUpperDirection(general.relation);
  if (scaled == general.threshold) return specific_strict || !general_strict;
  return upper ? scaled < general.threshold : scaled > general.threshold;
}

NumericInterval Hull(const NumericInterval& a, const NumericInterval& b) {
  NumericInterval out = a;
  if (b.lower < a.lower) {
    out.lower = b.lower;
    out.lower_closed = b.lower_closed;
  } else if (b.lower == a.lower) {
    out.lower_closed = a.lower_closed || b.lower_closed;
  }
  if (b.upper > a.upper) {
    out.upper = b.upper;
    out.upper_closed = b.upper_closed;
  } else if (b.upper == a.upper) {
    out.upper_closed = a.upper_closed || b.upper_closed;
  }
  if (out.lower == -kInf) out.lower_closed = false;
  if (out.upper == kInf) out.upper_closed = false;
  return out;
}

bool IsClosedUpperBound(const NumericInterval* iv) {
  return iv != nullptr && iv->is_upper_bound_only() && iv->upper_closed;
}

[[noreturn]] void NotAffine(const std::string& why) {
  throw AlgebraError("not affinely generalizable: " + why);
}

}  // namespace

SubsumptionResult Subsumes(const Premise& general, const Premise& specific) {
  const SubsumptionResult undecided{false, SubsumptionMethod::kUndecided};
  for (const auto& c : general.categorical()) {
    const CategoricalEq* other = specific.FindCategorical(c.feature);
    if (other == nullptr || other->category != c.category) return undecided;
  }
  for (const auto& iv : general.intervals()) {
    const NumericInterval* other = specific.FindInterval(iv.feature);
    if (other == nullptr || !LowerWithin(iv, *other) ||
        !UpperWithin(iv, *other)) {
      return undecided;
    }
  }
  for (const auto& lin : general.linear()) {
    const bool witnessed = std::any_of(
        specific.linear().begin(), specific.linear().end(),
        [&](const LinearConstraint& s) { return LinearImplies(s, lin); });
    if (!witnessed) return undecided;
  }
  return {true, SubsumptionMethod::kSyntactic};
}

Rule Merge(const Rule& a, const Rule& b) {
  if (a.consequent != b.consequent) {
    throw AlgebraError("cannot merge rules with different consequents");
  }
  Rule out;
  out.consequent = a.consequent;
  for (const auto& c : a.premise.categorical()) {
    const CategoricalEq* other = b.premise.FindCategorical(c.feature);
    if (other != nullptr && other->category == c.category) out.premise.Add(c);
  }
  for (const auto& iv : a.premise.intervals()) {
    const NumericInterval* other = b.premise.FindInterval(iv.feature);
    if (other == nullptr) continue;
    NumericInterval hull = Hull(iv, *other);
    if (hull.lower == -kInf && hull.upper == kInf) continue;
    out.premise.Add(hull);
  }
  for (const auto& lin : a.premise.linear()) {
    const auto& others = b.premise.linear();
    if (std::find(others.begin(), others.end(), lin) != others.end()) {
      out.premise.Add(lin);
    }
  }
  return out;
}

ParamRule AffineGeneralize(const Rule& a, const Rule& b) {
  if (a.consequent != b.consequent) NotAffine("different consequents");
  if (a.premise.categorical() != b.premise.categorical()) {
    NotAffine("categorical predicates differ");
  }
  if (a.premise.linear() != b.premise.linear()) {
    NotAffine("linear constraints differ");
  }
  std::vector<int> features;
  for (const auto& iv : a.premise.intervals()) features.push_back(iv.feature);
  for (const auto& iv : b.premise.intervals()) features.push_back(iv.feature);
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  std::vector<int> differing;
  std::vector<int> candidates;
  for (int f : features) {
    const NumericInterval* ia = a.premise.FindInterval(f);
    const NumericInterval* ib = b.premise.FindInterval(f);
    const bool same = ia != nullptr && ib != nullptr && *ia == *ib;
    if (!same) differing.push_back(f);
    if (IsClosedUpperBound(ia) && IsClosedUpperBound(ib)) {
      candidates.push_back(f);
    }
  }
  int first = 0;
  int second = 0;
  if (differing.size() == 2) {
    first = differing[0];
    second = differing[1];
    if (!IsClosedUpperBound(a.premise.FindInterval(first)) ||
        !IsClosedUpperBound(b.premise.FindInterval(first)) ||
        !IsClosedUpperBound(a.premise.FindInterval(second)) ||
        !IsClosedUpperBound(b.premise.FindInterval(second))) {
      NotAffine("differing predicates are not upper bounds");
    }
  } else if (differing.empty() && candidates.size() >= 2) {
    first = candidates[0];
    second = candidates[1];
  } else {
    NotAffine("premises must differ in exactly two upper bounds");
  }

  const double tf1 = a.premise.FindInterval(first)->upper;
  const double tg1 = a.premise.FindInterval(second)->upper;
  const double tf2 = b.premise.FindInterval(first)->upper;
  const double tg2 = b.premise.FindInterval(second)->upper;
  const double sum = tf1 + tg1;
  if (tf2 + tg2 != sum || sum - tf1 != tg1 || sum - tf2 != tg2) {
    NotAffine("bound sums differ");
  }

  ParamRule out;
  out.base = a.premise;
  out.base.Erase(first);
  out.base.Erase(second);
  out.first_feature = first;
  out.second_feature = second;
  out.sum = sum;
  out.a_lo = std::min(tf1, tf2);
  out.a_hi = std::max(tf1, tf2);
  out.consequent = a.consequent;
  return out;
}

Rule Instantiate(const ParamRule& rule, double a) {
  if (!(a >= rule.a_lo && a <= rule.a_hi)) {
    throw AlgebraError("parameter " + FormatNumber(a) + " outside [" +
                       FormatNumber(rule.a_lo) + ", " +
                       FormatNumber(rule.a_hi) + "]");
  }
  Rule out;
  out.premise = rule.base;
  out.premise.Add(UpperBound(rule.first_feature, a));
  out.premise.Add(UpperBound(rule.second_feature, rule.sum - a));
  out.consequent = rule.consequent;
  return out;
}

std::string FormatParamRule(const ParamRule& rule,
                            const FeatureSchema& schema) {
  std::string out = FormatPremise(rule.base, schema);
  if (!out.empty()) out += ", ";
  out += schema.feature(rule.first_feature).name + " <= a, ";
  out += schema.feature(rule.second_feature).name + " <= " +
         FormatNumber(rule.sum) + "-a, ";
  out += FormatNumber(rule.a_lo) + " <= a <= " + FormatNumber(rule.a_hi);
  out += " -> " + schema.target_name() + " = " +
         schema.class_name(rule.consequent);
  return out;
}

std::optional<double> CompositionBound(const CompositionCounts& c) {
  if (c.n_c == 0) return std::nullopt;
  const double slack = static_cast<double>(c.n_ab - (c.n_a - c.n_ac));
  return std::max(0.0, slack / static_cast<double>(c.n_c));
}

CompositionCounts CountComposition(const Rule& decision,
                                   const BackgroundRule& background,
                                   const LabeledDataset& data) {
  CompositionCounts c;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Record& r = data.records[i];
    const bool in_a = Covers(decision.premise, r);
    const bool in_c = Covers(background.conclusion, r);
    c.n_a += in_a;
    c.n_c += in_c;
    c.n_ac += in_a && in_c;
    c.n_ab += in_a && data.labels[i] == decision.consequent;
  }
  return c;
}

Composition ComposeBackground(const Rule& decision,
                              const BackgroundRule& background,
                              const LabeledDataset& data) {
  if (!(decision.premise == background.premise)) {
    throw AlgebraError("decision and background rules must share a premise");
  }
  Composition out;
  out.rule.premise = background.conclusion;
  out.rule.consequent = decision.consequent;
  out.confidence_lower_bound =
      CompositionBound(CountComposition(decision, background, data));
  return out;
}

}  // namespace glocal
