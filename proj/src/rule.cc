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

#include "glocal/rule.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glocal {
namespace {

void Normalize(NumericInterval& iv) {
  if (iv.lower == -kInf) iv.lower_closed = false;
  if (iv.upper == kInf) iv.upper_closed = false;
}

void CheckInterval(const NumericInterval& iv) {
  if (std::isnan(iv.lower) || std::isnan(iv.upper)) {
    throw std::invalid_argument("interval bound is NaN");
  }
  if (iv.lower == -kInf && iv.upper == kInf) {
    throw std::invalid_argument("interval without a finite bound");
  }
  if (iv.lower > iv.upper ||
      (iv.lower == iv.upper && !(iv.lower_closed && iv.upper_closed))) {
    throw std::invalid_argument("empty interval");
  }
}

NumericInterval Intersect(const NumericInterval& a, const NumericInterval& b) {
  NumericInterval out = a;
  if (b.lower > out.lower) {
    out.lower = b.lower;
    out.lower_closed = b.lower_closed;
  } else if (b.lower == out.lower) {
    out.lower_closed = a.lower_closed && b.lower_closed;
  }
  if (b.upper < out.upper) {
    out.upper = b.upper;
    out.upper_closed = b.upper_closed;
  } else if (b.upper == out.upper) {
    out.upper_closed = a.upper_closed && b.upper_closed;
  }
  return out;
}

bool Compare(double lhs, Relation rel, double rhs) {
  switch (rel) {
    case Relation::kLe:
      return lhs <= rhs;
    case Relation::kLt:
      return lhs < rhs;
    case Relation::kGe:
      return lhs >= rhs;
    case Relation::kGt:
      return lhs > rhs;
  }
  return false;
}

// Total order used to keep linear constraints canonical.
bool LinearLess(const LinearConstraint& a, const LinearConstraint& b) {
  if (a.terms != b.terms) return a.terms < b.terms;
  if (a.relation != b.relation) return a.relation < b.relation;
  return a.threshold < b.threshold;
}

}  // namespace

bool LinearConstraint::Holds(const Record& record) const {
  double sum = 0.0;
  for (const auto& [feature, coef] : terms) sum += coef * record[feature];
  return Compare(sum, relation, threshold);
}

int MaxFeatureIndex(const Predicate& predicate) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearConstraint>) {
          return p.terms.empty() ? -1 : p.terms.back().first;
        } else {
          return p.feature;
        }
      },
      predicate);
}

NumericInterval UpperBound(int feature, double value, bool closed) {
  return NumericInterval{feature, -kInf, value, false, closed};
}

NumericInterval LowerBound(int feature, double value, bool closed) {
  return NumericInterval{feature, value, kInf, closed, false};
}

NumericInterval ClosedInterval(int feature, double lower, double upper) {
  return NumericInterval{feature, lower, upper, true, true};
}

LinearConstraint MakeLinear(std::vector<std::pair<int, double>> terms,
                            Relation relation, double threshold) {
  std::sort(terms.begin(), terms.end());
  std::vector<std::pair<int, double>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  if (merged.empty()) {
    throw std::invalid_argument("linear constraint without nonzero term");
  }
  return LinearConstraint{std::move(merged), relation, threshold};
}

Premise::Premise(std::initializer_list<Predicate> predicates) {
  for (const Predicate& p : predicates) Add(p);
}

void Premise::Add(const Predicate& predicate) {
  if (const auto* c = std::get_if<CategoricalEq>(&predicate)) {
    auto it = std::lower_bound(
        categorical_.begin(), categorical_.end(), c->feature,
        [](const CategoricalEq& a, int f) { return a.feature < f; });
    if (it != categorical_.end() && it->feature == c->feature) {
      if (it->category != c->category) {
        throw std::invalid_argument("contradictory categorical predicates");
      }
      return;
    }
    categorical_.insert(it, *c);
  } else if (const auto* iv = std::get_if<NumericInterval>(&predicate)) {
    NumericInterval norm = *iv;
    Normalize(norm);
    CheckInterval(norm);
    auto it = std::lower_bound(
        intervals_.begin(), intervals_.end(), norm.feature,
        [](const NumericInterval& a, int f) { return a.feature < f; });
    if (it != intervals_.end() && it->feature == norm.feature) {
      NumericInterval merged = Intersect(*it, norm);
      CheckInterval(merged);
      *it = merged;
      return;
    }
    intervals_.insert(it, norm);
  } else {
    const auto& lin = std::get<LinearConstraint>(predicate);
    if (lin.terms.empty()) {
      throw std::invalid_argument("linear constraint without terms");
    }
    LinearConstraint canon = MakeLinear(lin.terms, lin.relation, lin.threshold);
    auto it = std::lower_bound(linear_.begin(), linear_.end(), canon,
                               LinearLess);
    if (it != linear_.end() && *it == canon) return;
    linear_.insert(it, std::move(canon));
  }
}

const CategoricalEq* Premise::FindCategorical(int feature) const {
  for (const auto& c : categorical_) {
    if (c.feature == feature) return &c;
  }
  return nullptr;
}

const NumericInterval* Premise::FindInterval(int feature) const {
  for (const auto& iv : intervals_) {
    if (iv.feature == feature) return &iv;
  }
  return nullptr;
}

void Premise::Erase(int feature) {
  std::erase_if(categorical_,
                [feature](const CategoricalEq& c) { return c.feature == feature; });
  std::erase_if(intervals_, [feature](const NumericInterval& iv) {
    return iv.feature == feature;
  });
}

std::vector<Predicate> Premise::Predicates() const {
  std::vector<Predicate> out;
  out.reserve(size());
  auto c = categorical_.begin();
  auto iv = intervals_.begin();
  while (c != categorical_.end() || iv != intervals_.end()) {
    if (iv == intervals_.end() ||
        (c != categorical_.end() && c->feature < iv->feature)) {
      out.emplace_back(*c++);
    } else {
      out.emplace_back(*iv++);
    }
  }
  for (const auto& lin : linear_) out.emplace_back(lin);
  return out;
}

bool Premise::Holds(const Record& record) const {
  for (const auto& c : categorical_) {
    if (record.category(c.feature) != c.category) return false;
  }
  for (const auto& iv : intervals_) {
    if (!iv.Contains(record[iv.feature])) return false;
  }
  for (const auto& lin : linear_) {
    if (!lin.Holds(record)) return false;
  }
  return true;
}

bool Covers(const Premise& premise, const Record& record) {
  // Categorical and interval predicates are sorted by feature.
  int max_feature = -1;
  if (!premise.categorical().empty()) {
    max_feature = premise.categorical().back().feature;
  }
  if (!premise.intervals().empty()) {
    max_feature = std::max(max_feature, premise.intervals().back().feature);
  }
  for (const LinearConstraint& c : premise.linear()) {
    max_feature = std::max(max_feature, MaxFeatureIndex(c));
  }
  if (max_feature >= static_cast<int>(record.size())) {
    throw SchemaError("premise references a feature absent from the record");
  }
  return premise.Holds(record);
}

void CheckPremise(const FeatureSchema& schema, const Premise& premise) {
  const int arity = static_cast<int>(schema.size());
  auto check_feature = [&](int f, FeatureKind kind) {
    if (f < 0 || f >= arity) throw SchemaError("unknown feature index");
    if (schema.feature(f).kind != kind) {
      throw SchemaError("predicate kind mismatch on " + schema.feature(f).name);
    }
  };
  for (const auto& c : premise.categorical()) {
    check_feature(c.feature, FeatureKind::kCategorical);
    if (c.category < 0 ||
        c.category >= static_cast<int>(
                           schema.feature(c.feature).categories.size())) {
      throw SchemaError("category out of range");
    }
  }
  for (const auto& iv : premise.intervals()) {
    check_feature(iv.feature, FeatureKind::kContinuous);
  }
  for (const auto& lin : premise.linear()) {
    for (const auto& t : lin.terms) {
      check_feature(t.first, FeatureKind::kContinuous);
    }
  }
}

}  // namespace glocal
