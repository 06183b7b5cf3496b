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

// Rule language: predicates, conjunctive premises and classification rules.

#ifndef GLOCAL_RULE_H_
#define GLOCAL_RULE_H_

#include <compare>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "glocal/schema.h"

namespace glocal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// feature == category.
struct CategoricalEq {
  int feature = 0;
  int category = 0;

  bool operator==(const CategoricalEq&) const = default;
};

// Interval over a continuous feature. Infinite bounds are always open.
struct NumericInterval {
  int feature = 0;
  double lower = -kInf;
  double upper = kInf;
  bool lower_closed = false;
  bool upper_closed = false;

  bool Contains(double v) const {
    const bool above = lower_closed ? v >= lower : v > lower;
    const bool below = upper_closed ? v <= upper : v < upper;
    return above && below;
  }
  bool is_upper_bound_only() const {
    return lower == -kInf && upper != kInf;
  }
  bool operator==(const NumericInterval&) const = default;
};

enum class Relation { kLe, kLt, kGe, kGt };

// sum_i coef_i * feature_i <relation> threshold, over continuous features.
struct LinearConstraint {
  // Sorted by feature index; coefficients are nonzero.
  std::vector<std::pair<int, double>> terms;
  Relation relation = Relation::kLe;
  double threshold = 0.0;

  bool Holds(const Record& record) const;
  bool operator==(const LinearConstraint&) const = default;
};

using Predicate = std::variant<CategoricalEq, NumericInterval, LinearConstraint>;

int MaxFeatureIndex(const Predicate& predicate);

NumericInterval UpperBound(int feature, double value, bool closed = true);
NumericInterval LowerBound(int feature, double value, bool closed = false);
NumericInterval ClosedInterval(int feature, double lower, double upper);
LinearConstraint MakeLinear(std::vector<std::pair<int, double>> terms,
                            Relation relation, double threshold);

// Conjunction of predicates kept in canonical form: at most one categorical
// and one interval predicate per feature, both sorted by feature index.
// Intervals on the same feature are intersected on insertion.
class Premise {
 public:
  Premise() = default;
  Premise(std::initializer_list<Predicate> predicates);

  // Throws std::invalid_argument on contradictions (two different categories
  // or disjoint intervals on one feature) and malformed predicates.
  void Add(const Predicate& predicate);

  bool empty() const {
    return categorical_.empty() && intervals_.empty() && linear_.empty();
  }
  std::size_t size() const {
    return categorical_.size() + intervals_.size() + linear_.size();
  }
  const std::vector<CategoricalEq>& categorical() const { return categorical_; }
  const std::vector<NumericInterval>& intervals() const { return intervals_; }
  const std::vector<LinearConstraint>& linear() const { return linear_; }
  const CategoricalEq* FindCategorical(int feature) const;
  const NumericInterval* FindInterval(int feature) const;
  // Removes every categorical/interval predicate on `feature`.
  void Erase(int feature);

  // Predicates in schema feature order, linear constraints last.
  std::vector<Predicate> Predicates() const;

  // Evaluates the conjunction without schema checks.
  bool Holds(const Record& record) const;

  bool operator==(const Premise&) const = default;

 private:
  std::vector<CategoricalEq> categorical_;
  std::vector<NumericInterval> intervals_;
  std::vector<LinearConstraint> linear_;
};

struct Rule {
  Premise premise;
  Label consequent = 0;

  bool operator==(const Rule&) const = default;
};

// True iff every predicate of `premise` holds on `record`. Throws SchemaError
// when the premise references a feature the record does not have.
bool Covers(const Premise& premise, const Record& record);

// Throws SchemaError if the premise does not fit the schema (unknown feature
// index, kind mismatch, category out of range).
void CheckPremise(const FeatureSchema& schema, const Premise& premise);

}  // namespace glocal

#endif  // GLOCAL_RULE_H_
