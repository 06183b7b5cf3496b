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

// Operators over rules: subsumption, merge, affine generalization and
// composition with background knowledge.

#ifndef GLOCAL_RULE_ALGEBRA_H_
#define GLOCAL_RULE_ALGEBRA_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "glocal/rule.h"
#include "glocal/schema.h"

namespace glocal {

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SubsumptionMethod { kSyntactic, kUndecided };

struct SubsumptionResult {
  bool subsumes = false;
  SubsumptionMethod method = SubsumptionMethod::kUndecided;
};

// Sound, incomplete check that cover(specific) is a subset of cover(general):
// every predicate of `general` must be implied by a single predicate of
// `specific`. Linear constraints are compared only when their coefficient
// vectors are positive multiples of each other.
SubsumptionResult Subsumes(const Premise& general, const Premise& specific);

// Per-feature generalization: equal categoricals survive, intervals become
// their hull, one-sided and disagreeing predicates are dropped, linear
// constraints survive only if identical. Throws AlgebraError when the
// consequents differ.
Rule Merge(const Rule& a, const Rule& b);

// first <= a, second <= sum - a, a in [a_lo, a_hi], plus shared predicates.
struct ParamRule {
  Premise base;
  int first_feature = 0;
  int second_feature = 0;
  double sum = 0.0;
  double a_lo = 0.0;
  double a_hi = 0.0;
  Label consequent = 0;

  bool operator==(const ParamRule&) const = default;
};

// Minimal affine generalization of two rules that differ only in two upper
// bounds f <= t_f, g <= t_g with equal sums t_f + t_g (compared exactly).
// Throws AlgebraError("not affinely generalizable") otherwise.
ParamRule AffineGeneralize(const Rule& a, const Rule& b);

// Throws AlgebraError when `a` is outside [a_lo, a_hi].
Rule Instantiate(const ParamRule& rule, double a);

// "f <= a, g <= {s}-a, {a_lo} <= a <= {a_hi} -> name = label", shared
// predicates first.
std::string FormatParamRule(const ParamRule& rule, const FeatureSchema& schema);

// Background knowledge A -> C, where C is itself a premise (e.g. a fact about
// a hidden feature), not a class label.
struct BackgroundRule {
  Premise premise;
  Premise conclusion;
};

struct CompositionCounts {
  std::int64_t n_a = 0;
  std::int64_t n_ab = 0;
  std::int64_t n_ac = 0;
  std::int64_t n_c = 0;
};

struct Composition {
  Rule rule;  // C -> B
  // Lower bound on conf(C -> B); nullopt when n(C) = 0.
  std::optional<double> confidence_lower_bound;
};

// max(0, (n(A,B) - (n(A) - n(A,C))) / n(C)).
std::optional<double> CompositionBound(const CompositionCounts& counts);
CompositionCounts CountComposition(const Rule& decision,
                                   const BackgroundRule& background,
                                   const LabeledDataset& data);
// Throws AlgebraError when the two premises differ.
Composition ComposeBackground(const Rule& decision,
                              const BackgroundRule& background,
                              const LabeledDataset& data);

}  // namespace glocal

#endif  // GLOCAL_RULE_ALGEBRA_H_
