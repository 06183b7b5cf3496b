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

// Statistical measures of a rule over a labeled dataset.

#ifndef GLOCAL_MEASURES_H_
#define GLOCAL_MEASURES_H_

#include <cstdint>
#include <optional>

#include "glocal/rule.h"
#include "glocal/schema.h"

namespace glocal {

// 2x2 counts of (premise covers) x (label matches the consequent).
struct ContingencyTable {
  std::int64_t covered_match = 0;
  std::int64_t covered_mismatch = 0;
  std::int64_t uncovered_match = 0;
  std::int64_t uncovered_mismatch = 0;

  std::int64_t total() const {
    return covered_match + covered_mismatch + uncovered_match +
           uncovered_mismatch;
  }
};

ContingencyTable Tabulate(const Rule& rule, const LabeledDataset& data);

// Undefined values (zero coverage, degenerate entropies) are nullopt, never 0.
struct RuleMeasures {
  double support = 0.0;
  double coverage = 0.0;
  std::optional<double> confidence;
  std::optional<double> lift;
  std::optional<double> mi_score;
  double p_value = 1.0;
};

RuleMeasures Measure(const ContingencyTable& table);
// Throws std::invalid_argument on an empty dataset.
RuleMeasures Measure(const Rule& rule, const LabeledDataset& data);

// Normalized mutual information (H(A)+H(B)-H(A,B)) / min(H(A),H(B)), in bits.
std::optional<double> MutualInformationScore(const ContingencyTable& table);

// Pearson chi-square independence test with one degree of freedom. The Yates
// continuity correction is applied when any expected count is below 5. A zero
// marginal yields 1.
double ChiSquarePValue(const ContingencyTable& table);
// Statistic only (same correction rule); 0 when a marginal is zero.
double ChiSquareStatistic(const ContingencyTable& table);
double SignificanceTest(const Rule& rule, const LabeledDataset& data);

}  // namespace glocal

#endif  // GLOCAL_MEASURES_H_
