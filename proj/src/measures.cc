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

#include "glocal/measures.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace glocal {
namespace {

double EntropyBits(std::initializer_list<std::int64_t> counts,
                   std::int64_t total) {
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

ContingencyTable Tabulate(const Rule& rule, const LabeledDataset& data) {
  ContingencyTable t;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool covered = Covers(rule.premise, data.records[i]);
    const bool match = data.labels[i] == rule.consequent;
    if (covered) {
      ++(match ? t.covered_match : t.covered_mismatch);
    } else {
      ++(match ? t.uncovered_match : t.uncovered_mismatch);
    }
  }
  return t;
}

std::optional<double> MutualInformationScore(const ContingencyTable& t) {
  const std::int64_t n = t.total();
  if (n == 0) return std::nullopt;
  const std::int64_t a1 = t.covered_match + t.covered_mismatch;
  const std::int64_t b1 = t.covered_match + t.uncovered_match;
  const double ha = EntropyBits({a1, n - a1}, n);
  const double hb = EntropyBits({b1, n - b1}, n);
  const double denom = std::min(ha, hb);
  if (denom <= 0.0) return std::nullopt;
  const double hab = EntropyBits({t.covered_match, t.covered_mismatch,
                                  t.uncovered_match, t.uncovered_mismatch},
                                 n);
  // Rounding can push an exact product distribution slightly below zero.
  return std::clamp((ha + hb - hab) / denom, 0.0, 1.0);
}

double ChiSquareStatistic(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total());
  const std::array<double, 4> observed = {
      static_cast<double>(t.covered_match),
      static_cast<double>(t.covered_mismatch),
      static_cast<double>(t.uncovered_match),
      static_cast<double>(t.uncovered_mismatch)};
  const double row0 = observed[0] + observed[1];
  const double row1 = observed[2] + observed[3];
  const double col0 = observed[0] + observed[2];
  const double col1 = observed[1] + observed[3];
  if (row0 == 0 || row1 == 0 || col0 == 0 || col1 == 0) return 0.0;
  const std::array<double, 4> expected = {row0 * col0 / n, row0 * col1 / n,
                                          row1 * col0 / n, row1 * col1 / n};
  const bool yates =
      *std::min_element(expected.begin(), expected.end()) < 5.0;
  double stat = 0.0;
  for (int i = 0; i < 4; ++i) {
    double dev = std::abs(observed[i] - expected[i]);
    if (yates) dev = std::max(0.0, dev - 0.5);
    stat += dev * dev / expected[i];
  }
  return stat;
}

double ChiSquarePValue(const ContingencyTable& t) {
  // Survival function of chi-square with one degree of freedom.
  return std::erfc(std::sqrt(ChiSquareStatistic(t) / 2.0));
}

RuleMeasures Measure(const ContingencyTable& t) {
  const std::int64_t n = t.total();
  if (n == 0) throw std::invalid_argument("measure on an empty dataset");
  const double dn = static_cast<double>(n);
  RuleMeasures m;
  const std::int64_t covered = t.covered_match + t.covered_mismatch;
  const std::int64_t positives = t.covered_match + t.uncovered_match;
  m.support = static_cast<double>(t.covered_match) / dn;
  m.coverage = static_cast<double>(covered) / dn;
  if (covered > 0) {
    m.confidence = static_cast<double>(t.covered_match) /
                   static_cast<double>(covered);
    if (positives > 0) {
      m.lift = *m.confidence / (static_cast<double>(positives) / dn);
    }
  }
  m.mi_score = MutualInformationScore(t);
  m.p_value = ChiSquarePValue(t);
  return m;
}

RuleMeasures Measure(const Rule& rule, const LabeledDataset& data) {
  if (data.empty()) throw std::invalid_argument("measure on an empty dataset");
  return Measure(Tabulate(rule, data));
}

double SignificanceTest(const Rule& rule, const LabeledDataset& data) {
  if (data.empty()) throw std::invalid_argument("test on an empty dataset");
  return ChiSquarePValue(Tabulate(rule, data));
}

}  // namespace glocal
