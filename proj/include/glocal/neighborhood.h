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

// Synthetic local datasets around an instance, labeled by the black box.

#ifndef GLOCAL_NEIGHBORHOOD_H_
#define GLOCAL_NEIGHBORHOOD_H_

#include <cstdint>
#include <string>
#include <vector>

#include "glocal/oracle.h"
#include "glocal/schema.h"

namespace glocal {

enum class NeighborhoodMethod { kUniform, kGenetic };

struct GeneticParams {
  int population_size = 500;
  int generations = 20;
  double crossover_prob = 0.7;
  double mutation_prob = 0.2;
  int elitism_count = 5;
};

struct NeighborhoodConfig {
  int size = 1000;
  NeighborhoodMethod method = NeighborhoodMethod::kGenetic;
  GeneticParams ga;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on size < 10, probabilities outside [0,1]
  // or population_size < elitism_count.
  void Validate() const;
};

// Best fitness of each generation (index 0 is the initial population).
struct GeneticTrace {
  std::vector<double> best_same;
  std::vector<double> best_diff;
};

struct Neighborhood {
  std::vector<Record> records;
  std::vector<Label> labels;
  Record origin;
  Label origin_label = 0;
  // No record carries a label different from origin_label.
  bool locally_constant = false;
  GeneticTrace trace;

  std::size_t size() const { return records.size(); }
  // Fraction of records labeled origin_label.
  double class_balance() const;
};

// Mean over features of the categorical mismatch / range-normalized absolute
// difference (clipped to 1).
double MixedDistance(const FeatureSchema& schema, const Record& a,
                     const Record& b);

// `size` i.i.d. records (uniform over ranges / value sets) plus x itself.
Neighborhood GenerateUniform(const Record& x, const FeatureSchema& schema,
                             const NeighborhoodConfig& cfg,
                             const Oracle& oracle);

// Two genetic populations, one drawn toward records labeled like x and one
// toward records labeled differently, each contributing size/2 records, plus
// x itself.
Neighborhood GenerateGenetic(const Record& x, const FeatureSchema& schema,
                             const NeighborhoodConfig& cfg,
                             const Oracle& oracle);

Neighborhood GenerateNeighborhood(const Record& x, const FeatureSchema& schema,
                                  const NeighborhoodConfig& cfg,
                                  const Oracle& oracle);

NeighborhoodMethod ParseNeighborhoodMethod(const std::string& name);
std::string NeighborhoodMethodName(NeighborhoodMethod method);

}  // namespace glocal

#endif  // GLOCAL_NEIGHBORHOOD_H_
