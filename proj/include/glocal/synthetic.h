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

// Synthetic tabular benchmark: 5 continuous and 3 categorical features. The
// ground truth is a three-clause DNF of axis-aligned conditions; x5 and size
// are distractors.

#ifndef GLOCAL_SYNTHETIC_H_
#define GLOCAL_SYNTHETIC_H_

#include <cstdint>

#include "glocal/schema.h"

namespace glocal {

FeatureSchema SyntheticSchema();
// Ground-truth labeling function of the benchmark.
Label SyntheticConcept(const Record& r);
// n records sampled uniformly over SyntheticSchema(); labels follow the
// concept, flipped with probability `noise`.
LabeledDataset MakeSyntheticDataset(std::size_t n, std::uint64_t seed,
                                    double noise = 0.0);

}  // namespace glocal

#endif  // GLOCAL_SYNTHETIC_H_
