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

// Shared fixtures and random generators for the unit tests.

#ifndef GLOCAL_TESTS_TEST_UTIL_H_
#define GLOCAL_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "glocal/rule.h"
#include "glocal/schema.h"

namespace glocal::testing {

// Three continuous features on [0, 1] and two categorical ones; one category
// contains a space to exercise the rule grammar.
inline FeatureSchema MixedSchema() {
  return FeatureSchema({
      {"a", FeatureKind::kContinuous, {}, 0.0, 1.0},
      {"b", FeatureKind::kContinuous, {}, 0.0, 1.0},
      {"c", FeatureKind::kContinuous, {}, 0.0, 1.0},
      {"d", FeatureKind::kCategorical, {"p", "q", "r"}},
      {"e", FeatureKind::kCategorical, {"big red", "small", "x-1"}},
  });
}

// Single continuous feature x1 on [0, 1].
inline FeatureSchema OneFeatureSchema() {
  return FeatureSchema({{"x1", FeatureKind::kContinuous, {}, 0.0, 1.0}});
}

// Continuous values on a 0.1 grid, so interval endpoints are hit exactly.
inline Record RandomRecord(const FeatureSchema& schema, std::mt19937_64& rng) {
  std::vector<double> v(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Feature& f = schema.feature(i);
    if (f.is_categorical()) {
      v[i] = std::uniform_int_distribution<int>(
          0, static_cast<int>(f.categories.size()) - 1)(rng);
    } else {
      v[i] = std::uniform_int_distribution<int>(0, 10)(rng) / 10.0;
    }
  }
  return Record(std::move(v));
}

inline LabeledDataset RandomDataset(const FeatureSchema& schema, std::size_t n,
                                    std::mt19937_64& rng) {
  LabeledDataset d;
  d.schema = schema;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    d.records.push_back(RandomRecord(schema, rng));
    d.labels.push_back(coin(rng) ? 1 : 0);
  }
  return d;
}

inline double GridValue(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(0, 10)(rng) / 10.0;
}

// Random canonical premise; `with_linear` adds an occasional linear constraint.
inline Premise RandomPremise(const FeatureSchema& schema, std::mt19937_64& rng,
                             bool with_linear = false) {
  Premise p;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!coin(rng)) continue;
    const int f = static_cast<int>(i);
    const Feature& feat = schema.feature(i);
    if (feat.is_categorical()) {
      p.Add(CategoricalEq{f, std::uniform_int_distribution<int>(
                                 0, static_cast<int>(feat.categories.size()) - 1)(rng)});
      continue;
    }
    double lo = GridValue(rng);
    double hi = GridValue(rng);
    if (lo > hi) std::swap(lo, hi);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0:
        p.Add(UpperBound(f, hi, coin(rng)));
        break;
      case 1:
        p.Add(LowerBound(f, lo, coin(rng)));
        break;
      case 2:
        p.Add(ClosedInterval(f, lo, hi));
        break;
      default:
        if (lo == hi) hi = lo + 0.05;
        p.Add(LowerBound(f, lo, false));
        p.Add(UpperBound(f, hi, true));
        break;
    }
  }
  if (with_linear && std::bernoulli_distribution(0.3)(rng)) {
    const Relation rels[] = {Relation::kLe, Relation::kLt, Relation::kGe,
                             Relation::kGt};
    p.Add(MakeLinear({{0, 1.0}, {1, 2.5}}, rels[rng() % 4], 1.5));
  }
  return p;
}

inline Rule RandomRule(const FeatureSchema& schema, std::mt19937_64& rng,
                       bool with_linear = false) {
  return Rule{RandomPremise(schema, rng, with_linear),
              std::bernoulli_distribution(0.5)(rng) ? 1 : 0};
}

// Fresh empty directory under the system temp dir.
inline std::string TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("glocal_test_" + name + "_" +
                    std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace glocal::testing

#endif  // GLOCAL_TESTS_TEST_UTIL_H_
