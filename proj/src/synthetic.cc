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

#include "glocal/synthetic.h"

#include <random>

#include "glocal/random.h"

namespace glocal {

FeatureSchema SyntheticSchema() {
  std::vector<Feature> f;
  for (const char* name : {"x1", "x2", "x3", "x4", "x5"}) {
    f.push_back({name, FeatureKind::kContinuous, {}, 0.0, 1.0});
  }
  f.push_back({"color", FeatureKind::kCategorical, {"red", "green", "blue"}});
  f.push_back({"size", FeatureKind::kCategorical, {"s", "m", "l", "xl"}});
  f.push_back({"flag", FeatureKind::kCategorical, {"no", "yes"}});
  return FeatureSchema(std::move(f), "class", {"neg", "pos"});
}

Label SyntheticConcept(const Record& r) {
  const bool blue = r.category(5) == 2;
  const bool flag = r.category(7) == 1;
  if (r[0] > 0.6 && !blue) return 1;
  if (r[1] > 0.7 && r[2] > 0.5) return 1;
  if (flag && r[3] < 0.3) return 1;
  return 0;
}

LabeledDataset MakeSyntheticDataset(std::size_t n, std::uint64_t seed,
                                    double noise) {
  LabeledDataset d;
  d.schema = SyntheticSchema();
  std::mt19937_64 rng(DeriveSeed(seed, "synthetic"));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution flip(noise);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(d.schema.size());
    for (std::size_t j = 0; j < d.schema.size(); ++j) {
      const Feature& f = d.schema.feature(j);
      if (f.is_categorical()) {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(f.categories.size()) - 1);
        v[j] = pick(rng);
      } else {
        v[j] = u(rng);
      }
    }
    Record r(std::move(v));
    Label y = SyntheticConcept(r);
    if (flip(rng)) y = 1 - y;
    d.records.push_back(std::move(r));
    d.labels.push_back(y);
  }
  return d;
}

}  // namespace glocal
