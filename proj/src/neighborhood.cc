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

#include "glocal/neighborhood.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "glocal/random.h"

namespace glocal {
namespace {

// Mutation jitter as a fraction of the feature range.
constexpr double kMutationScale = 0.05;
constexpr int kTournamentSize = 3;

Record SampleUniform(const FeatureSchema& schema, std::mt19937_64& rng) {
  std::vector<double> values(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Feature& f = schema.feature(i);
    if (f.is_categorical()) {
      std::uniform_int_distribution<int> pick(
          0, static_cast<int>(f.categories.size()) - 1);
      values[i] = pick(rng);
    } else if (f.min == f.max) {
      values[i] = f.min;
    } else {
      std::uniform_real_distribution<double> u(f.min, f.max);
      values[i] = std::clamp(u(rng), f.min, f.max);
    }
  }
  return Record(std::move(values));
}

// Labels by record value, shared by both populations of one run.
class LabelCache {
 public:
  explicit LabelCache(const Oracle& oracle) : oracle_(oracle) {}

  std::vector<Label> Resolve(const std::vector<Record>& records) {
    std::vector<Record> missing;
    std::map<std::vector<double>, bool> pending;
    for (const Record& r : records) {
      if (!cache_.contains(r.values()) &&
          pending.emplace(r.values(), true).second) {
        missing.push_back(r);
      }
    }
    if (!missing.empty()) {
      const std::vector<Label> labels = oracle_.PredictBatch(missing);
      for (std::size_t i = 0; i < missing.size(); ++i) {
        cache_.emplace(missing[i].values(), labels[i]);
      }
    }
    std::vector<Label> out;
    out.reserve(records.size());
    for (const Record& r : records) out.push_back(cache_.at(r.values()));
    return out;
  }

 private:
  const Oracle& oracle_;
  std::map<std::vector<double>, Label> cache_;
};

struct Individual {
  Record record;
  Label label = 0;
  double fitness = 0.0;
};

class GeneticSearch {
 public:
  GeneticSearch(const Record& x, Label x_label, const FeatureSchema& schema,
                const GeneticParams& params, bool want_same, LabelCache& cache,
                std::uint64_t seed)
      : x_(x),
        x_label_(x_label),
        schema_(schema),
        params_(params),
        want_same_(want_same),
        cache_(cache),
        rng_(seed) {}

  // Runs all generations and returns `count` records, never x itself.
  std::vector<Individual> Run(std::size_t count, std::vector<double>* trace) {
    std::vector<Record> init;
    init.reserve(params_.population_size);
    for (int i = 0; i < params_.population_size; ++i) {
      init.push_back(SampleUniform(schema_, rng_));
    }
    std::vector<Individual> population = Evaluate(std::move(init));
    trace->push_back(population.front().fitness);
    std::vector<std::vector<Individual>> history;
    for (int g = 0; g < params_.generations; ++g) {
      std::vector<Individual> next = Step(population);
      history.push_back(std::move(population));
      population = std::move(next);
      trace->push_back(population.front().fitness);
    }
    history.push_back(std::move(population));

    std::vector<Individual> out;
    out.reserve(count);
    for (auto gen = history.rbegin(); gen != history.rend(); ++gen) {
      for (const Individual& ind : *gen) {
        if (out.size() == count) return out;
        if (ind.record == x_) continue;
        out.push_back(ind);
      }
    }
    // Only reachable when every individual ever evaluated is a clone of x.
    while (out.size() < count) {
      Individual ind;
      ind.record = SampleUniform(schema_, rng_);
      ind.label = cache_.Resolve({ind.record}).front();
      out.push_back(std::move(ind));
    }
    return out;
  }

 private:
  double Fitness(const Record& z, Label label) const {
    const bool hit = want_same_ ? label == x_label_ : label != x_label_;
    return (hit ? 1.0 : 0.0) + (1.0 - MixedDistance(schema_, x_, z)) -
           (z == x_ ? 1.0 : 0.0);
  }

  // Evaluates and sorts by decreasing fitness (stable on index).
  std::vector<Individual> Evaluate(std::vector<Record> records) {
    const std::vector<Label> labels = cache_.Resolve(records);
    std::vector<Individual> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      out[i].label = labels[i];
      out[i].fitness = Fitness(records[i], labels[i]);
      out[i].record = std::move(records[i]);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Individual& a, const Individual& b) {
                       return a.fitness > b.fitness;
                     });
    return out;
  }

  const Individual& Tournament(const std::vector<Individual>& pop) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t best = pick(rng_);
    for (int i = 1; i < kTournamentSize; ++i) {
      const std::size_t c = pick(rng_);
      // Population is sorted, so a lower index is at least as fit.
      best = std::min(best, c);
    }
    return pop[best];
  }

  void Mutate(Record& z) {
    std::bernoulli_distribution mutate(params_.mutation_prob);
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      if (!mutate(rng_)) continue;
      const Feature& f = schema_.feature(i);
      if (f.is_categorical()) {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(f.categories.size()) - 1);
        z[i] = pick(rng_);
      } else if (f.range() > 0) {
        std::normal_distribution<double> jitter(0.0, kMutationScale * f.range());
        z[i] = std::clamp(z[i] + jitter(rng_), f.min, f.max);
      }
    }
  }

  std::vector<Individual> Step(const std::vector<Individual>& pop) {
    const std::size_t n = pop.size();
    const std::size_t elites =
        std::min<std::size_t>(n, std::max(params_.elitism_count, 0));
    std::vector<Record> children;
    children.reserve(n);
    std::bernoulli_distribution crossover(params_.crossover_prob);
    std::bernoulli_distribution coin(0.5);
    while (children.size() + elites < n) {
      Record a = Tournament(pop).record;
      Record b = Tournament(pop).record;
      if (crossover(rng_)) {
        for (std::size_t i = 0; i < schema_.size(); ++i) {
          if (coin(rng_)) std::swap(a[i], b[i]);
        }
      }
      Mutate(a);
      Mutate(b);
      children.push_back(std::move(a));
      if (children.size() + elites < n) children.push_back(std::move(b));
    }
    std::vector<Individual> next = Evaluate(std::move(children));
    // Elites keep their already computed fitness.
    next.insert(next.end(), pop.begin(), pop.begin() + elites);
    std::stable_sort(next.begin(), next.end(),
                     [](const Individual& a, const Individual& b) {
                       return a.fitness > b.fitness;
                     });
    return next;
  }

  const Record& x_;
  Label x_label_;
  const FeatureSchema& schema_;
  GeneticParams params_;
  bool want_same_;
  LabelCache& cache_;
  std::mt19937_64 rng_;
};

void Finish(Neighborhood& n) {
  n.records.push_back(n.origin);
  n.labels.push_back(n.origin_label);
  n.locally_constant = std::all_of(n.labels.begin(), n.labels.end(),
                                   [&](Label l) { return l == n.origin_label; });
}

}  // namespace

void NeighborhoodConfig::Validate() const {
  if (size < 10) throw std::invalid_argument("neighborhood size must be >= 10");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(ga.crossover_prob) || !prob(ga.mutation_prob)) {
    throw std::invalid_argument("GA probabilities must lie in [0, 1]");
  }
  if (ga.population_size < 1 || ga.population_size < ga.elitism_count) {
    throw std::invalid_argument("population_size must be >= elitism_count");
  }
  if (ga.generations < 0 || ga.elitism_count < 0) {
    throw std::invalid_argument("negative GA parameter");
  }
}

double Neighborhood::class_balance() const {
  if (labels.empty()) return 0.0;
  const auto same = std::count(labels.begin(), labels.end(), origin_label);
  return static_cast<double>(same) / static_cast<double>(labels.size());
}

double MixedDistance(const FeatureSchema& schema, const Record& a,
                     const Record& b) {
  if (schema.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const Feature& f = schema.feature(i);
    if (f.is_categorical()) {
      total += a.category(i) != b.category(i) ? 1.0 : 0.0;
    } else if (f.range() > 0) {
      total += std::min(1.0, std::abs(a[i] - b[i]) / f.range());
    }
  }
  return total / static_cast<double>(schema.size());
}

Neighborhood GenerateUniform(const Record& x, const FeatureSchema& schema,
                             const NeighborhoodConfig& cfg,
                             const Oracle& oracle) {
  cfg.Validate();
  CheckConforms(schema, x);
  std::mt19937_64 rng(DeriveSeed(cfg.seed, "neigh.uniform"));
  Neighborhood n;
  n.origin = x;
  n.origin_label = oracle.Predict(x);
  n.records.reserve(cfg.size + 1);
  for (int i = 0; i < cfg.size; ++i) n.records.push_back(SampleUniform(schema, rng));
  n.labels = oracle.PredictBatch(n.records);
  Finish(n);
  return n;
}

Neighborhood GenerateGenetic(const Record& x, const FeatureSchema& schema,
                             const NeighborhoodConfig& cfg,
                             const Oracle& oracle) {
  cfg.Validate();
  CheckConforms(schema, x);
  LabelCache cache(oracle);
  Neighborhood n;
  n.origin = x;
  n.origin_label = cache.Resolve({x}).front();
  const std::size_t half = static_cast<std::size_t>(cfg.size) / 2;
  const std::size_t other = static_cast<std::size_t>(cfg.size) - half;

  GeneticSearch same(x, n.origin_label, schema, cfg.ga, /*want_same=*/true,
                     cache, DeriveSeed(cfg.seed, "neigh.ga.same"));
  GeneticSearch diff(x, n.origin_label, schema, cfg.ga, /*want_same=*/false,
                     cache, DeriveSeed(cfg.seed, "neigh.ga.diff"));
  std::vector<Individual> a = same.Run(half, &n.trace.best_same);
  std::vector<Individual> b = diff.Run(other, &n.trace.best_diff);
  n.records.reserve(cfg.size + 1);
  n.labels.reserve(cfg.size + 1);
  for (auto* part : {&a, &b}) {
    for (Individual& ind : *part) {
      n.records.push_back(std::move(ind.record));
      n.labels.push_back(ind.label);
    }
  }
  Finish(n);
  return n;
}

Neighborhood GenerateNeighborhood(const Record& x, const FeatureSchema& schema,
                                  const NeighborhoodConfig& cfg,
                                  const Oracle& oracle) {
  return cfg.method == NeighborhoodMethod::kGenetic
             ? GenerateGenetic(x, schema, cfg, oracle)
             : GenerateUniform(x, schema, cfg, oracle);
}

NeighborhoodMethod ParseNeighborhoodMethod(const std::string& name) {
  if (name == "uniform") return NeighborhoodMethod::kUniform;
  if (name == "genetic") return NeighborhoodMethod::kGenetic;
  throw std::invalid_argument("unknown neighborhood method: " + name);
}

std::string NeighborhoodMethodName(NeighborhoodMethod method) {
  return method == NeighborhoodMethod::kGenetic ? "genetic" : "uniform";
}

}  // namespace glocal
