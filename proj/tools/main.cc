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

// glocal: local-to-global explanations of binary black-box classifiers.

#include <functional>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.h"
#include "glocal/neighborhood.h"

int main(int argc, char** argv) {
  using glocal::cli::RunConfig;
  RunConfig cfg;
  CLI::App app("Local-to-global explanations of black-box classifiers");
  app.set_config("--config", "", "Flat 'key = value' file; flags override it");
  app.allow_config_extras(false);
  app.require_subcommand(1);

  std::string neigh = "genetic";
  app.add_option("--data", cfg.data, "CSV dataset with a header row");
  app.add_option("--schema", cfg.schema, "Schema sidecar (tab separated)");
  app.add_option("--oracle", cfg.oracle, "builtin | tcp:<host>:<port> | cmd:<argv>");
  app.add_option("--model", cfg.model, "Builtin forest dump to load or write");
  app.add_option("--seed", cfg.seed, "Run seed (required)");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--jobs", cfg.jobs, "Parallel explanations")->capture_default_str();
  app.add_option("--neigh", neigh, "Neighborhood: uniform | genetic")
      ->check(CLI::IsMember({"uniform", "genetic"}))
      ->capture_default_str();
  app.add_option("--size", cfg.neighborhood.size, "Neighborhood size")
      ->capture_default_str();
  app.add_option("--ga-population", cfg.neighborhood.ga.population_size)
      ->capture_default_str();
  app.add_option("--ga-generations", cfg.neighborhood.ga.generations)
      ->capture_default_str();
  app.add_option("--ga-crossover", cfg.neighborhood.ga.crossover_prob)
      ->capture_default_str();
  app.add_option("--ga-mutation", cfg.neighborhood.ga.mutation_prob)
      ->capture_default_str();
  app.add_option("--ga-elitism", cfg.neighborhood.ga.elitism_count)
      ->capture_default_str();
  app.add_option("--tree-min-leaf", cfg.tree.min_leaf, "Surrogate min leaf size")
      ->capture_default_str();
  app.add_option("--tree-max-depth", cfg.tree.max_depth, "Surrogate max depth")
      ->capture_default_str();
  app.add_option("--trees", cfg.forest.n_trees, "Builtin forest size")
      ->capture_default_str();
  app.add_option("--forest-max-depth", cfg.forest.max_depth)->capture_default_str();
  app.add_option("--holdout", cfg.holdout, "Holdout fraction for train")
      ->capture_default_str();
  app.add_flag("--include-unfaithful", cfg.include_unfaithful,
               "Keep local rules that disagree with the black box on x");
  app.add_option("--instance", cfg.instance, "Record index to explain");
  app.add_option("--record", cfg.record, "Inline record v1,v2,... to explain");
  app.add_option("--rules", cfg.rules, "Rule file");
  app.add_option("--records", cfg.synth_size, "Synthetic dataset size")
      ->capture_default_str();
  app.add_option("--noise", cfg.synth_noise, "Synthetic label noise")
      ->capture_default_str();

  using Command = std::function<int(const RunConfig&, std::ostream&, std::ostream&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands = {
      {"train", {"Train the builtin forest", glocal::cli::Train}},
      {"explain", {"Explain one record", glocal::cli::ExplainOne}},
      {"explain-all", {"Explain every record", glocal::cli::ExplainAll}},
      {"globalize", {"Build and select a global explanation", glocal::cli::Globalize}},
      {"evaluate", {"Score a rule file against the black box", glocal::cli::Evaluate}},
      {"export-dot", {"Dendrogram of a rule file as DOT", glocal::cli::ExportDot}},
      {"serve", {"Serve the builtin forest over stdin/stdout", glocal::cli::Serve}},
      {"synth", {"Write the synthetic benchmark", glocal::cli::Synth}},
  };
  for (const auto& [name, entry] : commands) {
    app.add_subcommand(name, entry.first)->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);
  cfg.neighborhood.method = glocal::ParseNeighborhoodMethod(neigh);
  try {
    for (const auto& [name, entry] : commands) {
      if (app.got_subcommand(name)) return entry.second(cfg, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
