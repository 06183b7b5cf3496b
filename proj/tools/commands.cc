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

#include "commands.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "glocal/dataset_io.h"
#include "glocal/local2global.h"
#include "glocal/random.h"
#include "glocal/rule_text.h"
#include "glocal/synthetic.h"
#include "glocal/wire_protocol.h"

namespace glocal::cli {
namespace {

struct Context {
  LoadedDataset loaded;
  std::unique_ptr<Oracle> oracle;
  const LabeledDataset& data() const { return loaded.data; }
  const FeatureSchema& schema() const { return loaded.data.schema; }
};

LoadedDataset Load(const RunConfig& cfg) {
  if (cfg.data.empty()) throw std::invalid_argument("--data is required");
  if (cfg.schema.empty()) throw std::invalid_argument("--schema is required");
  return LoadDataset(cfg.data, cfg.schema);
}

std::unique_ptr<Oracle> OpenOracle(const RunConfig& cfg,
                                   const LoadedDataset& loaded) {
  if (cfg.oracle != "builtin") {
    return ConnectEndpoint(cfg.oracle, loaded.data.schema);
  }
  if (!cfg.model.empty()) {
    return std::unique_ptr<Oracle>(
        new ForestModel(LoadForest(ReadFile(cfg.model), loaded.data.schema)));
  }
  if (!loaded.labeled) {
    throw std::invalid_argument(
        "builtin oracle needs --model or a labeled dataset to train on");
  }
  ForestParams params = cfg.forest;
  params.seed = *cfg.seed;
  return std::unique_ptr<Oracle>(
      new ForestModel(TrainForest(loaded.data, params)));
}

Context Open(const RunConfig& cfg) {
  cfg.Validate();
  Context ctx;
  ctx.loaded = Load(cfg);
  ctx.oracle = OpenOracle(cfg, ctx.loaded);
  return ctx;
}

NeighborhoodConfig RunNeighborhood(const RunConfig& cfg) {
  NeighborhoodConfig n = cfg.neighborhood;
  n.seed = *cfg.seed;
  return n;
}

std::string OutPath(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  return (std::filesystem::path(cfg.out) / name).string();
}

std::string KeyValue(const std::string& key, const std::string& value) {
  return key + " = " + value + "\n";
}

double Accuracy(const Oracle& oracle, const LabeledDataset& data,
                const std::vector<std::size_t>& rows) {
  std::size_t hit = 0;
  for (std::size_t r : rows) hit += oracle.Predict(data.records[r]) == data.labels[r];
  return static_cast<double>(hit) / static_cast<double>(rows.size());
}

std::string Seconds(std::chrono::steady_clock::time_point start) {
  const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  return FormatNumber(std::round(d.count() * 1000.0) / 1000.0);
}

}  // namespace

void RunConfig::Validate() const {
  if (!seed) throw std::invalid_argument("--seed is required");
  if (jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  if (holdout < 0.0 || holdout >= 1.0) {
    throw std::invalid_argument("--holdout must lie in [0, 1)");
  }
  if (tree.min_leaf < 1 || tree.max_depth < 0) {
    throw std::invalid_argument("invalid tree parameters");
  }
  if (forest.n_trees < 1 || forest.max_depth < 0) {
    throw std::invalid_argument("invalid forest parameters");
  }
  neighborhood.Validate();
}

int Train(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  cfg.Validate();
  const LoadedDataset loaded = Load(cfg);
  const LabeledDataset& data = loaded.data;
  if (!loaded.labeled) throw std::invalid_argument("training data has no labels");
  if (cfg.model.empty() && cfg.out.empty()) {
    throw std::invalid_argument("train needs --model or --out");
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(DeriveSeed(*cfg.seed, "train.split"));
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_hold = static_cast<std::size_t>(
      std::floor(cfg.holdout * static_cast<double>(data.size())));
  std::vector<std::size_t> hold(order.begin(), order.begin() + n_hold);
  std::vector<std::size_t> train(order.begin() + n_hold, order.end());
  std::sort(hold.begin(), hold.end());
  std::sort(train.begin(), train.end());

  LabeledDataset train_set;
  train_set.schema = data.schema;
  for (std::size_t r : train) {
    train_set.records.push_back(data.records[r]);
    train_set.labels.push_back(data.labels[r]);
  }
  ForestParams params = cfg.forest;
  params.seed = *cfg.seed;
  const ForestModel model = TrainForest(train_set, params);

  std::string report;
  report += KeyValue("trees", std::to_string(params.n_trees));
  report += KeyValue("max_depth", std::to_string(params.max_depth));
  report += KeyValue("seed", std::to_string(params.seed));
  report += KeyValue("train_records", std::to_string(train.size()));
  report += KeyValue("holdout_records", std::to_string(hold.size()));
  report += KeyValue("train_accuracy", FormatNumber(Accuracy(model, data, train)));
  report += KeyValue("holdout_accuracy",
                     hold.empty() ? "nan" : FormatNumber(Accuracy(model, data, hold)));

  const std::string model_path =
      cfg.model.empty() ? OutPath(cfg, "model.txt") : cfg.model;
  WriteFile(model_path, model.Dump());
  if (!cfg.out.empty()) WriteFile(OutPath(cfg, "train_report.txt"), report);
  out << report;
  return 0;
}

int ExplainOne(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Context ctx = Open(cfg);
  if (cfg.instance.has_value() == !cfg.record.empty()) {
    throw std::invalid_argument("give exactly one of --instance or --record");
  }
  Record x;
  std::size_t index = 0;
  if (cfg.instance) {
    if (*cfg.instance < 0 ||
        static_cast<std::size_t>(*cfg.instance) >= ctx.data().size()) {
      throw std::invalid_argument("instance index " +
                                  std::to_string(*cfg.instance) +
                                  " out of range [0, " +
                                  std::to_string(ctx.data().size()) + ")");
    }
    index = static_cast<std::size_t>(*cfg.instance);
    x = ctx.data().records[index];
  } else {
    x = ParseInlineRecord(ctx.schema(), cfg.record);
  }
  const Explanation e = Explain(*ctx.oracle, ctx.schema(), x,
                                InstanceConfig(RunNeighborhood(cfg), index),
                                cfg.tree);
  if (e.factual.premise.empty()) {
    err << "warning: empty premise; the black box looks constant around this "
           "instance\n";
  }
  if (e.unfaithful_at_x) {
    err << "warning: the surrogate disagrees with the black box on the instance\n";
  }
  const std::string text = FormatExplanation(e, ctx.schema());
  if (!cfg.out.empty()) WriteFile(OutPath(cfg, "explanation.txt"), text);
  out << text;
  return 0;
}

namespace {

LocalCollection Collect(const RunConfig& cfg, const Context& ctx) {
  CollectOptions options;
  options.neighborhood = RunNeighborhood(cfg);
  options.tree = cfg.tree;
  options.jobs = cfg.jobs;
  options.include_unfaithful = cfg.include_unfaithful;
  return CollectLocal(*ctx.oracle, ctx.data(), options);
}

std::string FormatAllExplanations(const LocalCollection& c,
                                  const FeatureSchema& schema) {
  std::string text;
  for (std::size_t i = 0; i < c.explanations.size(); ++i) {
    text += "## record " + std::to_string(i) + "\n";
    text += FormatExplanation(c.explanations[i], schema);
  }
  return text;
}

}  // namespace

int ExplainAll(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  Context ctx = Open(cfg);
  if (cfg.out.empty()) throw std::invalid_argument("explain-all needs --out");
  const LabeledDataset relabeled = Relabel(*ctx.oracle, ctx.data());
  const LocalCollection local = Collect(cfg, ctx);
  WriteFile(OutPath(cfg, "explanations.txt"),
            FormatAllExplanations(local, ctx.schema()));
  if (!local.rules.empty()) {
    const GlobalExplanation all = EvaluateRuleSet(local.rules, relabeled);
    WriteFile(OutPath(cfg, "local_rules.txt"),
              FormatGlobalExplanation(all, ctx.schema()));
  }
  out << KeyValue("explanations", std::to_string(local.explanations.size()))
      << KeyValue("distinct_rules", std::to_string(local.rules.size()))
      << KeyValue("unfaithful", std::to_string(local.unfaithful))
      << KeyValue("locally_constant", std::to_string(local.locally_constant));
  return 0;
}

int Globalize(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx = Open(cfg);
  if (cfg.out.empty()) throw std::invalid_argument("globalize needs --out");
  if (ctx.data().empty()) throw std::invalid_argument("dataset is empty");
  const LabeledDataset relabeled = Relabel(*ctx.oracle, ctx.data());
  const LocalCollection local = Collect(cfg, ctx);
  if (local.rules.empty()) {
    throw std::runtime_error("no faithful local explanation to aggregate");
  }
  const GlobalExplanation all = EvaluateRuleSet(local.rules, relabeled);
  const Dendrogram d = BuildDendrogram(local.rules, relabeled);
  std::vector<CutScore> scores;
  const GlobalExplanation global = SelectCut(d, relabeled, &scores);

  WriteFile(OutPath(cfg, "explanations.txt"),
            FormatAllExplanations(local, ctx.schema()));
  WriteFile(OutPath(cfg, "local_rules.txt"),
            FormatGlobalExplanation(all, ctx.schema()));
  WriteFile(OutPath(cfg, "global_rules.txt"),
            FormatGlobalExplanation(global, ctx.schema()));
  WriteFile(OutPath(cfg, "dendrogram.dot"), DendrogramToDot(d));

  std::string csv = "height,rules,predicates,q,fidelity\n";
  for (const CutScore& s : scores) {
    csv += FormatNumber(s.height) + "," + std::to_string(s.rules) + "," +
           std::to_string(s.predicates) + "," + FormatNumber(s.q) + "," +
           FormatNumber(s.fidelity) + "\n";
  }
  WriteFile(OutPath(cfg, "cuts.csv"), csv);

  std::string report;
  report += KeyValue("records", std::to_string(ctx.data().size()));
  report += KeyValue("oracle", cfg.oracle);
  report += KeyValue("seed", std::to_string(*cfg.seed));
  report += KeyValue("neighborhood",
                     NeighborhoodMethodName(cfg.neighborhood.method));
  report += KeyValue("neighborhood_size", std::to_string(cfg.neighborhood.size));
  report += KeyValue("default_class", ctx.schema().class_name(global.default_class));
  report += KeyValue("unfaithful_explanations", std::to_string(local.unfaithful));
  report += KeyValue("locally_constant_explanations",
                     std::to_string(local.locally_constant));
  report += KeyValue("local_rules", std::to_string(all.rule_count()));
  report += KeyValue("local_predicates", std::to_string(all.predicate_count));
  report += KeyValue("local_fidelity", FormatNumber(all.fidelity));
  report += KeyValue("local_q", FormatNumber(all.q));
  report += KeyValue("global_rules", std::to_string(global.rule_count()));
  report += KeyValue("global_predicates", std::to_string(global.predicate_count));
  report += KeyValue("global_fidelity", FormatNumber(global.fidelity));
  report += KeyValue("global_q", FormatNumber(global.q));
  report += KeyValue("cut_height", FormatNumber(global.cut_height));
  report += KeyValue("candidate_cuts", std::to_string(scores.size()));
  report += KeyValue("oracle_queries", std::to_string(ctx.oracle->query_count()));
  WriteFile(OutPath(cfg, "metrics.txt"), report);
  out << report << KeyValue("wall_clock_seconds", Seconds(start));
  return 0;
}

int Evaluate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.rules.empty()) throw std::invalid_argument("--rules is required");
  Context ctx = Open(cfg);
  const RuleFile file = ParseRuleFile(ReadFile(cfg.rules), ctx.schema());
  if (file.rules.empty()) throw std::invalid_argument("rules file is empty");
  const LabeledDataset relabeled = Relabel(*ctx.oracle, ctx.data());
  if (relabeled.empty()) throw std::invalid_argument("dataset is empty");
  const GlobalExplanation g =
      EvaluateRuleSet(file.rules, relabeled, file.default_class);
  const RuleVoter voter(g.rules, relabeled);
  std::string report;
  report += KeyValue("records", std::to_string(relabeled.size()));
  report += KeyValue("rules", std::to_string(g.rule_count()));
  report += KeyValue("predicates", std::to_string(g.predicate_count));
  report += KeyValue("default_class", ctx.schema().class_name(g.default_class));
  report += KeyValue("fidelity", FormatNumber(g.fidelity));
  report += KeyValue("coverage", FormatNumber(Coverage(voter)));
  report += KeyValue("q", FormatNumber(g.q));
  if (!cfg.out.empty()) WriteFile(OutPath(cfg, "evaluation.txt"), report);
  out << report;
  return 0;
}

int ExportDot(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.rules.empty()) throw std::invalid_argument("--rules is required");
  Context ctx = Open(cfg);
  const RuleFile file = ParseRuleFile(ReadFile(cfg.rules), ctx.schema());
  if (file.rules.empty()) throw std::invalid_argument("rules file is empty");
  const LabeledDataset relabeled = Relabel(*ctx.oracle, ctx.data());
  const std::string dot = DendrogramToDot(
      BuildDendrogram(DedupeRules(file.rules, ctx.schema()), relabeled));
  if (cfg.out.empty()) {
    out << dot;
  } else {
    WriteFile(OutPath(cfg, "dendrogram.dot"), dot);
  }
  return 0;
}

int Serve(const RunConfig& cfg, std::ostream&, std::ostream&) {
  if (cfg.model.empty()) throw std::invalid_argument("serve needs --model");
  if (cfg.schema.empty()) throw std::invalid_argument("--schema is required");
  FeatureSchema schema;
  if (cfg.data.empty()) {
    SchemaFile sf = ParseSchemaFile(ReadFile(cfg.schema));
    if (std::find(sf.domain_given.begin(), sf.domain_given.end(), false) !=
        sf.domain_given.end()) {
      throw std::invalid_argument("schema leaves domains open; pass --data");
    }
    schema = FeatureSchema(std::move(sf.features),
                           sf.target_name.value_or("class"),
                           std::move(sf.class_names));
  } else {
    schema = Load(cfg).data.schema;
  }
  const ForestModel model = LoadForest(ReadFile(cfg.model), schema);
  FdChannel channel(0, 1);
  ServeOracle(model, schema, channel);
  return 0;
}

int Synth(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.seed) throw std::invalid_argument("--seed is required");
  if (cfg.out.empty()) throw std::invalid_argument("synth needs --out");
  const LabeledDataset d =
      MakeSyntheticDataset(cfg.synth_size, *cfg.seed, cfg.synth_noise);
  WriteFile(OutPath(cfg, "data.csv"), FormatDataset(d));
  WriteFile(OutPath(cfg, "schema.tsv"), FormatSchemaFile(d.schema));
  out << KeyValue("records", std::to_string(d.size()))
      << KeyValue("positive", std::to_string(d.CountLabel(1)));
  return 0;
}

}  // namespace glocal::cli
