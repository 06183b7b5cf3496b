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

// Command implementations behind the glocal CLI.

#ifndef GLOCAL_TOOLS_COMMANDS_H_
#define GLOCAL_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "glocal/forest.h"
#include "glocal/neighborhood.h"
#include "glocal/surrogate.h"

namespace glocal::cli {

struct RunConfig {
  std::string data;
  std::string schema;
  // "builtin", "tcp:<host>:<port>" or "cmd:<argv>".
  std::string oracle = "builtin";
  // Builtin forest dump; the forest is trained on --data when empty.
  std::string model;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
  NeighborhoodConfig neighborhood;
  TreeParams tree;
  ForestParams forest;
  double holdout = 0.2;
  bool include_unfaithful = false;

  std::optional<long long> instance;
  std::string record;
  std::string rules;
  std::size_t synth_size = 1000;
  double synth_noise = 0.0;

  // Throws std::invalid_argument on a missing seed and similar problems.
  void Validate() const;
};

// Each returns the process exit code; reports go to `out`, warnings to `err`.
int Train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int ExplainOne(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int ExplainAll(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int Globalize(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int Evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int ExportDot(const RunConfig& cfg, std::ostream& out, std::ostream& err);
// Answers the oracle wire protocol on stdin/stdout with the builtin forest.
int Serve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
// Writes data.csv and schema.tsv of the synthetic benchmark.
int Synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace glocal::cli

#endif  // GLOCAL_TOOLS_COMMANDS_H_
