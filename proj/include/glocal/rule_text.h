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

// Line-oriented text form of rules:
//
//   rule     := [pred ("," pred)*] "->" name "=" label
//   pred     := name "=" value | name "in" "[" num "," num "]"
//             | name relop num | linterm ("+" linterm)* relop num
//   linterm  := num "*" name
//   relop    := "<=" | "<" | ">=" | ">"
//
// Categorical values may contain spaces; they end at "," or "->".

#ifndef GLOCAL_RULE_TEXT_H_
#define GLOCAL_RULE_TEXT_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "glocal/rule.h"
#include "glocal/schema.h"

namespace glocal {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at column " +
                           std::to_string(position + 1)),
        position_(position) {}

  // Zero-based offset into the parsed text.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

Rule ParseRule(std::string_view text, const FeatureSchema& schema);
Premise ParsePremise(std::string_view text, const FeatureSchema& schema);

std::string FormatPredicate(const Predicate& predicate,
                            const FeatureSchema& schema);
// Predicates joined by ", " in schema order; empty string for {}.
std::string FormatPremise(const Premise& premise, const FeatureSchema& schema);
std::string FormatRule(const Rule& rule, const FeatureSchema& schema);

}  // namespace glocal

#endif  // GLOCAL_RULE_TEXT_H_
