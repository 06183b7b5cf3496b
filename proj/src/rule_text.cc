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

#include "glocal/rule_text.h"

#include <cctype>
#include <optional>
#include <vector>

namespace glocal {
namespace {

constexpr std::string_view kArrow = "->";

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool IsNameChar(char c) {
  return !IsSpace(c) && c != '=' && c != '<' && c != '>' && c != ',' &&
         c != '[' && c != ']' && c != '*' && c != '+';
}

// A slice of the input text that remembers its absolute offset.
struct Span {
  std::string_view text;
  std::size_t offset = 0;

  Span Trimmed() const {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && IsSpace(text[b])) ++b;
    while (e > b && IsSpace(text[e - 1])) --e;
    return {text.substr(b, e - b), offset + b};
  }
  Span Sub(std::size_t pos, std::size_t len = std::string_view::npos) const {
    return {text.substr(pos, len), offset + pos};
  }
};

class SegmentParser {
 public:
  SegmentParser(Span span, const FeatureSchema& schema)
      : span_(span), schema_(schema) {}

  Predicate ParsePredicate() {
    SkipSpaces();
    if (LooksLinear()) return ParseLinear();
    const std::size_t name_pos = pos_;
    const std::string name = ReadName();
    const int feature = LookupFeature(name, name_pos);
    const Feature& f = schema_.feature(feature);
    SkipSpaces();
    if (auto rel = TryRelation()) {
      if (f.is_categorical()) {
        Fail("comparison on categorical feature '" + name + "'", name_pos);
      }
      const double v = ReadNumber();
      ExpectEnd();
      switch (*rel) {
        case Relation::kLe:
          return UpperBound(feature, v, true);
        case Relation::kLt:
          return UpperBound(feature, v, false);
        case Relation::kGe:
          return LowerBound(feature, v, true);
        case Relation::kGt:
          return LowerBound(feature, v, false);
      }
    }
    if (Peek() == '=') {
      ++pos_;
      if (!f.is_categorical()) {
        Fail("equality on continuous feature '" + name + "'", name_pos);
      }
      Span value = span_.Sub(pos_).Trimmed();
      if (value.text.empty()) Fail("missing categorical value", pos_);
      auto idx = f.CategoryIndex(value.text);
      if (!idx) {
        Fail("value '" + std::string(value.text) + "' not in domain of '" +
                 name + "'",
             value.offset - span_.offset);
      }
      pos_ = span_.text.size();
      return CategoricalEq{feature, *idx};
    }
    if (span_.text.substr(pos_, 2) == "in") {
      pos_ += 2;
      if (f.is_categorical()) {
        Fail("interval on categorical feature '" + name + "'", name_pos);
      }
      Expect('[');
      const double lo = ReadNumber();
      Expect(',');
      const double hi = ReadNumber();
      Expect(']');
      ExpectEnd();
      if (lo > hi) Fail("interval lower bound exceeds upper bound", name_pos);
      return ClosedInterval(feature, lo, hi);
    }
    Fail("malformed predicate", pos_);
  }

  // "name = label" consequent.
  Label ParseConsequent() {
    SkipSpaces();
    const std::size_t name_pos = pos_;
    const std::string name = ReadName();
    if (name != schema_.target_name()) {
      Fail("unknown target '" + name + "'", name_pos);
    }
    Expect('=');
    Span value = span_.Sub(pos_).Trimmed();
    auto label = schema_.ParseLabel(value.text);
    if (!label) {
      Fail("unknown class label '" + std::string(value.text) + "'",
           value.offset - span_.offset);
    }
    return *label;
  }

 private:
  [[noreturn]] void Fail(const std::string& message, std::size_t local_pos) {
    throw ParseError(message, span_.offset + local_pos);
  }

  char Peek() const {
    return pos_ < span_.text.size() ? span_.text[pos_] : '\0';
  }
  void SkipSpaces() {
    while (pos_ < span_.text.size() && IsSpace(span_.text[pos_])) ++pos_;
  }
  void Expect(char c) {
    SkipSpaces();
    if (Peek() != c) Fail(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }
  void ExpectEnd() {
    SkipSpaces();
    if (pos_ != span_.text.size()) Fail("unexpected trailing text", pos_);
  }

  std::string ReadName() {
    SkipSpaces();
    const std::size_t start = pos_;
    while (pos_ < span_.text.size() && IsNameChar(span_.text[pos_])) ++pos_;
    if (pos_ == start) Fail("expected a feature name", start);
    return std::string(span_.text.substr(start, pos_ - start));
  }

  double ReadNumber() {
    SkipSpaces();
    const std::size_t start = pos_;
    while (pos_ < span_.text.size()) {
      const char c = span_.text[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
          c == '-' || c == '+' || c == 'e' || c == 'E') {
        ++pos_;
      } else {
        break;
      }
    }
    auto v = ParseNumber(span_.text.substr(start, pos_ - start));
    if (!v) Fail("expected a number", start);
    return *v;
  }

  std::optional<Relation> TryRelation() {
    const std::string_view rest = span_.text.substr(pos_);
    if (rest.starts_with("<=")) return pos_ += 2, Relation::kLe;
    if (rest.starts_with(">=")) return pos_ += 2, Relation::kGe;
    if (rest.starts_with("<")) return pos_ += 1, Relation::kLt;
    if (rest.starts_with(">")) return pos_ += 1, Relation::kGt;
    return std::nullopt;
  }

  int LookupFeature(const std::string& name, std::size_t at) {
    auto idx = schema_.FeatureIndex(name);
    if (!idx) Fail("unknown feature '" + name + "'", at);
    return *idx;
  }

  bool LooksLinear() const {
    const std::size_t star = span_.text.find('*', pos_);
    if (star == std::string_view::npos) return false;
    return ParseNumber(Span{span_.text.substr(pos_, star - pos_), 0}
                           .Trimmed()
                           .text)
        .has_value();
  }

  Predicate ParseLinear() {
    std::vector<std::pair<int, double>> terms;
    const std::size_t start = pos_;
    while (true) {
      const double coef = ReadNumber();
      Expect('*');
      SkipSpaces();
      const std::size_t name_pos = pos_;
      const std::string name = ReadName();
      const int feature = LookupFeature(name, name_pos);
      if (schema_.feature(feature).is_categorical()) {
        Fail("linear term on categorical feature '" + name + "'", name_pos);
      }
      terms.emplace_back(feature, coef);
      SkipSpaces();
      if (Peek() == '+') {
        ++pos_;
        continue;
      }
      break;
    }
    auto rel = TryRelation();
    if (!rel) Fail("expected a comparison operator", pos_);
    const double threshold = ReadNumber();
    ExpectEnd();
    try {
      return MakeLinear(std::move(terms), *rel, threshold);
    } catch (const std::invalid_argument& e) {
      Fail(e.what(), start);
    }
  }

  Span span_;
  const FeatureSchema& schema_;
  std::size_t pos_ = 0;
};

// Splits on commas that are not inside "[...]".
std::vector<Span> SplitPredicates(Span premise) {
  std::vector<Span> out;
  std::size_t depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < premise.text.size(); ++i) {
    const char c = premise.text[i];
    if (c == '[') ++depth;
    if (c == ']' && depth > 0) --depth;
    if (c == ',' && depth == 0) {
      out.push_back(premise.Sub(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(premise.Sub(start));
  return out;
}

Premise ParsePremiseSpan(Span span, const FeatureSchema& schema) {
  Premise premise;
  if (span.Trimmed().text.empty()) return premise;
  for (const Span& seg : SplitPredicates(span)) {
    const Span trimmed = seg.Trimmed();
    if (trimmed.text.empty()) {
      throw ParseError("empty predicate", trimmed.offset);
    }
    Predicate p = SegmentParser(trimmed, schema).ParsePredicate();
    try {
      premise.Add(p);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), trimmed.offset);
    }
  }
  return premise;
}

const char* RelationText(Relation rel) {
  switch (rel) {
    case Relation::kLe:
      return "<=";
    case Relation::kLt:
      return "<";
    case Relation::kGe:
      return ">=";
    case Relation::kGt:
      return ">";
  }
  return "?";
}

}  // namespace

Premise ParsePremise(std::string_view text, const FeatureSchema& schema) {
  return ParsePremiseSpan(Span{text, 0}, schema);
}

Rule ParseRule(std::string_view text, const FeatureSchema& schema) {
  const std::size_t arrow = text.find(kArrow);
  if (arrow == std::string_view::npos) throw ParseError("missing '->'", 0);
  Rule rule;
  rule.premise = ParsePremiseSpan(Span{text.substr(0, arrow), 0}, schema);
  const Span rhs{text.substr(arrow + kArrow.size()), arrow + kArrow.size()};
  rule.consequent = SegmentParser(rhs, schema).ParseConsequent();
  return rule;
}

std::string FormatPredicate(const Predicate& predicate,
                            const FeatureSchema& schema) {
  if (const auto* c = std::get_if<CategoricalEq>(&predicate)) {
    const Feature& f = schema.feature(c->feature);
    return f.name + " = " + f.categories.at(c->category);
  }
  if (const auto* iv = std::get_if<NumericInterval>(&predicate)) {
    const std::string& name = schema.feature(iv->feature).name;
    const bool lo_finite = iv->lower != -kInf;
    const bool hi_finite = iv->upper != kInf;
    if (lo_finite && hi_finite && iv->lower_closed && iv->upper_closed) {
      return name + " in [" + FormatNumber(iv->lower) + ", " +
             FormatNumber(iv->upper) + "]";
    }
    std::string out;
    if (lo_finite) {
      out += name + (iv->lower_closed ? " >= " : " > ") +
             FormatNumber(iv->lower);
    }
    if (hi_finite) {
      if (!out.empty()) out += ", ";
      out += name + (iv->upper_closed ? " <= " : " < ") +
             FormatNumber(iv->upper);
    }
    return out;
  }
  const auto& lin = std::get<LinearConstraint>(predicate);
  std::string out;
  for (std::size_t i = 0; i < lin.terms.size(); ++i) {
    if (i > 0) out += " + ";
    out += FormatNumber(lin.terms[i].second) + "*" +
           schema.feature(lin.terms[i].first).name;
  }
  out += std::string(" ") + RelationText(lin.relation) + " " +
         FormatNumber(lin.threshold);
  return out;
}

std::string FormatPremise(const Premise& premise, const FeatureSchema& schema) {
  std::string out;
  for (const Predicate& p : premise.Predicates()) {
    if (!out.empty()) out += ", ";
    out += FormatPredicate(p, schema);
  }
  return out;
}

std::string FormatRule(const Rule& rule, const FeatureSchema& schema) {
  std::string premise = FormatPremise(rule.premise, schema);
  std::string out = premise.empty() ? "->" : premise + " ->";
  out += " " + schema.target_name() + " = " + schema.class_name(rule.consequent);
  return out;
}

}  // namespace glocal
