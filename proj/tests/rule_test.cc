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

#include "glocal/rule.h"

#include <cmath>
#include <random>

#include "glocal/measures.h"
#include "glocal/rule_text.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace glocal {
namespace {

FeatureSchema CreditSchema() {
  return FeatureSchema(
      {{"credit_amount", FeatureKind::kContinuous, {}, 0, 20000},
       {"housing", FeatureKind::kCategorical, {"own", "rent", "free"}},
       {"other_debtors", FeatureKind::kCategorical, {"none", "guarantor"}},
       {"credit_history",
        FeatureKind::kCategorical,
        {"critical account", "all paid"}},
       {"duration_in_month", FeatureKind::kContinuous, {}, 0, 72}},
      "decision", {"0", "1"});
}

FeatureSchema BalanceSchema() {
  return FeatureSchema(
      {{"CreditBalance", FeatureKind::kContinuous, {}, 0, 1000},
       {"SavingBalance", FeatureKind::kContinuous, {}, 0, 1000},
       {"CheckingBalance", FeatureKind::kContinuous, {}, 0, 1000}},
      "Credit", {"no-equivalent-label", "yes"});
}

TEST(Covers, EmptyPremiseCoversEverything) {
  EXPECT_TRUE(Covers(Premise{}, Record({0.3})));
  EXPECT_TRUE(Covers(Premise{}, Record()));
}

TEST(Covers, CreditExample) {
  const FeatureSchema s = CreditSchema();
  const Premise p = ParsePremise(
      "credit_amount <= 836, housing = own, other_debtors = none, "
      "credit_history = critical account",
      s);
  EXPECT_TRUE(Covers(p, ParseRecord(s, {"500", "own", "none",
                                        "critical account", "12"})));
  EXPECT_FALSE(Covers(p, ParseRecord(s, {"900", "own", "none",
                                         "critical account", "12"})));
}

TEST(Covers, LinearConstraint) {
  const Premise p = {MakeLinear({{0, 1.0}, {1, 1.0}}, Relation::kLt, 200)};
  EXPECT_FALSE(Covers(p, Record({150, 100, 0})));
  EXPECT_TRUE(Covers(p, Record({150, 49, 0})));
  // Strict comparison, no slack.
  EXPECT_FALSE(Covers(p, Record({150, 50, 0})));
}

TEST(Covers, FeatureOutsideRecordIsSchemaError) {
  const Premise p = {UpperBound(3, 1.0)};
  EXPECT_THROW(Covers(p, Record({0.1, 0.2})), SchemaError);
}

TEST(Premise, IntervalsIntersectAndConflictsThrow) {
  Premise p;
  p.Add(UpperBound(0, 0.8));
  p.Add(LowerBound(0, 0.2));
  p.Add(UpperBound(0, 0.5, false));
  ASSERT_EQ(p.intervals().size(), 1u);
  const NumericInterval& i = p.intervals().front();
  EXPECT_EQ(i.lower, 0.2);
  EXPECT_FALSE(i.lower_closed);
  EXPECT_EQ(i.upper, 0.5);
  EXPECT_FALSE(i.upper_closed);
  EXPECT_THROW(p.Add(LowerBound(0, 0.6)), std::invalid_argument);
  Premise q = {CategoricalEq{1, 0}};
  EXPECT_THROW(q.Add(CategoricalEq{1, 2}), std::invalid_argument);
}

// 10 records: the premise covers 4, of which 3 carry the consequent; 5 of
// 10 records carry it overall.
LabeledDataset MeasureFixture() {
  LabeledDataset d;
  d.schema = testing::OneFeatureSchema();
  for (int i = 0; i < 10; ++i) d.records.push_back(Record({i / 10.0}));
  d.labels = {1, 1, 1, 0, 1, 1, 0, 0, 0, 0};
  return d;
}

TEST(Measure, CountingExample) {
  const Rule r{{UpperBound(0, 0.3)}, 1};
  const RuleMeasures m = Measure(r, MeasureFixture());
  EXPECT_DOUBLE_EQ(m.support, 0.3);
  EXPECT_DOUBLE_EQ(m.coverage, 0.4);
  EXPECT_DOUBLE_EQ(*m.confidence, 0.75);
  EXPECT_DOUBLE_EQ(*m.lift, 1.5);
}

TEST(Measure, UndefinedIsNotZero) {
  const Rule r{{LowerBound(0, 5.0)}, 1};
  const RuleMeasures m = Measure(r, MeasureFixture());
  EXPECT_EQ(m.coverage, 0.0);
  EXPECT_FALSE(m.confidence.has_value());
  EXPECT_FALSE(m.lift.has_value());
  EXPECT_FALSE(m.mi_score.has_value());
  EXPECT_EQ(m.p_value, 1.0);
  LabeledDataset empty;
  empty.schema = testing::OneFeatureSchema();
  EXPECT_THROW(Measure(r, empty), std::invalid_argument);
}

TEST(Measure, PerfectAssociationHasUnitMi) {
  const ContingencyTable t{30, 0, 0, 70};
  EXPECT_DOUBLE_EQ(*Measure(t).mi_score, 1.0);
}

TEST(Measure, IndependenceHasUnitLiftAndZeroMi) {
  const ContingencyTable t{20, 20, 20, 20};
  const RuleMeasures m = Measure(t);
  EXPECT_DOUBLE_EQ(*m.lift, 1.0);
  EXPECT_EQ(*m.mi_score, 0.0);
}

// Chi-square survival function for one degree of freedom by Simpson
// integration of the density, independent of the erfc closed form.
double ChiSquareSfBySimpson(double x) {
  // sf(x) = 1 - 2 * Phi_0(sqrt(x)) with Phi_0 the integral of the normal pdf
  // from 0; integrate the normal density on [0, sqrt(x)].
  const double b = std::sqrt(x);
  const int n = 20000;
  const double h = b / n;
  auto f = [](double t) { return std::exp(-t * t / 2) / std::sqrt(2 * M_PI); };
  double s = f(0) + f(b);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 == 1 ? 4 : 2);
  return 1.0 - 2.0 * s * h / 3.0;
}

TEST(SignificanceTest, PerfectAssociation) {
  const ContingencyTable t{50, 0, 0, 50};
  EXPECT_DOUBLE_EQ(ChiSquareStatistic(t), 100.0);
  EXPECT_LT(ChiSquarePValue(t), 1e-3);
}

TEST(SignificanceTest, ExactIndependence) {
  EXPECT_NEAR(ChiSquarePValue({25, 25, 25, 25}), 1.0, 1e-9);
}

TEST(SignificanceTest, YatesCorrectedSmallTable) {
  const ContingencyTable t{3, 1, 1, 3};
  // Expected counts are all 2: each |O - E| = 1 shrinks to 0.5 under the
  // correction, giving 4 * 0.25 / 2.
  EXPECT_DOUBLE_EQ(ChiSquareStatistic(t), 0.5);
  EXPECT_NEAR(ChiSquarePValue(t), ChiSquareSfBySimpson(0.5), 1e-10);
  // Frozen value (chi-square sf at 0.5, one degree of freedom).
  EXPECT_NEAR(ChiSquarePValue(t), 0.4795001221869535, 1e-15);
}

TEST(SignificanceTest, ZeroMarginalGivesOne) {
  EXPECT_EQ(ChiSquarePValue({10, 5, 0, 0}), 1.0);
  EXPECT_EQ(ChiSquarePValue({10, 0, 5, 0}), 1.0);
}

TEST(MeasureProperties, IdentitiesOnRandomRules) {
  std::mt19937_64 rng(11);
  const FeatureSchema s = testing::MixedSchema();
  for (int trial = 0; trial < 300; ++trial) {
    const LabeledDataset d = testing::RandomDataset(s, 1 + rng() % 60, rng);
    const Rule r = testing::RandomRule(s, rng, true);
    const RuleMeasures m = Measure(r, d);
    EXPECT_LE(0.0, m.support);
    EXPECT_LE(m.support, m.coverage);
    EXPECT_LE(m.coverage, 1.0);
    if (m.confidence) EXPECT_NEAR(*m.confidence * m.coverage, m.support, 1e-12);
    if (m.mi_score) {
      EXPECT_GE(*m.mi_score, 0.0);
      EXPECT_LE(*m.mi_score, 1.0);
    }
    EXPECT_GE(m.p_value, 0.0);
    EXPECT_LE(m.p_value, 1.0);
  }
}

TEST(MeasureProperties, MiVanishesOnProductTables) {
  for (std::int64_t a = 1; a <= 6; ++a) {
    for (std::int64_t b = 1; b <= 6; ++b) {
      for (std::int64_t k = 1; k <= 3; ++k) {
        // Rows (a, b) scaled by k: a product distribution.
        const ContingencyTable product{a, b, k * a, k * b};
        EXPECT_NEAR(*MutualInformationScore(product), 0.0, 1e-12);
        const ContingencyTable skewed{a + 1, b, k * a, k * b};
        EXPECT_GT(*MutualInformationScore(skewed), 1e-6);
      }
    }
  }
}

TEST(CoverProperties, WeakeningNeverShrinksCover) {
  std::mt19937_64 rng(12);
  const FeatureSchema s = testing::MixedSchema();
  for (int trial = 0; trial < 200; ++trial) {
    const Premise p = testing::RandomPremise(s, rng, true);
    for (std::size_t f = 0; f < s.size(); ++f) {
      Premise weaker = p;
      weaker.Erase(static_cast<int>(f));
      for (int k = 0; k < 30; ++k) {
        const Record x = testing::RandomRecord(s, rng);
        if (Covers(p, x)) EXPECT_TRUE(Covers(weaker, x));
      }
    }
  }
}

TEST(CoverProperties, IntervalIntersectionIsCoverIntersection) {
  std::mt19937_64 rng(13);
  const FeatureSchema s = testing::MixedSchema();
  int checked = 0;
  while (checked < 300) {
    const Premise a = testing::RandomPremise(s, rng);
    const Premise b = testing::RandomPremise(s, rng);
    Premise both = a;
    try {
      for (const Predicate& p : b.Predicates()) both.Add(p);
    } catch (const std::invalid_argument&) {
      // Empty intersection; the covers must then be disjoint.
      for (int k = 0; k < 50; ++k) {
        const Record x = testing::RandomRecord(s, rng);
        EXPECT_FALSE(Covers(a, x) && Covers(b, x));
      }
      continue;
    }
    for (int k = 0; k < 50; ++k) {
      const Record x = testing::RandomRecord(s, rng);
      EXPECT_EQ(Covers(both, x), Covers(a, x) && Covers(b, x));
    }
    ++checked;
  }
}

// ---------------------------------------------------------------------------
// Rule text.

TEST(RuleText, AnchorRuleRoundTrips) {
  const FeatureSchema s = CreditSchema();
  const std::string text =
      "credit_history = critical account, duration_in_month in [0, 18] -> "
      "decision = 0";
  const Rule r = ParseRule(text, s);
  EXPECT_EQ(FormatRule(r, s), text);
  EXPECT_EQ(ParseRule(FormatRule(r, s), s), r);
  ASSERT_EQ(r.premise.intervals().size(), 1u);
  EXPECT_TRUE(r.premise.intervals()[0].lower_closed);
  EXPECT_TRUE(r.premise.intervals()[0].upper_closed);
}

TEST(RuleText, EmptyPremise) {
  const FeatureSchema s = CreditSchema();
  const Rule r = ParseRule("-> decision = 1", s);
  EXPECT_TRUE(r.premise.empty());
  EXPECT_EQ(r.consequent, 1);
  EXPECT_EQ(FormatRule(r, s), "-> decision = 1");
}

TEST(RuleText, LinearRuleRoundTrips) {
  const FeatureSchema s = BalanceSchema();
  const std::string text =
      "1*CreditBalance + 1*SavingBalance < 200 -> Credit = no-equivalent-label";
  const Rule r = ParseRule(text, s);
  EXPECT_EQ(FormatRule(r, s), text);
  EXPECT_EQ(r.consequent, 0);
  ASSERT_EQ(r.premise.linear().size(), 1u);
  EXPECT_EQ(r.premise.linear()[0].relation, Relation::kLt);
}

TEST(RuleText, SchemaOrderAndWhitespace) {
  const FeatureSchema s = CreditSchema();
  const Rule r = ParseRule(
      "  housing=own ,credit_amount>  100,credit_amount <=836->decision=1", s);
  EXPECT_EQ(FormatRule(r, s),
            "credit_amount > 100, credit_amount <= 836, housing = own -> "
            "decision = 1");
}

TEST(RuleText, ErrorsCarryPositions) {
  const FeatureSchema s = CreditSchema();
  try {
    ParseRule("credit_amount <= 8, salary <= 3 -> decision = 1", s);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 20u);
  }
  EXPECT_THROW(ParseRule("housing = castle -> decision = 1", s), ParseError);
  EXPECT_THROW(ParseRule("credit_amount <= abc -> decision = 1", s), ParseError);
  EXPECT_THROW(ParseRule("credit_amount <= 5", s), ParseError);
  EXPECT_THROW(ParseRule("-> decision = 7", s), ParseError);
  EXPECT_THROW(ParseRule("-> outcome = 1", s), ParseError);
  EXPECT_THROW(ParseRule("duration_in_month in [5, 1] -> decision = 1", s),
               ParseError);
}

TEST(RuleTextProperties, RandomRulesRoundTrip) {
  std::mt19937_64 rng(14);
  const FeatureSchema s = testing::MixedSchema();
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 2000; ++trial) {
    Rule r = testing::RandomRule(s, rng, true);
    // Arbitrary doubles as well as grid values.
    if (trial % 2 == 0) {
      try {
        r.premise.Add(UpperBound(2, u(rng), rng() % 2 == 0));
      } catch (const std::invalid_argument&) {
      }
    }
    const std::string text = FormatRule(r, s);
    EXPECT_EQ(ParseRule(text, s), r) << text;
  }
}

}  // namespace
}  // namespace glocal
