#include <gtest/gtest.h>

#include "support.hpp"

using namespace coref;

namespace {

struct pair_fixture {
  document doc;
  const phrase_annotation& a() const { return doc.phrases[0]; }
  const phrase_annotation& b() const { return doc.phrases[1]; }
  rule_decision decide() const { return classify_rules(a(), b()); }
};

pair_fixture two_phrases(const std::string& s1, const std::string& s2) {
  support::doc_builder bld("r", s1 + " AND " + s2);
  bld.sentence(0, s1.size() + 5 + s2.size());
  bld.phrase("a", s1, "E1");
  bld.phrase("b", s2, "E2");
  auto doc = bld.build();
  auto& b = doc.phrases[0].id == "b" ? doc.phrases[0] : doc.phrases[1];
  b.span = {s1.size() + 5, s1.size() + 5 + s2.size()};
  if (doc.phrases[0].id == "b") std::swap(doc.phrases[0], doc.phrases[1]);
  return {doc};
}

} // namespace

TEST(Rules, BothJointVenturesCoreferentViaR4) {
  auto f = two_phrases("THE VENTURE", "THE NEW FIRM");
  f.doc.phrases[0].slots.relationships = {relationship::jv_child};
  f.doc.phrases[1].slots.relationships = {relationship::jv_child};
  auto d = f.decide();
  EXPECT_TRUE(d.coreferent);
  EXPECT_EQ(d.fired_rule, 4);
  EXPECT_EQ(d.trace.size(), 4u);
}

TEST(Rules, SameNameCoreferentViaR5) {
  auto f = two_phrases("FAMILYMART CO.", "FAMILYMART CO");
  f.doc.phrases[0].slots.name = "FAMILYMART CO.";
  f.doc.phrases[1].slots.name = "FAMILYMART CO.";
  f.doc.phrases[1].constituents = {"THE STORE CHAIN"};
  auto d = f.decide();
  EXPECT_TRUE(d.coreferent);
  EXPECT_EQ(d.fired_rule, 5);
}

TEST(Rules, FamilymartPairNotCoreferentViaR8) {
  auto doc = support::familymart_document();
  auto d = classify_rules({doc.doc_id, "p1", "p4"}, doc);
  EXPECT_FALSE(d.coreferent);
  EXPECT_EQ(d.fired_rule, 8);
}

TEST(Rules, AliasCoreferentViaR6) {
  auto f = two_phrases("SUMITOMO CORP.", "SUMITOMO");
  f.doc.phrases[0].slots.name = "SUMITOMO CORP.";
  f.doc.phrases[1].slots.name = "SUMITOMO";
  EXPECT_EQ(f.decide().fired_rule, 6);
}

TEST(Rules, OneJointVentureNotCoreferentViaR7) {
  auto f = two_phrases("THE VENTURE", "THE PARENT");
  f.doc.phrases[0].slots.relationships = {relationship::jv_child};
  f.doc.phrases[1].slots.relationships = {relationship::jv_parent};
  auto d = f.decide();
  EXPECT_FALSE(d.coreferent);
  EXPECT_EQ(d.fired_rule, 7);
}

TEST(Rules, CommonPhraseViaR3ShortCircuits) {
  auto f = two_phrases("THE VENTURE", "THE VENTURE");
  auto d = f.decide();
  EXPECT_TRUE(d.coreferent);
  EXPECT_EQ(d.fired_rule, 3);
  ASSERT_EQ(d.trace.size(), 3u);
  EXPECT_FALSE(d.trace[0].antecedent);
  EXPECT_TRUE(d.trace[2].antecedent);
  auto full = rule_trace({"r", "a", "b"}, f.doc);
  EXPECT_EQ(full.antecedents.size(), 8u);
  EXPECT_EQ(full.decision, d);
}

TEST(Rules, DiscourseRulesFireOnlyWhenAnnotated) {
  auto f = two_phrases("THE VENTURE", "THE VENTURE");
  f.doc.phrases[0].discourse = discourse_info{"t1", std::nullopt};
  EXPECT_EQ(f.decide().fired_rule, 3);
  f.doc.phrases[1].discourse = discourse_info{"t1", std::nullopt};
  EXPECT_EQ(f.decide().fired_rule, 1);
  EXPECT_FALSE(f.decide().coreferent);

  auto g = two_phrases("THE VENTURE", "THE VENTURE");
  g.doc.phrases[0].discourse = discourse_info{std::nullopt, "P1"};
  g.doc.phrases[1].discourse = discourse_info{std::nullopt, "P1"};
  EXPECT_EQ(g.decide().fired_rule, 3);
  g.doc.phrases[1].discourse = discourse_info{std::nullopt, "P2"};
  EXPECT_EQ(g.decide().fired_rule, 2);
}

TEST(Rules, NoRuleFiresDefaultsNegative) {
  auto f = two_phrases("ALPHA", "BETA");
  auto d = f.decide();
  EXPECT_FALSE(d.coreferent);
  EXPECT_FALSE(d.fired_rule.has_value());
  EXPECT_EQ(d.trace.size(), 8u);
  auto full = rule_trace({"r", "a", "b"}, f.doc);
  for (bool x : full.antecedents) EXPECT_FALSE(x);
  EXPECT_NE(format_rule_trace(full).find("decision NOT_COREFERENT"), std::string::npos);
}

TEST(Rules, FirstMatchWins) {
  // Antecedents of R4 and R8 both hold; R4 decides.
  auto f = two_phrases("ALPHA JV", "BETA JV");
  f.doc.phrases[0].slots.name = "ALPHA JV";
  f.doc.phrases[1].slots.name = "BETA JV";
  f.doc.phrases[0].slots.relationships = {relationship::jv_child};
  f.doc.phrases[1].slots.relationships = {relationship::jv_child};
  auto full = rule_trace({"r", "a", "b"}, f.doc);
  EXPECT_TRUE(full.antecedents[3]);
  EXPECT_TRUE(full.antecedents[7]);
  EXPECT_EQ(full.decision.fired_rule, 4);
  EXPECT_TRUE(full.decision.coreferent);
}

TEST(Rules, DeterministicAndConsistentOverGeneratedCorpus) {
  auto params = generator_params{};
  params.trigger_family_rate = 0.4;
  for (const auto& d : generate_corpus(params, 13))
    for (const auto& p : generate_pairs(d)) {
      auto x = classify_rules(p, d);
      EXPECT_EQ(x, classify_rules(p, d));
      auto full = rule_trace(p, d);
      if (x.fired_rule) {
        EXPECT_EQ(x.trace.size(), static_cast<std::size_t>(*x.fired_rule));
        EXPECT_TRUE(full.antecedents[*x.fired_rule - 1]);
        for (int r = 0; r + 1 < *x.fired_rule; ++r) EXPECT_FALSE(full.antecedents[r]);
        EXPECT_EQ(x.coreferent, rule_table[*x.fired_rule - 1].coreferent);
      } else {
        EXPECT_FALSE(x.coreferent);
      }
    }
}
