#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace coref;

namespace {

document letters(std::size_t n) {
  std::string text;
  for (std::size_t i = 0; i < n; ++i) text += "W" + std::to_string(i) + " ";
  support::doc_builder b("letters", text);
  if (!text.empty()) b.sentence(0, text.size());
  for (std::size_t i = 0; i < n; ++i) b.phrase("p" + std::to_string(i), "W" + std::to_string(i) + " ", "E" + std::to_string(i));
  return b.build();
}

// Every contiguous run of tokens of `name`, as normalized strings.
std::set<std::string> token_runs(const std::string& name) {
  auto toks = text::split_tokens(text::normalize_name(name));
  std::set<std::string> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string run;
    for (std::size_t j = i; j < toks.size(); ++j) {
      run += (j == i ? "" : " ") + toks[j];
      out.insert(run);
    }
  }
  return out;
}

} // namespace

TEST(GeneratePairs, CountsAndOrder) {
  EXPECT_EQ(generate_pairs(letters(5)).size(), 10u);
  EXPECT_TRUE(generate_pairs(letters(1)).empty());
  EXPECT_TRUE(generate_pairs(letters(0)).empty());
  for (std::size_t n = 0; n < 9; ++n) EXPECT_EQ(generate_pairs(letters(n)).size(), n * (n - (n > 0)) / 2);
  auto pairs = generate_pairs(letters(3));
  EXPECT_EQ(pairs[0], (phrase_pair{"letters", "p0", "p1"}));
  EXPECT_EQ(pairs[1], (phrase_pair{"letters", "p0", "p2"}));
  EXPECT_EQ(pairs[2], (phrase_pair{"letters", "p1", "p2"}));
}

TEST(GeneratePairs, NestedSpansOrderedByEnd) {
  support::doc_builder b("n", "SUMITOMO CORP. SAID");
  b.sentence(0, 19);
  b.phrase("long", "SUMITOMO CORP.", "E1");
  b.phrase("short", "SUMITOMO", "E1");
  auto pairs = generate_pairs(b.build());
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].first, "short");
  EXPECT_EQ(pairs[0].second, "long");
}

TEST(LabelPair, ChainMembership) {
  auto key = chain_partition::from_keys<int>({"A", "B", "C", "D"}, {1, 1, 1, 2});
  EXPECT_EQ(label_pair({"d", "A", "B"}, key), label::positive);
  EXPECT_EQ(label_pair({"d", "A", "D"}, key), label::negative);
  EXPECT_THROW(label_pair({"d", "A", "Z"}, key), data_error);
}

TEST(LabelPair, PositivesMatchChainSizes) {
  // Chains of sizes 3 and 2: 4 positives of 10 pairs.
  support::doc_builder b("c", "A1 A2 A3 B1 B2");
  b.sentence(0, 14);
  for (auto [id, e] : std::vector<std::pair<std::string, std::string>>{
           {"A1", "E1"}, {"A2", "E1"}, {"A3", "E1"}, {"B1", "E2"}, {"B2", "E2"}})
    b.phrase(id, id, e);
  auto inst = document_instances(b.build());
  EXPECT_EQ(inst.size(), 10u);
  EXPECT_EQ(std::count_if(inst.begin(), inst.end(), [](const instance& i) { return i.lbl == label::positive; }), 4);
}

TEST(LabelPair, PositivesIdentityOnGeneratedCorpus) {
  auto docs = generate_corpus(generator_params{}, 9);
  for (const auto& d : docs) {
    std::size_t expected = 0;
    auto key = key_chains(d);
    for (const auto& c : key.chains()) expected += c.size() * (c.size() - 1) / 2;
    auto inst = document_instances(d);
    auto pos = std::count_if(inst.begin(), inst.end(), [](const instance& i) { return i.lbl == label::positive; });
    EXPECT_EQ(static_cast<std::size_t>(pos), expected) << d.doc_id;
  }
}

TEST(AliasTest, Examples) {
  EXPECT_EQ(alias_test("SUMITOMO", "SUMITOMO CORP."), feature_value::yes);
  EXPECT_EQ(alias_test("SUMITOMO CORP.", "SUMITOMO"), feature_value::yes);
  EXPECT_EQ(alias_test("TOYOTA MOTOR CORP.", "TOYOTA MOTOR CORP."), feature_value::yes);
  EXPECT_EQ(alias_test("SUMI", "SUMITOMO CORP."), feature_value::no);
  EXPECT_EQ(alias_test("sumitomo  corp", "SUMITOMO CORP."), feature_value::yes);
  EXPECT_EQ(alias_test("MOTOR", "TOYOTA MOTOR CORP."), feature_value::yes);
  EXPECT_EQ(alias_test("TOYOTA CORP", "TOYOTA MOTOR CORP."), feature_value::no);
}

TEST(AliasTest, AgreesWithTokenRunEnumeration) {
  std::vector<std::string> names{"SUMITOMO CORP.", "SUMITOMO", "SUMI", "CORP", "MITSUI & CO.", "MITSUI",
                                 "CO", "NIPPON STEEL CORP", "STEEL", "NIPPON STEEL", "STEEL CORP."};
  for (const auto& a : names)
    for (const auto& b : names) {
      bool oracle = token_runs(a).count(text::normalize_name(b)) || token_runs(b).count(text::normalize_name(a));
      EXPECT_EQ(is_alias(a, b), oracle) << a << " / " << b;
    }
  EXPECT_FALSE(token_runs("SUMITOMO CORP.").count("SUMI"));
}

TEST(ExtractFeatures, FamilymartPair) {
  auto d = support::familymart_document();
  auto f = extract_features(d.phrase("p1"), d.phrase("p4"));
  const auto& expected = support::familymart_expected_features();
  for (std::size_t i = 0; i < feature_count; ++i) EXPECT_EQ(f.at(i), expected[i]) << feature_specs[i].name;
  EXPECT_EQ(make_instance({d.doc_id, "p1", "p4"}, d, nullptr).lbl, label::unlabeled);
  auto key = key_chains(d);
  EXPECT_EQ(make_instance({d.doc_id, "p1", "p4"}, d, &key).lbl, label::negative);
}

TEST(ExtractFeatures, IdenticalAnnotationsInOneSentence) {
  support::doc_builder b("twin", "TOYOTA AND TOYOTA");
  b.sentence(0, 17);
  b.phrase("a", "TOYOTA", "E1").slots.name = "TOYOTA";
  b.phrase("b", "TOYOTA", "E1", 1).slots.name = "TOYOTA";
  auto d = b.build();
  auto f = extract_features(d.phrase("a"), d.phrase("b"));
  EXPECT_EQ(f[feature::alias], feature_value::yes);
  EXPECT_EQ(f[feature::common_np], feature_value::yes);
  EXPECT_EQ(f[feature::same_sentence], feature_value::yes);
}

TEST(ExtractFeatures, EmptyRelationshipsAreUnknown) {
  support::doc_builder b("u", "ALPHA BETA");
  b.sentence(0, 10);
  b.phrase("a", "ALPHA", "E1");
  b.phrase("b", "BETA", "E2");
  auto d = b.build();
  auto f = extract_features(d.phrase("a"), d.phrase("b"));
  EXPECT_EQ(f[feature::jv_child_1], feature_value::unknown);
  EXPECT_EQ(f[feature::jv_child_2], feature_value::unknown);
  EXPECT_EQ(f[feature::both_jv_child], feature_value::unknown);
  EXPECT_EQ(f[feature::name_1], feature_value::no);
  EXPECT_EQ(f[feature::alias], feature_value::no);
}

TEST(ExtractFeatures, CommonNounPhraseUsesConstituents) {
  support::doc_builder b("np", "A NEW COMPANY, THE VENTURE. THE VENTURE WILL");
  b.sentence(0, 27).sentence(28, 44);
  b.phrase("a", "A NEW COMPANY, THE VENTURE", "E1").constituents = {"A NEW COMPANY", "THE VENTURE"};
  b.phrase("b", "THE VENTURE", "E1", 1);
  auto d = b.build();
  EXPECT_EQ(extract_features(d.phrase("a"), d.phrase("b"))[feature::common_np], feature_value::yes);
  EXPECT_EQ(extract_features(d.phrase("a"), d.phrase("b"))[feature::same_sentence], feature_value::no);
}

TEST(ExtractFeatures, BothJvChildIsFunctionOfParts) {
  using enum feature_value;
  EXPECT_EQ(both_jv_child(yes, yes), yes);
  EXPECT_EQ(both_jv_child(no, no), no);
  EXPECT_EQ(both_jv_child(yes, no), unknown);
  EXPECT_EQ(both_jv_child(no, unknown), unknown);
  EXPECT_EQ(both_jv_child(unknown, unknown), unknown);
}

TEST(ExtractFeatures, SwapSymmetry) {
  auto docs = generate_corpus(generator_params{}, 21);
  for (const auto& d : docs)
    for (const auto& p : generate_pairs(d)) {
      const auto& a = d.phrase(p.first);
      const auto& b = d.phrase(p.second);
      auto f = extract_features(a, b);
      auto g = extract_features(b, a);
      EXPECT_EQ(f[feature::name_1], g[feature::name_2]);
      EXPECT_EQ(f[feature::name_2], g[feature::name_1]);
      EXPECT_EQ(f[feature::jv_child_1], g[feature::jv_child_2]);
      EXPECT_EQ(f[feature::jv_child_2], g[feature::jv_child_1]);
      for (auto k : {feature::alias, feature::both_jv_child, feature::common_np, feature::same_sentence})
        EXPECT_EQ(f[k], g[k]);
      EXPECT_TRUE(f.in_domain());
      EXPECT_EQ(f, extract_features(a, b));
    }
}

TEST(InstanceIo, RoundTrip) {
  auto inst = corpus_instances(generate_corpus(generator_params{}, 4));
  std::stringstream ss;
  write_instances(ss, inst);
  EXPECT_EQ(read_instances(ss), inst);
}

TEST(InstanceIo, RejectsMalformedRows) {
  auto header = instance_header() + "\n";
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_instances(in);
  };
  EXPECT_THROW(parse(""), parse_error);
  EXPECT_THROW(parse("doc\tfirst\n"), parse_error);
  EXPECT_THROW(parse(header + "d\ta\tb\tYES\n"), parse_error);
  EXPECT_THROW(parse(header + "d\ta\tb\tUNKNOWN\tNO\tNO\tNO\tNO\tNO\tNO\tNO\tPOSITIVE\n"), parse_error);
  EXPECT_THROW(parse(header + "d\ta\tb\tNO\tNO\tNO\tNO\tNO\tNO\tNO\tNO\tMAYBE\n"), parse_error);
  EXPECT_EQ(parse(header + "d\ta\tb\tNO\tUNKNOWN\tNO\tNO\tNO\tNO\tNO\tNO\tPOSITIVE\n").size(), 1u);
}

TEST(Features, NamesRoundTrip) {
  for (std::size_t i = 0; i < feature_count; ++i) {
    auto f = static_cast<feature>(i);
    EXPECT_EQ(parse_feature_name(feature_name(f)), f);
  }
  EXPECT_EQ(feature_name(feature::same_sentence), "SAME-SENTENCE");
  EXPECT_EQ(feature_domain(feature::alias).size(), 2u);
  EXPECT_EQ(feature_domain(feature::jv_child_1).size(), 3u);
}
