#include <gtest/gtest.h>

#include "support.hpp"

using namespace coref;

namespace {

chain_partition abc_d() { return chain_partition::from_keys<int>({"A", "B", "C", "D"}, {1, 1, 1, 2}); }

score_report counts_report(std::size_t kr, std::size_t k, std::size_t rc, std::size_t r) {
  score_report s;
  s.counts = {k, r, kr, rc};
  finish_ratios(s);
  fill_f_measures(s, default_betas());
  return s;
}

} // namespace

TEST(FMeasure, PublishedValues) {
  EXPECT_NEAR(f_measure(0.854, 0.876, 1.0), 0.865, 0.0015);
  EXPECT_NEAR(f_measure(0.677, 0.944, 2.0), 0.718, 0.0015);
  EXPECT_EQ(f_measure(0.0, 0.0, 1.0), 0.0);
  EXPECT_THROW(f_measure(0.5, 0.5, 0.0), data_error);
  EXPECT_THROW(f_measure(0.5, 0.5, -1.0), data_error);
}

TEST(FMeasure, FixedPointAndSymmetry) {
  seeded_rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    double r = 0.01 + 0.99 * rng.unit(), p = 0.01 + 0.99 * rng.unit(), b = 0.1 + 4 * rng.unit();
    EXPECT_NEAR(f_measure(r, r, b), r, 1e-12);
    EXPECT_NEAR(f_measure(r, p, b), f_measure(p, r, 1.0 / b), 1e-12);
    double f1 = f_measure(r, p, 1.0);
    EXPECT_LE(std::min(r, p), f1 + 1e-12);
    EXPECT_GE(std::max(r, p), f1 - 1e-12);
    double dr = std::min(1.0, r + 0.01) - r;
    if (dr > 0) EXPECT_GT(f_measure(r + dr, p, b), f_measure(r, p, b));
    double dp = std::min(1.0, p + 0.01) - p;
    if (dp > 0) EXPECT_GT(f_measure(r, p + dp, b), f_measure(r, p, b));
  }
}

TEST(RecallPrecisionItems, WorkedExample) {
  auto [r, p] = recall_precision_items<std::string>({"A", "B", "C", "D"}, {"A", "B", "C", "E", "F"});
  EXPECT_DOUBLE_EQ(r, 0.75);
  EXPECT_DOUBLE_EQ(p, 0.60);
  auto [r2, p2] = recall_precision_items<int>({1, 2}, {1, 2});
  EXPECT_EQ(r2, 1.0);
  EXPECT_EQ(p2, 1.0);
  auto [r3, p3] = recall_precision_items<int>({1, 2}, {3});
  EXPECT_EQ(r3, 0.0);
  EXPECT_EQ(p3, 0.0);
}

TEST(ScoreDocument, HalfRecallFromOneLink) {
  auto s = score_document(abc_d(), {{"A", "B"}}, link_strategy::consecutive);
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_EQ(s.counts, (link_counts{2, 1, 1, 1}));
}

TEST(ScoreDocument, ClosureCreditsImplicitLinks) {
  // (A,C) alone does not recover either consecutive key link; (A,B)+(A,C)
  // recovers (B,C) through the response closure.
  auto s = score_document(abc_d(), {{"A", "C"}}, link_strategy::consecutive);
  EXPECT_DOUBLE_EQ(s.recall, 0.0);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  auto t = score_document(abc_d(), {{"A", "B"}, {"A", "C"}}, link_strategy::consecutive);
  EXPECT_DOUBLE_EQ(t.recall, 1.0);
}

TEST(ScoreDocument, PerfectAndVacuous) {
  auto key = abc_d();
  for (auto st : {link_strategy::consecutive, link_strategy::all_pairs}) {
    auto s = score_document(key, explicit_links(key, link_strategy::all_pairs), st);
    EXPECT_EQ(s.recall, 1.0);
    EXPECT_EQ(s.precision, 1.0);
    auto t = score_document(key, explicit_links(key, st), st);
    EXPECT_EQ(t.recall, 1.0);
    EXPECT_EQ(t.precision, 1.0);
  }
  auto singles = chain_partition::from_keys<int>({"A", "B"}, {1, 2});
  auto v = score_document(singles, {}, link_strategy::consecutive);
  EXPECT_TRUE(v.vacuous_recall);
  EXPECT_TRUE(v.vacuous_precision);
  EXPECT_EQ(v.recall, 1.0);
  EXPECT_EQ(v.precision, 1.0);
}

TEST(ScoreDocument, RejectsForeignEndpoints) {
  EXPECT_THROW(score_document(abc_d(), {{"A", "Z"}}, link_strategy::consecutive), data_error);
}

TEST(ScoreDocument, WithinChainLinkMonotonicity) {
  seeded_rng rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + rng.below(9);
    auto key = support::random_partition(rng, n);
    auto resp = support::random_links(rng, n, 0.25 * rng.unit());
    auto base = score_document(key, resp, link_strategy::consecutive);
    for (const auto& l : explicit_links(key, link_strategy::all_pairs)) {
      if (resp.count(l)) continue;
      auto more = resp;
      more.insert(l);
      auto s = score_document(key, more, link_strategy::consecutive);
      EXPECT_EQ(s.counts.response_links_correct, base.counts.response_links_correct + 1);
      EXPECT_EQ(s.counts.response_links, base.counts.response_links + 1);
      EXPECT_GE(s.recall, base.recall);
    }
  }
}

TEST(ScoreDocument, CrossChainLinkMonotonicity) {
  // Recall can only stay or rise and precision can only stay or fall.
  seeded_rng rng(43);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + rng.below(9);
    auto key = support::random_partition(rng, n);
    auto resp = support::random_links(rng, n, 0.25 * rng.unit());
    auto base = score_document(key, resp, link_strategy::consecutive);
    auto names = support::node_names(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (in_closure(key, names[i], names[j])) continue;
        auto more = resp;
        if (!more.emplace(names[i], names[j]).second) continue;
        auto s = score_document(key, more, link_strategy::consecutive);
        EXPECT_GE(s.recall, base.recall);
        EXPECT_LE(s.precision, base.precision);
        EXPECT_EQ(s.counts.response_links_correct, base.counts.response_links_correct);
      }
  }
}

TEST(ScoreDocument, CrossChainLinkCanRaiseRecall) {
  // Key {A,B},{X}; response (A,X). Adding the wrong link (X,B) joins A and B
  // in the response closure, recovering the key link (A,B).
  auto key = chain_partition::from_keys<int>({"A", "B", "X"}, {1, 1, 2});
  auto before = score_document(key, {{"A", "X"}}, link_strategy::consecutive);
  auto after = score_document(key, {{"A", "X"}, {"X", "B"}}, link_strategy::consecutive);
  EXPECT_EQ(before.recall, 0.0);
  EXPECT_EQ(after.recall, 1.0);
  EXPECT_EQ(after.precision, 0.0);
}

TEST(Aggregate, MacroMeans) {
  score_report a, b;
  a.recall = 0.8, a.precision = 0.9;
  b.recall = 0.6, b.precision = 0.7;
  std::vector<score_report> v{a, b};
  auto m = aggregate(v, aggregation::macro);
  EXPECT_NEAR(m.recall, 0.7, 1e-12);
  EXPECT_NEAR(m.precision, 0.8, 1e-12);
  EXPECT_NEAR(m.f_measures[1].second, f_measure(0.7, 0.8, 1.0), 1e-12);
}

TEST(Aggregate, MicroPoolsCounts) {
  std::vector<score_report> v{counts_report(1, 2, 1, 1), counts_report(0, 2, 0, 1)};
  auto m = aggregate(v, aggregation::micro);
  EXPECT_DOUBLE_EQ(m.recall, 0.25);
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_EQ(m.counts, (link_counts{4, 2, 1, 1}));
}

TEST(Aggregate, SingleReportIsItself) {
  auto s = counts_report(2, 3, 1, 4);
  std::vector<score_report> v{s};
  for (auto mode : {aggregation::macro, aggregation::micro}) {
    auto m = aggregate(v, mode);
    EXPECT_DOUBLE_EQ(m.recall, s.recall);
    EXPECT_DOUBLE_EQ(m.precision, s.precision);
    EXPECT_EQ(m.f_measures, s.f_measures);
  }
}

TEST(Aggregate, VacuousReportsExcludedPerMetric) {
  // Second report has no key links and no response links.
  std::vector<score_report> v{counts_report(1, 2, 1, 2), counts_report(0, 0, 0, 0), counts_report(0, 0, 0, 1)};
  auto m = aggregate(v, aggregation::macro);
  EXPECT_DOUBLE_EQ(m.recall, 0.5);
  EXPECT_DOUBLE_EQ(m.precision, 0.25);
  std::vector<score_report> all_vacuous{counts_report(0, 0, 0, 0)};
  EXPECT_THROW(aggregate(all_vacuous, aggregation::macro), data_error);
  EXPECT_THROW(aggregate(all_vacuous, aggregation::micro), data_error);
  EXPECT_THROW(aggregate(std::vector<score_report>{}, aggregation::macro), data_error);
  std::vector<score_report> no_key{counts_report(0, 0, 1, 2)};
  auto k = aggregate(no_key, aggregation::macro);
  EXPECT_TRUE(k.vacuous_recall);
  EXPECT_EQ(k.recall, 1.0);
  EXPECT_DOUBLE_EQ(k.precision, 0.5);
}

TEST(Report, JsonFieldsAndPercent) {
  auto j = report_to_json(counts_report(1, 2, 1, 1));
  for (auto k : {"recall", "precision", "f_measures", "key_links", "response_links", "key_links_recovered",
                 "response_links_correct", "vacuous_recall", "vacuous_precision"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_TRUE(j["f_measures"].contains("2.0"));
  EXPECT_TRUE(j["f_measures"].contains("0.5"));
  EXPECT_EQ(percent(0.8543), "85.4%");
}
