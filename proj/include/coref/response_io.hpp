#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "coref/chains.hpp"
#include "coref/corpus.hpp"
#include "coref/harness.hpp"
#include "coref/json_util.hpp"
#include "coref/scorer.hpp"

namespace coref {

// Response file: one JSON record per document with the classifier's positive
// links and its decision for every pair.
inline json_util::json response_to_json(const document_response& r, std::string_view engine_name) {
  using json_util::json;
  json j = json::object();
  j["doc_id"] = r.doc_id;
  j["engine"] = engine_name;
  json links = json::array();
  for (std::size_t i = 0; i < r.pairs.size(); ++i)
    if (r.coreferent[i]) links.push_back(json::array({r.pairs[i].first, r.pairs[i].second}));
  j["links"] = std::move(links);
  json decisions = json::array();
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    json d = json::object();
    d["first"] = r.pairs[i].first;
    d["second"] = r.pairs[i].second;
    d["label"] = decision_label(r.coreferent[i]);
    if (!r.fired_rule.empty()) {
      if (r.fired_rule[i]) {
        d["fired_rule"] = *r.fired_rule[i];
      } else {
        d["fired_rule"] = nullptr;
      }
    }
    if (!r.leaf_counts.empty()) d["leaf_counts"] = dtree::detail::counts_to_json(r.leaf_counts[i]);
    decisions.push_back(std::move(d));
  }
  j["decisions"] = std::move(decisions);
  return j;
}

// doc_id -> positive links. Decisions are carried for inspection only.
inline std::map<std::string, link_set> read_responses(std::istream& in) {
  using json_util::object_reader;
  std::map<std::string, link_set> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = "response line " + std::to_string(line_no);
    auto j = json_util::parse_json(line, where);
    try {
      object_reader r(j, "");
      r.allow_only({"doc_id", "engine", "links", "decisions"});
      auto id = r.string("doc_id");
      if (out.count(id)) object_reader::fail("doc_id", "duplicate response for '" + id + "'");
      link_set links;
      const auto& arr = object_reader::as_array(r.required("links"), "links");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        auto p = "links[" + std::to_string(i) + "]";
        object_reader::as_array(arr[i], p);
        if (arr[i].size() != 2) object_reader::fail(p, "expected [first, second]");
        auto a = object_reader::as_string(arr[i][0], p + "[0]");
        auto b = object_reader::as_string(arr[i][1], p + "[1]");
        if (a == b) object_reader::fail(p, "self-link");
        links.emplace(a, b);
      }
      out.emplace(id, std::move(links));
    } catch (const parse_error& e) {
      throw parse_error(where + ": " + e.what());
    }
  }
  return out;
}

struct corpus_scores {
  std::vector<std::string> doc_ids;
  std::vector<score_report> reports;
  std::vector<bool> skipped;  // documents with no phrase pairs
  // Empty when every kept report is vacuous in both recall and precision.
  std::optional<score_report> aggregate;
};

// Scores every document of `docs`; documents without a response record get
// an empty response. Documents with no pairs are excluded from aggregation.
inline corpus_scores score_corpus(const corpus& docs, const std::map<std::string, link_set>& responses,
                                  link_strategy strategy, aggregation agg, std::span<const double> betas) {
  for (const auto& [id, links] : responses) {
    bool found = false;
    for (const auto& d : docs) found = found || d.doc_id == id;
    if (!found) throw data_error("response for unknown document '" + id + "'");
  }
  corpus_scores out;
  std::vector<score_report> kept;
  static const link_set empty;
  for (const auto& d : docs) {
    auto it = responses.find(d.doc_id);
    auto report = score_document(key_chains(d), it == responses.end() ? empty : it->second, strategy, betas);
    bool skip = d.phrases.size() < 2;
    out.doc_ids.push_back(d.doc_id);
    out.reports.push_back(report);
    out.skipped.push_back(skip);
    if (!skip) kept.push_back(report);
  }
  if (kept.empty()) throw data_error("score: no document has phrase pairs");
  bool defined = std::any_of(kept.begin(), kept.end(),
                             [](const score_report& r) { return !r.vacuous_recall || !r.vacuous_precision; });
  if (defined) out.aggregate = aggregate(kept, agg, betas);
  return out;
}

} // namespace coref
