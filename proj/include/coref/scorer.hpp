#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coref/chains.hpp"
#include "coref/error.hpp"
#include "coref/json_util.hpp"

namespace coref {

enum class aggregation { macro, micro };

inline std::string_view to_string(aggregation a) { return a == aggregation::macro ? "macro" : "micro"; }

inline aggregation parse_aggregation(std::string_view s) {
  if (s == "macro") return aggregation::macro;
  if (s == "micro") return aggregation::micro;
  throw parse_error("unknown aggregation '" + std::string(s) + "'");
}

inline const std::vector<double>& default_betas() {
  static const std::vector<double> betas{2.0, 1.0, 0.5};
  return betas;
}

struct link_counts {
  std::size_t key_links = 0;
  std::size_t response_links = 0;
  std::size_t key_links_recovered = 0;
  std::size_t response_links_correct = 0;

  friend bool operator==(const link_counts&, const link_counts&) = default;
};

struct score_report {
  double recall = 1.0;
  double precision = 1.0;
  std::vector<std::pair<double, double>> f_measures;  // (beta, F)
  link_counts counts;
  bool vacuous_recall = false;
  bool vacuous_precision = false;

  friend bool operator==(const score_report&, const score_report&) = default;
};

// (beta^2 + 1) P R / (beta^2 P + R); 0 when P = R = 0.
inline double f_measure(double recall, double precision, double beta) {
  if (!(beta > 0.0)) throw data_error("f_measure: beta must be positive");
  if (recall == 0.0 && precision == 0.0) return 0.0;
  const double b2 = beta * beta;
  return ((b2 + 1.0) * precision * recall) / (b2 * precision + recall);
}

inline void fill_f_measures(score_report& r, std::span<const double> betas) {
  r.f_measures.clear();
  for (double b : betas) r.f_measures.emplace_back(b, f_measure(r.recall, r.precision, b));
}

// Plain set-overlap recall and precision; empty denominators give 1.0.
template <class T>
std::pair<double, double> recall_precision_items(const std::set<T>& key, const std::set<T>& response) {
  std::size_t hit = 0;
  for (const auto& x : response) hit += key.count(x);
  double r = key.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(key.size());
  double p = response.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(response.size());
  return {r, p};
}

inline void finish_ratios(score_report& r) {
  const auto& c = r.counts;
  r.vacuous_recall = c.key_links == 0;
  r.vacuous_precision = c.response_links == 0;
  r.recall = r.vacuous_recall ? 1.0 : static_cast<double>(c.key_links_recovered) / static_cast<double>(c.key_links);
  r.precision =
      r.vacuous_precision ? 1.0 : static_cast<double>(c.response_links_correct) / static_cast<double>(c.response_links);
}

// Recall: explicit key links implied by the response closure. Precision:
// response links implied by the key closure.
inline score_report score_document(const chain_partition& key, const link_set& response, link_strategy strategy,
                                   std::span<const double> betas = default_betas()) {
  for (const auto& l : response) {
    if (!key.contains(l.a)) throw data_error("score: response endpoint '" + l.a + "' not in the key's phrase set");
    if (!key.contains(l.b)) throw data_error("score: response endpoint '" + l.b + "' not in the key's phrase set");
  }
  auto response_closure = close(response, key.members());
  auto key_links = explicit_links(key, strategy);

  score_report r;
  r.counts.key_links = key_links.size();
  r.counts.response_links = response.size();
  for (const auto& l : key_links) r.counts.key_links_recovered += in_closure(response_closure, l) ? 1 : 0;
  for (const auto& l : response) r.counts.response_links_correct += in_closure(key, l) ? 1 : 0;
  finish_ratios(r);
  fill_f_measures(r, betas);
  return r;
}

// MACRO averages per-report ratios over reports that are non-vacuous for that
// metric; MICRO pools link counts. F is recomputed from the aggregate ratios.
inline score_report aggregate(std::span<const score_report> reports, aggregation mode,
                              std::span<const double> betas = default_betas()) {
  if (reports.empty()) throw data_error("aggregate: no reports");
  score_report out;
  for (const auto& r : reports) {
    out.counts.key_links += r.counts.key_links;
    out.counts.response_links += r.counts.response_links;
    out.counts.key_links_recovered += r.counts.key_links_recovered;
    out.counts.response_links_correct += r.counts.response_links_correct;
  }

  if (mode == aggregation::micro) {
    finish_ratios(out);
    if (out.vacuous_recall && out.vacuous_precision) throw data_error("aggregate: all reports are vacuous");
  } else {
    double rsum = 0.0, psum = 0.0;
    std::size_t rn = 0, pn = 0;
    for (const auto& r : reports) {
      if (!r.vacuous_recall) {
        rsum += r.recall;
        ++rn;
      }
      if (!r.vacuous_precision) {
        psum += r.precision;
        ++pn;
      }
    }
    if (rn == 0 && pn == 0) throw data_error("aggregate: all reports are vacuous");
    out.vacuous_recall = rn == 0;
    out.vacuous_precision = pn == 0;
    out.recall = rn == 0 ? 1.0 : rsum / static_cast<double>(rn);
    out.precision = pn == 0 ? 1.0 : psum / static_cast<double>(pn);
  }
  fill_f_measures(out, betas);
  return out;
}

inline std::string format_beta(double beta) {
  auto s = json_util::json(beta).dump();
  return s;
}

inline json_util::json report_to_json(const score_report& r) {
  using json_util::json;
  json j = json::object();
  j["recall"] = r.recall;
  j["precision"] = r.precision;
  json f = json::object();
  for (const auto& [b, v] : r.f_measures) f[format_beta(b)] = v;
  j["f_measures"] = std::move(f);
  j["key_links"] = r.counts.key_links;
  j["response_links"] = r.counts.response_links;
  j["key_links_recovered"] = r.counts.key_links_recovered;
  j["response_links_correct"] = r.counts.response_links_correct;
  j["vacuous_recall"] = r.vacuous_recall;
  j["vacuous_precision"] = r.vacuous_precision;
  return j;
}

// Percentage with one decimal, as printed in human-readable tables.
inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
  return buf;
}

} // namespace coref
