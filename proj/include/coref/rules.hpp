#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coref/corpus.hpp"
#include "coref/pairgen.hpp"
#include "coref/text.hpp"

namespace coref {

inline constexpr int rule_count = 8;

struct rule_info {
  std::string_view antecedent;
  bool coreferent;
};

// The baseline rule set, in its fixed evaluation order.
inline constexpr std::array<rule_info, rule_count> rule_table{{
    {"same trigger family", false},
    {"different partitions", false},
    {"common noun phrase", true},
    {"both joint-venture children", true},
    {"same company name", true},
    {"one name an alias of the other", true},
    {"exactly one joint-venture child", false},
    {"different company names, no alias", false},
}};

struct rule_step {
  int rule;
  bool antecedent;

  friend bool operator==(const rule_step&, const rule_step&) = default;
};

struct rule_decision {
  bool coreferent = false;
  std::optional<int> fired_rule;
  std::vector<rule_step> trace;

  friend bool operator==(const rule_decision&, const rule_decision&) = default;
};

// Antecedent truth values of rules 1..8 for an ordered phrase pair.
inline std::array<bool, rule_count> rule_antecedents(const phrase_annotation& a, const phrase_annotation& b,
                                                     const feature_vector& f) {
  auto discourse_field = [](const phrase_annotation& p, auto member) -> std::optional<std::string> {
    if (!p.discourse) return std::nullopt;
    return (*p.discourse).*member;
  };
  auto tf_a = discourse_field(a, &discourse_info::trigger_family_id);
  auto tf_b = discourse_field(b, &discourse_info::trigger_family_id);
  auto pt_a = discourse_field(a, &discourse_info::partition_id);
  auto pt_b = discourse_field(b, &discourse_info::partition_id);

  bool both_names = a.slots.name && b.slots.name;
  bool same_name = both_names && text::normalize_name(*a.slots.name) == text::normalize_name(*b.slots.name);
  auto jv1 = f[feature::jv_child_1];
  auto jv2 = f[feature::jv_child_2];

  return {
      tf_a && tf_b && *tf_a == *tf_b,
      pt_a && pt_b && *pt_a != *pt_b,
      f[feature::common_np] == feature_value::yes,
      f[feature::both_jv_child] == feature_value::yes,
      same_name,
      f[feature::alias] == feature_value::yes,
      (jv1 == feature_value::yes && jv2 == feature_value::no) || (jv1 == feature_value::no && jv2 == feature_value::yes),
      both_names && !same_name && f[feature::alias] == feature_value::no,
  };
}

// First-match evaluation. Falls through to NOT_COREFERENT when no rule fires;
// the trace stops at the rule that fired.
inline rule_decision classify_rules(const phrase_annotation& a, const phrase_annotation& b) {
  auto f = extract_features(a, b);
  auto ante = rule_antecedents(a, b, f);
  rule_decision d;
  for (int r = 0; r < rule_count; ++r) {
    d.trace.push_back({r + 1, ante[r]});
    if (ante[r]) {
      d.fired_rule = r + 1;
      d.coreferent = rule_table[r].coreferent;
      return d;
    }
  }
  return d;
}

inline rule_decision classify_rules(const phrase_pair& pair, const document& doc) {
  return classify_rules(doc.phrase(pair.first), doc.phrase(pair.second));
}

struct full_rule_trace {
  phrase_pair pair;
  std::array<bool, rule_count> antecedents{};
  rule_decision decision;
};

inline full_rule_trace rule_trace(const phrase_pair& pair, const document& doc) {
  const auto& a = doc.phrase(pair.first);
  const auto& b = doc.phrase(pair.second);
  full_rule_trace t;
  t.pair = pair;
  t.antecedents = rule_antecedents(a, b, extract_features(a, b));
  t.decision = classify_rules(a, b);
  return t;
}

inline std::string_view decision_label(bool coreferent) { return coreferent ? "COREFERENT" : "NOT_COREFERENT"; }

inline std::string format_rule_trace(const full_rule_trace& t) {
  std::ostringstream os;
  os << "pair " << t.pair.doc_id << ' ' << t.pair.first << ' ' << t.pair.second << '\n';
  for (int r = 0; r < rule_count; ++r) {
    bool evaluated = r < static_cast<int>(t.decision.trace.size());
    os << "  R" << (r + 1) << ' ' << (t.antecedents[r] ? "true " : "false") << ' '
       << (rule_table[r].coreferent ? "-> COREFERENT     " : "-> NOT_COREFERENT ") << rule_table[r].antecedent
       << (evaluated ? "" : "  (not reached)") << '\n';
  }
  os << "  decision " << decision_label(t.decision.coreferent) << " via "
     << (t.decision.fired_rule ? "R" + std::to_string(*t.decision.fired_rule) : std::string("default")) << '\n';
  return os.str();
}

} // namespace coref
