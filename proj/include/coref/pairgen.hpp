#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coref/chains.hpp"
#include "coref/corpus.hpp"
#include "coref/text.hpp"

namespace coref {

enum class feature_value : std::uint8_t { no = 0, yes = 1, unknown = 2 };

inline std::string_view to_string(feature_value v) {
  switch (v) {
    case feature_value::no: return "NO";
    case feature_value::yes: return "YES";
    case feature_value::unknown: return "UNKNOWN";
  }
  return "?";
}

inline std::optional<feature_value> parse_feature_value(std::string_view s) {
  if (s == "NO") return feature_value::no;
  if (s == "YES") return feature_value::yes;
  if (s == "UNKNOWN") return feature_value::unknown;
  return std::nullopt;
}

enum class feature : std::uint8_t {
  name_1,
  jv_child_1,
  name_2,
  jv_child_2,
  alias,
  both_jv_child,
  common_np,
  same_sentence,
};

inline constexpr std::size_t feature_count = 8;

struct feature_spec {
  std::string_view name;
  bool ternary;
};

inline constexpr std::array<feature_spec, feature_count> feature_specs{{
    {"NAME-1", false},
    {"JV-CHILD-1", true},
    {"NAME-2", false},
    {"JV-CHILD-2", true},
    {"ALIAS", false},
    {"BOTH-JV-CHILD", true},
    {"COMMON-NP", false},
    {"SAME-SENTENCE", false},
}};

inline std::string_view feature_name(feature f) { return feature_specs[static_cast<std::size_t>(f)].name; }

inline std::optional<feature> parse_feature_name(std::string_view s) {
  for (std::size_t i = 0; i < feature_count; ++i)
    if (feature_specs[i].name == s) return static_cast<feature>(i);
  return std::nullopt;
}

// Allowed values of a feature, in canonical order.
inline std::vector<feature_value> feature_domain(feature f) {
  if (feature_specs[static_cast<std::size_t>(f)].ternary)
    return {feature_value::yes, feature_value::no, feature_value::unknown};
  return {feature_value::yes, feature_value::no};
}

class feature_vector {
public:
  feature_vector() { values_.fill(feature_value::no); }

  feature_value operator[](feature f) const { return values_[static_cast<std::size_t>(f)]; }
  feature_value& operator[](feature f) { return values_[static_cast<std::size_t>(f)]; }
  feature_value at(std::size_t i) const { return values_.at(i); }

  bool in_domain() const {
    for (std::size_t i = 0; i < feature_count; ++i)
      if (values_[i] == feature_value::unknown && !feature_specs[i].ternary) return false;
    return true;
  }

  friend bool operator==(const feature_vector&, const feature_vector&) = default;
  friend auto operator<=>(const feature_vector&, const feature_vector&) = default;

private:
  std::array<feature_value, feature_count> values_;
};

enum class label : std::uint8_t { negative = 0, positive = 1, unlabeled = 2 };

inline std::string_view to_string(label l) {
  switch (l) {
    case label::negative: return "NEGATIVE";
    case label::positive: return "POSITIVE";
    case label::unlabeled: return "UNLABELED";
  }
  return "?";
}

inline std::optional<label> parse_label(std::string_view s) {
  if (s == "NEGATIVE") return label::negative;
  if (s == "POSITIVE") return label::positive;
  if (s == "UNLABELED") return label::unlabeled;
  return std::nullopt;
}

struct phrase_pair {
  std::string doc_id;
  phrase_id first;
  phrase_id second;

  friend bool operator==(const phrase_pair&, const phrase_pair&) = default;
};

struct instance {
  phrase_pair pair;
  feature_vector features;
  label lbl = label::unlabeled;

  friend bool operator==(const instance&, const instance&) = default;
};

// Phrase indices in canonical order: span start, then span end, then listing order.
inline std::vector<std::size_t> canonical_phrase_order(const document& doc) {
  std::vector<std::size_t> idx(doc.phrases.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = doc.phrases[a].span;
    const auto& sb = doc.phrases[b].span;
    return sa.begin != sb.begin ? sa.begin < sb.begin : sa.end < sb.end;
  });
  return idx;
}

inline std::vector<phrase_pair> generate_pairs(const document& doc) {
  auto order = canonical_phrase_order(doc);
  std::vector<phrase_pair> pairs;
  if (order.size() >= 2) pairs.reserve(order.size() * (order.size() - 1) / 2);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      pairs.push_back({doc.doc_id, doc.phrases[order[i]].id, doc.phrases[order[j]].id});
  return pairs;
}

inline label label_pair(const phrase_pair& pair, const chain_partition& key) {
  return in_closure(key, pair.first, pair.second) ? label::positive : label::negative;
}

// True iff, after normalization, the tokens of one name form a contiguous
// run inside the tokens of the other.
inline bool is_alias(std::string_view name_a, std::string_view name_b) {
  auto ta = text::split_tokens(text::normalize_name(name_a));
  auto tb = text::split_tokens(text::normalize_name(name_b));
  if (ta.empty() || tb.empty()) return false;
  if (ta.size() > tb.size()) std::swap(ta, tb);
  return std::search(tb.begin(), tb.end(), ta.begin(), ta.end()) != tb.end();
}

inline feature_value alias_test(std::string_view name_a, std::string_view name_b) {
  return is_alias(name_a, name_b) ? feature_value::yes : feature_value::no;
}

inline feature_value jv_child_value(const slot_set& slots) {
  if (slots.relationships.empty()) return feature_value::unknown;
  return slots.relationships.count(relationship::jv_child) ? feature_value::yes : feature_value::no;
}

inline feature_value both_jv_child(feature_value a, feature_value b) {
  if (a == feature_value::yes && b == feature_value::yes) return feature_value::yes;
  if (a == feature_value::no && b == feature_value::no) return feature_value::no;
  return feature_value::unknown;
}

inline std::vector<std::string> normalized_constituents(const phrase_annotation& p) {
  std::vector<std::string> out;
  if (p.constituents.empty()) {
    out.push_back(text::normalize_name(p.str));
  } else {
    for (const auto& c : p.constituents) out.push_back(text::normalize_name(c));
  }
  return out;
}

inline feature_vector extract_features(const phrase_annotation& a, const phrase_annotation& b) {
  auto yes_no = [](bool v) { return v ? feature_value::yes : feature_value::no; };
  feature_vector f;
  f[feature::name_1] = yes_no(a.slots.name.has_value());
  f[feature::name_2] = yes_no(b.slots.name.has_value());
  f[feature::jv_child_1] = jv_child_value(a.slots);
  f[feature::jv_child_2] = jv_child_value(b.slots);
  f[feature::alias] = yes_no(a.slots.name && b.slots.name && is_alias(*a.slots.name, *b.slots.name));
  f[feature::both_jv_child] = both_jv_child(f[feature::jv_child_1], f[feature::jv_child_2]);

  auto ca = normalized_constituents(a);
  auto cb = normalized_constituents(b);
  bool common = false;
  for (const auto& x : ca)
    for (const auto& y : cb) common = common || (!x.empty() && x == y);
  f[feature::common_np] = yes_no(common);
  f[feature::same_sentence] = yes_no(a.sentence_index == b.sentence_index);
  return f;
}

// Features plus the gold label from `key`; pass nullptr for unlabeled output.
inline instance make_instance(const phrase_pair& pair, const document& doc, const chain_partition* key) {
  instance inst;
  inst.pair = pair;
  inst.features = extract_features(doc.phrase(pair.first), doc.phrase(pair.second));
  inst.lbl = key ? label_pair(pair, *key) : label::unlabeled;
  return inst;
}

inline std::vector<instance> document_instances(const document& doc) {
  auto key = key_chains(doc);
  std::vector<instance> out;
  for (const auto& pair : generate_pairs(doc)) out.push_back(make_instance(pair, doc, &key));
  return out;
}

inline std::vector<instance> corpus_instances(const corpus& docs) {
  std::vector<instance> out;
  for (const auto& d : docs) {
    auto part = document_instances(d);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

} // namespace coref
