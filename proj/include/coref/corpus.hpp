#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "coref/chains.hpp"
#include "coref/error.hpp"
#include "coref/text.hpp"

namespace coref {

enum class entity_type { company, government, person };

enum class relationship { jv_parent, jv_child, child };

inline std::string_view to_string(entity_type t) {
  switch (t) {
    case entity_type::company: return "COMPANY";
    case entity_type::government: return "GOVERNMENT";
    case entity_type::person: return "PERSON";
  }
  return "?";
}

inline std::optional<entity_type> parse_entity_type(std::string_view s) {
  if (s == "COMPANY") return entity_type::company;
  if (s == "GOVERNMENT") return entity_type::government;
  if (s == "PERSON") return entity_type::person;
  return std::nullopt;
}

inline std::string_view to_string(relationship r) {
  switch (r) {
    case relationship::jv_parent: return "JV-PARENT";
    case relationship::jv_child: return "JV-CHILD";
    case relationship::child: return "CHILD";
  }
  return "?";
}

inline std::optional<relationship> parse_relationship(std::string_view s) {
  if (s == "JV-PARENT") return relationship::jv_parent;
  if (s == "JV-CHILD") return relationship::jv_child;
  if (s == "CHILD") return relationship::child;
  return std::nullopt;
}

struct slot_set {
  std::optional<std::string> name;
  std::optional<entity_type> type;
  std::set<relationship> relationships;
  std::optional<std::string> nationality;

  friend bool operator==(const slot_set&, const slot_set&) = default;
};

// Optional upstream-analyzer annotations consumed by the rule baseline.
struct discourse_info {
  std::optional<std::string> trigger_family_id;
  std::optional<std::string> partition_id;

  friend bool operator==(const discourse_info&, const discourse_info&) = default;
};

// Half-open range of code point offsets.
struct char_range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  friend auto operator<=>(const char_range&, const char_range&) = default;
};

struct phrase_annotation {
  phrase_id id;
  char_range span;
  std::string str;
  std::size_t sentence_index = 0;
  std::set<std::string> entity_ids;
  slot_set slots;
  // Simple constituent noun phrases; empty means the whole phrase string.
  std::vector<std::string> constituents;
  std::optional<discourse_info> discourse;

  bool multireferent() const { return entity_ids.size() > 1; }

  friend bool operator==(const phrase_annotation&, const phrase_annotation&) = default;
};

struct document {
  std::string doc_id;
  std::string text;
  std::vector<char_range> sentences;
  std::vector<phrase_annotation> phrases;

  const phrase_annotation& phrase(const phrase_id& id) const {
    for (const auto& p : phrases)
      if (p.id == id) return p;
    throw data_error("document '" + doc_id + "' has no phrase '" + id + "'");
  }

  std::vector<phrase_id> phrase_ids() const {
    std::vector<phrase_id> ids;
    ids.reserve(phrases.size());
    for (const auto& p : phrases) ids.push_back(p.id);
    return ids;
  }

  friend bool operator==(const document&, const document&) = default;
};

using corpus = std::vector<document>;

struct violation {
  std::string code;
  std::string location;
  std::string message;

  friend bool operator==(const violation&, const violation&) = default;
};

inline std::vector<violation> validate_document(const document& doc) {
  std::vector<violation> out;
  auto add = [&](std::string code, std::string location, std::string message) {
    out.push_back({std::move(code), std::move(location), std::move(message)});
  };

  if (doc.doc_id.empty()) add("empty doc_id", "doc_id", "document id must be non-empty");

  std::vector<std::size_t> offsets;
  try {
    offsets = text::code_point_offsets(doc.text);
  } catch (const parse_error& e) {
    add("invalid text", "text", e.what());
    return out;
  }
  const std::size_t len = offsets.size() - 1;

  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& s = doc.sentences[i];
    std::string loc = "sentences[" + std::to_string(i) + "]";
    if (s.begin >= s.end || s.end > len) {
      add("sentence out of bounds", loc,
          "range [" + std::to_string(s.begin) + "," + std::to_string(s.end) + ") not a non-empty range within text of length " +
              std::to_string(len));
    }
    if (i > 0 && s.begin < doc.sentences[i - 1].end) {
      add("sentences unsorted or overlapping", loc, "sentence starts before the previous one ends");
    }
  }

  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < doc.phrases.size(); ++i) {
    const auto& p = doc.phrases[i];
    std::string loc = "phrases[" + std::to_string(i) + "]";
    if (p.id.empty()) add("empty phrase id", loc + ".phrase_id", "phrase id must be non-empty");
    if (!ids.insert(p.id).second) add("duplicate phrase id", loc + ".phrase_id", "phrase id '" + p.id + "' repeated");

    bool span_ok = p.span.begin < p.span.end && p.span.end <= len;
    if (!span_ok) {
      add("span out of bounds", loc + ".span",
          "span [" + std::to_string(p.span.begin) + "," + std::to_string(p.span.end) +
              ") not a non-empty range within text of length " + std::to_string(len));
    } else if (text::slice(doc.text, offsets, p.span.begin, p.span.end) != p.str) {
      add("string mismatch", loc + ".string", "string does not equal the text at its span");
    }

    if (p.sentence_index >= doc.sentences.size()) {
      add("sentence index out of range", loc + ".sentence_index",
          "no sentence " + std::to_string(p.sentence_index));
    } else {
      const auto& s = doc.sentences[p.sentence_index];
      if (p.span.begin < s.begin || p.span.begin >= s.end) {
        add("sentence does not contain span", loc + ".sentence_index",
            "sentence " + std::to_string(p.sentence_index) + " does not contain the span start");
      }
    }

    if (p.entity_ids.empty()) add("missing entity id", loc + ".entity_ids", "phrase must refer to at least one entity");
    for (const auto& e : p.entity_ids)
      if (e.empty()) add("empty entity id", loc + ".entity_ids", "entity ids must be non-empty");
    if (p.slots.name && p.slots.name->empty()) add("empty name", loc + ".slots.name", "name slot must be non-empty");
    for (std::size_t k = 0; k < p.constituents.size(); ++k)
      if (p.constituents[k].empty())
        add("empty constituent", loc + ".constituents[" + std::to_string(k) + "]", "constituent must be non-empty");

    if (i > 0 && p.span.begin < doc.phrases[i - 1].span.begin) {
      add("phrases unsorted", loc + ".span", "phrases must be sorted by span start");
    }
  }
  return out;
}

// Drops multireferent phrases; returns the ids removed.
inline std::vector<phrase_id> filter_multireferent(document& doc) {
  std::vector<phrase_id> removed;
  std::vector<phrase_annotation> kept;
  kept.reserve(doc.phrases.size());
  for (auto& p : doc.phrases) {
    if (p.multireferent()) {
      removed.push_back(p.id);
    } else {
      kept.push_back(std::move(p));
    }
  }
  doc.phrases = std::move(kept);
  return removed;
}

// Gold chains: phrases grouped by their single entity id.
inline chain_partition key_chains(const document& doc) {
  std::vector<std::string> keys;
  keys.reserve(doc.phrases.size());
  for (const auto& p : doc.phrases) {
    if (p.entity_ids.size() != 1) {
      throw data_error("key_chains: phrase '" + p.id + "' in document '" + doc.doc_id + "' has " +
                       std::to_string(p.entity_ids.size()) + " entity ids; filter multireferent phrases first");
    }
    keys.push_back(*p.entity_ids.begin());
  }
  return chain_partition::from_keys(doc.phrase_ids(), keys);
}

} // namespace coref
