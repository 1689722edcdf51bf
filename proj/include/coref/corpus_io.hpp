#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "coref/corpus.hpp"
#include "coref/json_util.hpp"

namespace coref {

inline constexpr int corpus_format_version = 1;

struct load_warning {
  std::string doc_id;
  phrase_id phrase;
  std::string message;
};

struct corpus_load {
  corpus documents;
  std::vector<load_warning> warnings;
};

namespace detail {

using json_util::json;
using json_util::object_reader;

inline json range_to_json(const char_range& r) { return json::array({r.begin, r.end}); }

inline char_range range_from_json(const json& j, const std::string& path) {
  object_reader::as_array(j, path);
  if (j.size() != 2) object_reader::fail(path, "expected [begin, end]");
  return {object_reader::as_unsigned(j[0], path + "[0]"), object_reader::as_unsigned(j[1], path + "[1]")};
}

inline json slots_to_json(const slot_set& s) {
  json j = json::object();
  if (s.name) j["name"] = *s.name;
  if (s.type) j["type"] = to_string(*s.type);
  if (!s.relationships.empty()) {
    json rel = json::array();
    for (auto r : s.relationships) rel.push_back(to_string(r));
    j["relationship"] = std::move(rel);
  }
  if (s.nationality) j["nationality"] = *s.nationality;
  return j;
}

inline slot_set slots_from_json(const json& j, const std::string& path) {
  object_reader r(j, path);
  r.allow_only({"name", "type", "relationship", "nationality"});
  slot_set s;
  if (auto* v = r.optional("name")) s.name = object_reader::as_string(*v, r.sub("name"));
  if (auto* v = r.optional("type")) {
    auto str = object_reader::as_string(*v, r.sub("type"));
    auto t = parse_entity_type(str);
    if (!t) object_reader::fail(r.sub("type"), "unknown entity type '" + str + "'");
    s.type = t;
  }
  if (auto* v = r.optional("relationship")) {
    auto p = r.sub("relationship");
    object_reader::as_array(*v, p);
    for (std::size_t i = 0; i < v->size(); ++i) {
      auto ip = p + "[" + std::to_string(i) + "]";
      auto str = object_reader::as_string((*v)[i], ip);
      auto rel = parse_relationship(str);
      if (!rel) object_reader::fail(ip, "unknown relationship '" + str + "'");
      if (!s.relationships.insert(*rel).second) object_reader::fail(ip, "duplicate relationship '" + str + "'");
    }
  }
  if (auto* v = r.optional("nationality")) s.nationality = object_reader::as_string(*v, r.sub("nationality"));
  return s;
}

inline json phrase_to_json(const phrase_annotation& p) {
  json j = json::object();
  j["phrase_id"] = p.id;
  j["span"] = range_to_json(p.span);
  j["string"] = p.str;
  j["sentence_index"] = p.sentence_index;
  j["entity_ids"] = json(std::vector<std::string>(p.entity_ids.begin(), p.entity_ids.end()));
  j["slots"] = slots_to_json(p.slots);
  if (!p.constituents.empty()) j["constituents"] = json(p.constituents);
  if (p.discourse) {
    json d = json::object();
    if (p.discourse->trigger_family_id) d["trigger_family_id"] = *p.discourse->trigger_family_id;
    if (p.discourse->partition_id) d["partition_id"] = *p.discourse->partition_id;
    j["discourse"] = std::move(d);
  }
  return j;
}

inline phrase_annotation phrase_from_json(const json& j, const std::string& path) {
  object_reader r(j, path);
  r.allow_only({"phrase_id", "span", "string", "sentence_index", "entity_ids", "slots", "constituents", "discourse"});
  phrase_annotation p;
  p.id = r.string("phrase_id");
  p.span = range_from_json(r.required("span"), r.sub("span"));
  p.str = r.string("string");
  p.sentence_index = r.unsigned_int("sentence_index");

  const auto& ids = object_reader::as_array(r.required("entity_ids"), r.sub("entity_ids"));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto ip = r.sub("entity_ids") + "[" + std::to_string(i) + "]";
    if (!p.entity_ids.insert(object_reader::as_string(ids[i], ip)).second) {
      object_reader::fail(ip, "duplicate entity id");
    }
  }
  p.slots = slots_from_json(r.required("slots"), r.sub("slots"));

  if (auto* v = r.optional("constituents")) {
    object_reader::as_array(*v, r.sub("constituents"));
    for (std::size_t i = 0; i < v->size(); ++i) {
      p.constituents.push_back(
          object_reader::as_string((*v)[i], r.sub("constituents") + "[" + std::to_string(i) + "]"));
    }
  }
  if (auto* v = r.optional("discourse")) {
    object_reader d(*v, r.sub("discourse"));
    d.allow_only({"trigger_family_id", "partition_id"});
    discourse_info info;
    if (auto* t = d.optional("trigger_family_id"))
      info.trigger_family_id = object_reader::as_string(*t, d.sub("trigger_family_id"));
    if (auto* t = d.optional("partition_id")) info.partition_id = object_reader::as_string(*t, d.sub("partition_id"));
    p.discourse = std::move(info);
  }
  return p;
}

} // namespace detail

inline json_util::json document_to_json(const document& doc) {
  using detail::json;
  json j = json::object();
  j["format"] = corpus_format_version;
  j["doc_id"] = doc.doc_id;
  j["text"] = doc.text;
  json sentences = json::array();
  for (const auto& s : doc.sentences) sentences.push_back(detail::range_to_json(s));
  j["sentences"] = std::move(sentences);
  json phrases = json::array();
  for (const auto& p : doc.phrases) phrases.push_back(detail::phrase_to_json(p));
  j["phrases"] = std::move(phrases);
  return j;
}

// Structural decode only; no invariant checks and no filtering.
inline document document_from_json(const json_util::json& j, const std::string& path = "") {
  using detail::object_reader;
  object_reader r(j, path);
  r.allow_only({"format", "doc_id", "text", "sentences", "phrases"});
  const auto& fmt = r.required("format");
  if (!fmt.is_number_integer() || fmt.get<long long>() != corpus_format_version) {
    object_reader::fail(r.sub("format"), "unsupported format version " + fmt.dump() + " (expected " +
                                             std::to_string(corpus_format_version) + ")");
  }
  document doc;
  doc.doc_id = r.string("doc_id");
  doc.text = r.string("text");
  const auto& sentences = object_reader::as_array(r.required("sentences"), r.sub("sentences"));
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    doc.sentences.push_back(detail::range_from_json(sentences[i], r.sub("sentences") + "[" + std::to_string(i) + "]"));
  }
  const auto& phrases = object_reader::as_array(r.required("phrases"), r.sub("phrases"));
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    doc.phrases.push_back(detail::phrase_from_json(phrases[i], r.sub("phrases") + "[" + std::to_string(i) + "]"));
  }
  return doc;
}

inline std::string serialize_document(const document& doc) { return document_to_json(doc).dump(); }

inline void write_corpus(std::ostream& out, const corpus& docs) {
  for (const auto& d : docs) out << serialize_document(d) << '\n';
}

inline std::string format_violations(const std::vector<violation>& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += "; ";
    s += v.location + ": " + v.code + " (" + v.message + ")";
  }
  return s;
}

// Decodes one record line and checks document invariants. Multireferent
// phrases are kept.
inline document parse_document_record(std::string_view line, const std::string& where = "record") {
  auto j = json_util::parse_json(line, where);
  std::string doc_id = "?";
  if (j.is_object() && j.contains("doc_id") && j["doc_id"].is_string()) doc_id = j["doc_id"].get<std::string>();
  document doc;
  try {
    doc = document_from_json(j);
  } catch (const parse_error& e) {
    throw parse_error(where + " (doc '" + doc_id + "'): " + e.what());
  }
  auto vs = validate_document(doc);
  if (!vs.empty()) throw validation_error(where + " (doc '" + doc_id + "'): " + format_violations(vs));
  return doc;
}

// Reads a corpus file: one document record per line, blank lines ignored.
// Multireferent phrases are dropped and reported as warnings.
inline corpus_load parse_corpus(std::istream& in) {
  corpus_load out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto doc = parse_document_record(line, "line " + std::to_string(line_no));
    if (!seen.insert(doc.doc_id).second) {
      throw validation_error("line " + std::to_string(line_no) + " (doc '" + doc.doc_id + "'): duplicate doc_id");
    }
    for (auto& id : filter_multireferent(doc)) {
      out.warnings.push_back({doc.doc_id, id, "multireferent phrase excluded"});
    }
    out.documents.push_back(std::move(doc));
  }
  return out;
}

} // namespace coref
