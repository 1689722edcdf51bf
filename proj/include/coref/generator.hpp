#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "coref/corpus.hpp"
#include "coref/error.hpp"
#include "coref/json_util.hpp"

namespace coref {

// Platform-independent sampling on top of mt19937_64 (whose output sequence
// is fixed by the standard, unlike the std distributions).
class seeded_rng {
public:
  explicit seeded_rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  std::size_t weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = unit() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (x < weights[i]) return i;
      x -= weights[i];
    }
    return weights.size() - 1;
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

private:
  std::mt19937_64 engine_;
};

// Discrete distribution over min, min+1, ... with relative weights.
struct count_distribution {
  std::size_t min = 1;
  std::vector<double> weights{1.0};

  std::size_t sample(seeded_rng& rng) const { return min + rng.weighted(weights); }

  double mean() const {
    double total = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      total += weights[i];
      acc += weights[i] * static_cast<double>(min + i);
    }
    return acc / total;
  }

  friend bool operator==(const count_distribution&, const count_distribution&) = default;
};

struct generator_params {
  std::size_t n_texts = 50;
  count_distribution entities_per_text{2, {2.0, 3.0, 1.5, 0.5}};
  count_distribution mentions_per_entity{1, {5.0, 3.0, 2.0, 1.0}};
  // Probability a repeat mention of a named entity uses its short alias.
  double alias_rate = 0.35;
  // Probability a repeat mention is a descriptive noun phrase with no name.
  double description_rate = 0.3;
  // Probability a text contains a joint-venture child entity.
  double jv_child_rate = 0.6;
  // Probability a mention's relationship slot is filled.
  double relationship_rate = 0.7;
  // Probability an entity reuses the name stem of an earlier one in its text.
  double shared_stem_rate = 0.15;
  // Probability a first mention carries an appositive description.
  double apposition_rate = 0.2;
  // Probability two entities joined by a verb get a shared trigger family.
  double trigger_family_rate = 0.0;
  std::size_t name_lexicon_size = 60;
  count_distribution mentions_per_sentence{1, {3.0, 4.0, 2.0}};

  friend bool operator==(const generator_params&, const generator_params&) = default;
};

namespace detail {

inline const std::vector<std::string>& name_stems() {
  static const std::vector<std::string> stems = [] {
    const std::array<std::string_view, 16> first{"KA", "MI", "TO", "SA", "NO", "RE", "VA", "LU",
                                                 "DE", "HO", "SE", "TA", "BRI", "KO", "ZE", "FU"};
    const std::array<std::string_view, 16> second{"MORA", "TSUBI", "LEX", "NTEC", "VIA", "DANO", "RIKO", "SHIN",
                                                  "GATE", "MURA", "LCO", "KEN", "TRON", "BELL", "NOVA", "SEI"};
    std::vector<std::string> out;
    for (std::size_t k = 0; k < first.size() * second.size(); ++k) {
      // Interleave so that small lexicons still vary both syllables.
      auto a = first[k % first.size()];
      auto b = second[(k / first.size() + k) % second.size()];
      out.push_back(std::string(a) + std::string(b));
    }
    return out;
  }();
  return stems;
}

inline const std::vector<std::string>& company_suffixes() {
  static const std::vector<std::string> v{"CORP.", "CO.", "LTD.", "INC.", "INDUSTRIES LTD.", "ELECTRIC CO.",
                                          "TRADING CO.", "MOTOR CORP."};
  return v;
}

inline const std::vector<std::string>& parent_descriptions() {
  static const std::vector<std::string> v{"THE COMPANY", "THE TRADING HOUSE", "THE JAPANESE FIRM", "THE MAKER",
                                          "THE TAIWANESE CAR DEALER", "THE GROUP", "THE AUTOMAKER", "THE BANK"};
  return v;
}

inline const std::vector<std::string>& jv_descriptions() {
  static const std::vector<std::string> v{"THE JOINT VENTURE", "THE VENTURE", "THE NEW COMPANY", "A JOINT VENTURE"};
  return v;
}

inline const std::vector<std::string>& nationalities() {
  static const std::vector<std::string> v{"Japan (COUNTRY)", "Taiwan (COUNTRY)", "United States (COUNTRY)",
                                          "Germany (COUNTRY)"};
  return v;
}

inline const std::vector<std::string>& connectors() {
  static const std::vector<std::string> v{" WILL FORM A JOINT VENTURE WITH ", " SIGNED AN AGREEMENT WITH ",
                                          " AND ", " SAID ", " WILL SET UP A PLANT WITH ", " WILL SUPPLY "};
  return v;
}

inline const std::vector<std::string>& endings() {
  static const std::vector<std::string> v{" WILL PRODUCE AUTO PARTS.", " SAID THURSDAY.", " PLANS TO OPEN A STORE.",
                                          " WILL BE CAPITALIZED AT 100 MILLION YEN.", " STARTS OPERATIONS IN APRIL."};
  return v;
}

struct entity_plan {
  std::string id;
  std::optional<std::string> full_name;
  std::optional<std::string> alias;
  std::string description;
  entity_type type = entity_type::company;
  bool jv_child = false;
  std::optional<std::string> nationality;
  std::size_t mentions = 1;
  std::size_t emitted = 0;
};

struct mention_plan {
  std::size_t entity;
  std::string str;
  std::optional<std::string> name;
  std::vector<std::string> constituents;
};

} // namespace detail

inline void check_generator_params(const generator_params& p) {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw data_error(std::string("generator: ") + name + " must lie in [0,1]");
  };
  rate(p.alias_rate, "alias_rate");
  rate(p.description_rate, "description_rate");
  rate(p.jv_child_rate, "jv_child_rate");
  rate(p.relationship_rate, "relationship_rate");
  rate(p.shared_stem_rate, "shared_stem_rate");
  rate(p.apposition_rate, "apposition_rate");
  rate(p.trigger_family_rate, "trigger_family_rate");
  if (p.alias_rate + p.description_rate > 1.0) throw data_error("generator: alias_rate + description_rate exceeds 1");
  for (const auto* d : {&p.entities_per_text, &p.mentions_per_entity, &p.mentions_per_sentence}) {
    if (d->weights.empty()) throw data_error("generator: empty count distribution");
    double total = 0.0;
    for (double w : d->weights) {
      if (!(w >= 0.0)) throw data_error("generator: negative distribution weight");
      total += w;
    }
    if (!(total > 0.0)) throw data_error("generator: distribution weights sum to zero");
  }
  if (p.mentions_per_entity.min == 0) throw data_error("generator: entities need at least one mention");
  if (p.mentions_per_sentence.min == 0) throw data_error("generator: sentences need at least one mention");
  if (p.name_lexicon_size == 0) throw data_error("generator: name_lexicon_size must be positive (entities are named)");
  if (p.name_lexicon_size > detail::name_stems().size())
    throw data_error("generator: name_lexicon_size exceeds " + std::to_string(detail::name_stems().size()));
}

inline document generate_document(const generator_params& params, seeded_rng& rng, std::string doc_id) {
  using namespace detail;
  const std::size_t n_entities = params.entities_per_text.sample(rng);
  const bool has_jv = n_entities >= 3 && rng.chance(params.jv_child_rate);

  std::vector<entity_plan> entities(n_entities);
  std::vector<std::string> used_stems;
  for (std::size_t e = 0; e < n_entities; ++e) {
    auto& ent = entities[e];
    ent.id = "E" + std::to_string(e + 1);
    ent.mentions = params.mentions_per_entity.sample(rng);
    ent.jv_child = has_jv && e == n_entities - 1;
    if (rng.chance(0.4)) ent.nationality = rng.pick(nationalities());

    std::string stem;
    if (!used_stems.empty() && rng.chance(params.shared_stem_rate)) {
      stem = rng.pick(used_stems);
    } else {
      do {
        stem = name_stems()[rng.below(params.name_lexicon_size)];
      } while (params.name_lexicon_size > used_stems.size() &&
               std::find(used_stems.begin(), used_stems.end(), stem) != used_stems.end());
    }
    used_stems.push_back(stem);

    auto name_taken = [&](const std::string& name) {
      for (std::size_t k = 0; k < e; ++k)
        if (entities[k].full_name == name) return true;
      return false;
    };
    std::string suffix = rng.pick(company_suffixes());
    for (std::size_t tries = 0; tries < company_suffixes().size() && name_taken(stem + " " + suffix); ++tries) {
      suffix = rng.pick(company_suffixes());
    }

    if (ent.jv_child) {
      // Joint ventures are often only ever described, never named.
      ent.description = rng.pick(jv_descriptions());
      if (rng.chance(0.5)) {
        ent.full_name = stem + " " + suffix;
        ent.alias = stem;
      }
    } else if (rng.chance(0.12)) {
      ent.type = entity_type::government;
      ent.full_name = stem + " GOVERNMENT";
      ent.alias = stem;
      ent.description = "THE GOVERNMENT";
    } else {
      ent.full_name = stem + " " + suffix;
      ent.alias = stem;
      ent.description = rng.pick(parent_descriptions());
    }
  }

  // Mention order: shuffle entity slots; an entity's first appearance gets its
  // most explicit form.
  std::vector<std::size_t> slots;
  for (std::size_t e = 0; e < n_entities; ++e)
    for (std::size_t k = 0; k < entities[e].mentions; ++k) slots.push_back(e);
  rng.shuffle(slots);

  std::vector<mention_plan> mentions;
  for (auto e : slots) {
    auto& ent = entities[e];
    mention_plan m{e, {}, {}, {}};
    const bool first = ent.emitted++ == 0;
    if (!ent.full_name) {
      m.str = ent.description;
    } else if (first) {
      m.str = *ent.full_name;
      m.name = ent.full_name;
      if (rng.chance(params.apposition_rate)) {
        m.str = *ent.full_name + ", " + ent.description;
        m.constituents = {*ent.full_name, ent.description};
      }
    } else {
      double x = rng.unit();
      if (x < params.alias_rate) {
        m.str = *ent.alias;
        m.name = ent.alias;
      } else if (x < params.alias_rate + params.description_rate) {
        m.str = ent.description;
      } else {
        m.str = *ent.full_name;
        m.name = ent.full_name;
      }
    }
    mentions.push_back(std::move(m));
  }

  document doc;
  doc.doc_id = std::move(doc_id);
  std::size_t next = 0;
  std::size_t sentence_no = 0;
  while (next < mentions.size()) {
    std::size_t in_sentence = std::min(params.mentions_per_sentence.sample(rng), mentions.size() - next);
    if (!doc.text.empty()) doc.text += ' ';
    const std::size_t sentence_begin = doc.text.size();
    std::optional<std::string> family;
    for (std::size_t k = 0; k < in_sentence; ++k) {
      auto& m = mentions[next + k];
      const auto& ent = entities[m.entity];
      phrase_annotation p;
      p.id = "p" + std::to_string(doc.phrases.size() + 1);
      p.span = {doc.text.size(), doc.text.size() + m.str.size()};
      p.str = m.str;
      p.sentence_index = sentence_no;
      p.entity_ids = {ent.id};
      p.slots.name = m.name;
      p.slots.type = ent.type;
      p.slots.nationality = ent.nationality;
      if (rng.chance(params.relationship_rate)) {
        if (ent.jv_child) {
          p.slots.relationships = {relationship::jv_child};
        } else {
          p.slots.relationships = {relationship::jv_parent};
          if (rng.chance(0.15)) p.slots.relationships.insert(relationship::child);
        }
      }
      p.constituents = m.constituents;
      doc.text += m.str;

      const bool last = k + 1 == in_sentence;
      std::string joiner = last ? rng.pick(endings()) : rng.pick(connectors());
      if (k == 0 && !last && params.trigger_family_rate > 0.0 &&
          mentions[next + 1].entity != m.entity && rng.chance(params.trigger_family_rate)) {
        family = "s" + std::to_string(sentence_no) + "-t";
      }
      if (family && k < 2) p.discourse = discourse_info{family, std::nullopt};
      doc.text += joiner;
      doc.phrases.push_back(std::move(p));
    }
    doc.sentences.push_back({sentence_begin, doc.text.size()});
    next += in_sentence;
    ++sentence_no;
  }
  return doc;
}

inline corpus generate_corpus(const generator_params& params, std::uint64_t seed) {
  check_generator_params(params);
  seeded_rng rng(seed);
  corpus out;
  for (std::size_t i = 0; i < params.n_texts; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "text-%04zu", i + 1);
    out.push_back(generate_document(params, rng, id));
  }
  return out;
}

// ---- params file -------------------------------------------------------------

inline json_util::json generator_params_to_json(const generator_params& p) {
  using json_util::json;
  auto dist = [](const count_distribution& d) { return json{{"min", d.min}, {"weights", d.weights}}; };
  json j = json::object();
  j["format"] = 1;
  j["n_texts"] = p.n_texts;
  j["entities_per_text"] = dist(p.entities_per_text);
  j["mentions_per_entity"] = dist(p.mentions_per_entity);
  j["alias_rate"] = p.alias_rate;
  j["description_rate"] = p.description_rate;
  j["jv_child_rate"] = p.jv_child_rate;
  j["relationship_rate"] = p.relationship_rate;
  j["shared_stem_rate"] = p.shared_stem_rate;
  j["apposition_rate"] = p.apposition_rate;
  j["trigger_family_rate"] = p.trigger_family_rate;
  j["name_lexicon_size"] = p.name_lexicon_size;
  j["mentions_per_sentence"] = dist(p.mentions_per_sentence);
  return j;
}

// Missing fields keep their defaults; unknown fields are rejected.
inline generator_params generator_params_from_json(const json_util::json& j) {
  using json_util::object_reader;
  object_reader r(j, "");
  r.allow_only({"format", "n_texts", "entities_per_text", "mentions_per_entity", "alias_rate", "description_rate",
                "jv_child_rate", "relationship_rate", "shared_stem_rate", "apposition_rate", "trigger_family_rate",
                "name_lexicon_size", "mentions_per_sentence"});
  if (r.unsigned_int("format") != 1) object_reader::fail("format", "unsupported generator params version");
  generator_params p;
  auto dist = [&](std::string_view key, count_distribution& d) {
    if (auto* v = r.optional(key)) {
      object_reader dr(*v, r.sub(key));
      dr.allow_only({"min", "weights"});
      d.min = dr.unsigned_int("min");
      d.weights.clear();
      const auto& w = object_reader::as_array(dr.required("weights"), dr.sub("weights"));
      for (std::size_t i = 0; i < w.size(); ++i)
        d.weights.push_back(object_reader::as_number(w[i], dr.sub("weights") + "[" + std::to_string(i) + "]"));
    }
  };
  auto real = [&](std::string_view key, double& out) {
    if (auto* v = r.optional(key)) out = object_reader::as_number(*v, r.sub(key));
  };
  if (auto* v = r.optional("n_texts")) p.n_texts = object_reader::as_unsigned(*v, "n_texts");
  dist("entities_per_text", p.entities_per_text);
  dist("mentions_per_entity", p.mentions_per_entity);
  real("alias_rate", p.alias_rate);
  real("description_rate", p.description_rate);
  real("jv_child_rate", p.jv_child_rate);
  real("relationship_rate", p.relationship_rate);
  real("shared_stem_rate", p.shared_stem_rate);
  real("apposition_rate", p.apposition_rate);
  real("trigger_family_rate", p.trigger_family_rate);
  if (auto* v = r.optional("name_lexicon_size")) p.name_lexicon_size = object_reader::as_unsigned(*v, "name_lexicon_size");
  dist("mentions_per_sentence", p.mentions_per_sentence);
  check_generator_params(p);
  return p;
}

} // namespace coref
