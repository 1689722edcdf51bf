#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coref/coref.hpp"

namespace support {

using namespace coref;

// Builds ASCII documents by locating phrase strings in the text.
class doc_builder {
public:
  doc_builder(std::string doc_id, std::string text) {
    doc_.doc_id = std::move(doc_id);
    doc_.text = std::move(text);
  }

  doc_builder& sentence(std::size_t begin, std::size_t end) {
    doc_.sentences.push_back({begin, end});
    return *this;
  }

  // Sentence covering the first occurrence of `from` up to the end of `to`.
  doc_builder& sentence(const std::string& from, const std::string& to) {
    auto b = doc_.text.find(from);
    auto e = doc_.text.find(to, b);
    return sentence(b, e + to.size());
  }

  phrase_annotation& phrase(const std::string& id, const std::string& str, const std::string& entity,
                            std::size_t occurrence = 0) {
    std::size_t at = doc_.text.find(str);
    for (std::size_t i = 0; i < occurrence; ++i) at = doc_.text.find(str, at + 1);
    phrase_annotation p;
    p.id = id;
    p.span = {at, at + str.size()};
    p.str = str;
    p.entity_ids = {entity};
    for (std::size_t s = 0; s < doc_.sentences.size(); ++s)
      if (doc_.sentences[s].begin <= at && at < doc_.sentences[s].end) p.sentence_index = s;
    doc_.phrases.push_back(std::move(p));
    return doc_.phrases.back();
  }

  document build() const {
    auto d = doc_;
    std::stable_sort(d.phrases.begin(), d.phrases.end(),
                     [](const auto& a, const auto& b) { return a.span < b.span; });
    return d;
  }

private:
  document doc_;
};

inline const std::string familymart_text =
    "FAMILYMART CO. OF SEIBU SAISON GROUP WILL OPEN A CONVENIENCE STORE IN TAIPEI FRIDAY "
    "IN A JOINT VENTURE WITH TAIWAN'S LARGEST CAR DEALER, THE COMPANY SAID WEDNESDAY.";

// The FAMILYMART / car dealer passage. The passage is split into two
// sentence ranges so the pair lands in different sentences, and the dealer
// carries the location name TAIWAN as its name slot.
inline document familymart_document() {
  doc_builder b("text-0970", familymart_text);
  b.sentence("FAMILYMART", "FRIDAY").sentence("IN A JOINT", "WEDNESDAY.");
  auto& fm = b.phrase("p1", "FAMILYMART CO.", "E1");
  fm.slots.name = "FAMILYMART CO.";
  fm.slots.type = entity_type::company;
  fm.slots.relationships = {relationship::jv_parent, relationship::child};
  auto& seibu = b.phrase("p2", "SEIBU SAISON GROUP", "E2");
  seibu.slots.name = "SEIBU SAISON GROUP";
  seibu.slots.type = entity_type::company;
  auto& jv = b.phrase("p3", "A JOINT VENTURE", "E3");
  jv.slots.type = entity_type::company;
  jv.slots.relationships = {relationship::jv_child};
  auto& dealer = b.phrase("p4", "TAIWAN'S LARGEST CAR DEALER", "E4");
  dealer.slots.name = "TAIWAN";
  dealer.slots.type = entity_type::company;
  dealer.slots.relationships = {relationship::jv_parent};
  dealer.slots.nationality = "Taiwan (COUNTRY)";
  return b.build();
}

// Expected feature values for the FAMILYMART / car dealer pair, in schema order.
inline const std::vector<feature_value>& familymart_expected_features() {
  using enum feature_value;
  static const std::vector<feature_value> v{yes, no, yes, no, no, no, no, no};
  return v;
}

// Connected components by breadth-first search over an adjacency list.
inline std::set<std::set<std::string>> bfs_components(const std::vector<std::string>& nodes,
                                                      const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& n : nodes) adj[n];
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::string> seen;
  std::set<std::set<std::string>> out;
  for (const auto& n : nodes) {
    if (seen.count(n)) continue;
    std::set<std::string> comp;
    std::vector<std::string> queue{n};
    seen.insert(n);
    for (std::size_t i = 0; i < queue.size(); ++i) {
      comp.insert(queue[i]);
      for (const auto& m : adj[queue[i]])
        if (seen.insert(m).second) queue.push_back(m);
    }
    out.insert(comp);
  }
  return out;
}

inline std::vector<std::string> node_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("n" + std::to_string(i));
  return out;
}

// Random partition of n named nodes into chains, as a key partition.
inline chain_partition random_partition(seeded_rng& rng, std::size_t n) {
  auto names = node_names(n);
  std::vector<std::size_t> keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back(rng.below(std::max<std::size_t>(1, n / 2 + 1)));
  return chain_partition::from_keys(names, keys);
}

inline link_set random_links(seeded_rng& rng, std::size_t n, double density) {
  link_set out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.chance(density)) out.emplace("n" + std::to_string(i), "n" + std::to_string(j));
  return out;
}

// Contradiction-free examples: labels come from a random lookup over the
// distinct feature vectors drawn, and every drawn vector appears at least
// twice.
inline std::vector<dtree::example> consistent_examples(seeded_rng& rng, const dtree::schema& sch,
                                                       std::size_t distinct) {
  std::map<std::vector<std::uint8_t>, label> concept_table;
  std::vector<dtree::example> rows;
  for (std::size_t i = 0; i < distinct; ++i) {
    std::vector<std::uint8_t> v;
    for (const auto& a : sch) v.push_back(static_cast<std::uint8_t>(rng.below(a.values.size())));
    auto [it, fresh] = concept_table.emplace(v, rng.chance(0.3) ? label::positive : label::negative);
    std::size_t copies = 2 + rng.below(3);
    for (std::size_t c = 0; c < copies; ++c) rows.push_back({v, it->second});
  }
  rng.shuffle(rows);
  return rows;
}

// Arbitrary (possibly contradictory) examples.
inline std::vector<dtree::example> random_examples(seeded_rng& rng, const dtree::schema& sch, std::size_t n) {
  std::vector<dtree::example> rows;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> v;
    for (const auto& a : sch) v.push_back(static_cast<std::uint8_t>(rng.below(a.values.size())));
    rows.push_back({v, rng.chance(0.4) ? label::positive : label::negative});
  }
  return rows;
}

} // namespace support
