#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coref/error.hpp"

namespace coref {

using phrase_id = std::string;

// Unordered phrase pair, stored with the lexicographically smaller id first.
struct link {
  phrase_id a;
  phrase_id b;

  link() = default;
  link(phrase_id x, phrase_id y) {
    if (x == y) throw data_error("self-link on phrase '" + x + "'");
    if (y < x) std::swap(x, y);
    a = std::move(x);
    b = std::move(y);
  }

  friend auto operator<=>(const link&, const link&) = default;
};

using link_set = std::set<link>;

enum class link_strategy { consecutive, all_pairs };

inline std::string_view to_string(link_strategy s) {
  return s == link_strategy::consecutive ? "consecutive" : "all-pairs";
}

inline link_strategy parse_link_strategy(std::string_view s) {
  if (s == "consecutive") return link_strategy::consecutive;
  if (s == "all-pairs" || s == "all_pairs") return link_strategy::all_pairs;
  throw parse_error("unknown link strategy '" + std::string(s) + "'");
}

class union_find {
public:
  explicit union_find(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (rank_[x] < rank_[y]) std::swap(x, y);
    parent_[y] = x;
    if (rank_[x] == rank_[y]) ++rank_[x];
  }

  std::size_t size() const { return parent_.size(); }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

// A partition of a document's phrases into coreference chains. Members keep
// document order; chains are ordered by their first member and list their
// members in document order.
class chain_partition {
public:
  chain_partition() = default;

  // `chain_key[i]` is any label for members[i]; equal labels share a chain.
  template <class Key>
  static chain_partition from_keys(std::vector<phrase_id> members, const std::vector<Key>& chain_key) {
    if (members.size() != chain_key.size()) throw data_error("chain_partition: key count mismatch");
    chain_partition p;
    p.members_ = std::move(members);
    std::map<Key, std::size_t> seen;
    for (std::size_t i = 0; i < p.members_.size(); ++i) {
      if (!p.position_.emplace(p.members_[i], i).second) {
        throw data_error("duplicate phrase id '" + p.members_[i] + "' in partition");
      }
      auto [it, inserted] = seen.emplace(chain_key[i], p.chains_.size());
      if (inserted) p.chains_.emplace_back();
      std::size_t chain = it->second;
      p.chains_[chain].push_back(p.members_[i]);
      p.chain_of_.push_back(chain);
    }
    return p;
  }

  const std::vector<phrase_id>& members() const { return members_; }
  const std::vector<std::vector<phrase_id>>& chains() const { return chains_; }

  bool contains(const phrase_id& id) const { return position_.count(id) != 0; }

  std::size_t position(const phrase_id& id) const {
    auto it = position_.find(id);
    if (it == position_.end()) throw data_error("unknown phrase id '" + id + "'");
    return it->second;
  }

  std::size_t chain_index(const phrase_id& id) const { return chain_of_[position(id)]; }

  // Chains as sorted sets of ids, for comparisons that ignore ordering.
  std::set<std::set<phrase_id>> as_sets() const {
    std::set<std::set<phrase_id>> out;
    for (const auto& c : chains_) out.emplace(c.begin(), c.end());
    return out;
  }

private:
  std::vector<phrase_id> members_;
  std::vector<std::vector<phrase_id>> chains_;
  std::vector<std::size_t> chain_of_;
  std::unordered_map<phrase_id, std::size_t> position_;
};

// Transitive closure of `links` over `universe` (document order) via union-find.
inline chain_partition close(const link_set& links, const std::vector<phrase_id>& universe) {
  std::unordered_map<phrase_id, std::size_t> index;
  for (std::size_t i = 0; i < universe.size(); ++i) index.emplace(universe[i], i);
  if (index.size() != universe.size()) throw data_error("close: duplicate phrase id in universe");

  union_find uf(universe.size());
  for (const auto& l : links) {
    auto ia = index.find(l.a);
    auto ib = index.find(l.b);
    if (ia == index.end()) throw data_error("close: unknown link endpoint '" + l.a + "'");
    if (ib == index.end()) throw data_error("close: unknown link endpoint '" + l.b + "'");
    uf.unite(ia->second, ib->second);
  }
  std::vector<std::size_t> roots(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) roots[i] = uf.find(i);
  return chain_partition::from_keys(universe, roots);
}

inline link_set explicit_links(const chain_partition& p, link_strategy strategy) {
  link_set out;
  for (const auto& chain : p.chains()) {
    if (strategy == link_strategy::consecutive) {
      for (std::size_t i = 1; i < chain.size(); ++i) out.emplace(chain[i - 1], chain[i]);
    } else {
      for (std::size_t i = 0; i < chain.size(); ++i)
        for (std::size_t j = i + 1; j < chain.size(); ++j) out.emplace(chain[i], chain[j]);
    }
  }
  return out;
}

inline bool in_closure(const chain_partition& p, const phrase_id& x, const phrase_id& y) {
  if (x == y) throw data_error("in_closure: self-link on phrase '" + x + "'");
  return p.chain_index(x) == p.chain_index(y);
}

inline bool in_closure(const chain_partition& p, const link& l) { return in_closure(p, l.a, l.b); }

} // namespace coref
