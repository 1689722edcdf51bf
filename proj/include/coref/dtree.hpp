#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coref/error.hpp"
#include "coref/json_util.hpp"
#include "coref/pairgen.hpp"

// Categorical decision-tree induction: multiway splits chosen by gain ratio,
// majority leaves, and pessimistic (upper binomial bound) subtree replacement.
namespace coref::dtree {

struct attribute {
  std::string name;
  std::vector<std::string> values;

  friend bool operator==(const attribute&, const attribute&) = default;
};

using schema = std::vector<attribute>;

// One training or query row: a value index per schema attribute.
struct example {
  std::vector<std::uint8_t> values;
  label lbl = label::negative;
};

struct class_counts {
  std::size_t positive = 0;
  std::size_t negative = 0;

  std::size_t total() const { return positive + negative; }
  void add(label l) { (l == label::positive ? positive : negative) += 1; }
  // Majority class; ties go to NEGATIVE.
  label majority() const { return positive > negative ? label::positive : label::negative; }
  std::size_t errors_as(label l) const { return l == label::positive ? negative : positive; }

  friend bool operator==(const class_counts&, const class_counts&) = default;
};

struct train_params {
  std::size_t min_instances_per_branch = 2;
  double pruning_confidence = 0.25;
  bool prune = false;
  // Restrict split candidates to attributes with at least the mean positive gain.
  bool mean_gain_gate = true;

  friend bool operator==(const train_params&, const train_params&) = default;
};

struct node {
  class_counts counts;
  label leaf_label = label::negative;
  std::optional<std::size_t> split;  // attribute index for internal nodes
  std::vector<node> branches;        // one per attribute value

  bool is_leaf() const { return !split.has_value(); }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& b : branches) n += b.size();
    return n;
  }

  friend bool operator==(const node&, const node&) = default;
};

struct decision_tree {
  schema attributes;
  train_params params;
  node root;

  std::size_t node_count() const { return root.size(); }

  friend bool operator==(const decision_tree&, const decision_tree&) = default;
};

struct classification {
  label lbl;
  class_counts leaf_counts;
};

inline double entropy(const class_counts& c) {
  const double n = static_cast<double>(c.total());
  double h = 0.0;
  for (auto k : {c.positive, c.negative}) {
    if (k == 0 || k == c.total()) continue;
    double p = static_cast<double>(k) / n;
    h -= p * std::log2(p);
  }
  return h;
}

struct split_score {
  double gain = 0.0;
  double split_info = 0.0;
  std::optional<double> ratio;  // undefined when split_info == 0
};

inline split_score score_split(const class_counts& all, const std::vector<class_counts>& branches) {
  split_score s;
  const double n = static_cast<double>(all.total());
  if (all.total() == 0) return s;
  double remainder = 0.0;
  for (const auto& b : branches) {
    if (b.total() == 0) continue;
    double w = static_cast<double>(b.total()) / n;
    remainder += w * entropy(b);
    s.split_info -= w * std::log2(w);
  }
  s.gain = entropy(all) - remainder;
  if (s.split_info > 0.0) s.ratio = s.gain / s.split_info;
  return s;
}

namespace detail {

inline void check_examples(std::span<const example> rows, const schema& sch) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.values.size() != sch.size()) {
      throw data_error("example " + std::to_string(i) + ": has " + std::to_string(r.values.size()) +
                       " values, schema has " + std::to_string(sch.size()) + " attributes");
    }
    for (std::size_t a = 0; a < sch.size(); ++a) {
      if (r.values[a] >= sch[a].values.size()) {
        throw data_error("example " + std::to_string(i) + ": value index out of range for " + sch[a].name);
      }
    }
    if (r.lbl == label::unlabeled) throw data_error("example " + std::to_string(i) + ": unlabeled");
  }
}

inline class_counts count(std::span<const example* const> rows) {
  class_counts c;
  for (const auto* r : rows) c.add(r->lbl);
  return c;
}

inline std::vector<class_counts> branch_counts(std::span<const example* const> rows, std::size_t attr,
                                               std::size_t arity) {
  std::vector<class_counts> out(arity);
  for (const auto* r : rows) out[r->values[attr]].add(r->lbl);
  return out;
}

// Gains at or below this are treated as zero (floating-point residue of
// class-independent splits).
inline constexpr double gain_epsilon = 1e-12;

class builder {
public:
  builder(const schema& sch, const train_params& params) : sch_(sch), params_(params), used_(sch.size(), false) {}

  node build(std::vector<const example*> rows, label parent_label) {
    node n;
    n.counts = count(rows);
    n.leaf_label = n.counts.total() == 0 ? parent_label : n.counts.majority();
    if (n.counts.positive == 0 || n.counts.negative == 0) return n;

    struct candidate {
      std::size_t attr;
      split_score score;
    };
    std::vector<candidate> candidates;
    for (std::size_t a = 0; a < sch_.size(); ++a) {
      if (used_[a]) continue;
      auto branches = branch_counts(rows, a, sch_[a].values.size());
      auto populated = std::count_if(branches.begin(), branches.end(), [&](const class_counts& b) {
        return b.total() >= params_.min_instances_per_branch && b.total() > 0;
      });
      if (populated < 2) continue;
      auto s = score_split(n.counts, branches);
      if (s.gain > gain_epsilon && s.ratio) candidates.push_back({a, s});
    }
    if (candidates.empty()) return n;

    double threshold = 0.0;
    if (params_.mean_gain_gate) {
      for (const auto& c : candidates) threshold += c.score.gain;
      threshold /= static_cast<double>(candidates.size());
    }
    const candidate* best = nullptr;
    for (const auto& c : candidates) {
      if (c.score.gain + gain_epsilon < threshold) continue;
      if (!best || *c.score.ratio > *best->score.ratio + gain_epsilon) best = &c;
    }

    const std::size_t attr = best->attr;
    const std::size_t arity = sch_[attr].values.size();
    std::vector<std::vector<const example*>> parts(arity);
    for (const auto* r : rows) parts[r->values[attr]].push_back(r);

    n.split = attr;
    used_[attr] = true;
    n.branches.reserve(arity);
    for (auto& part : parts) n.branches.push_back(build(std::move(part), n.leaf_label));
    used_[attr] = false;
    return n;
  }

private:
  const schema& sch_;
  const train_params& params_;
  std::vector<bool> used_;
};

} // namespace detail

inline split_score gain_ratio(std::span<const example> rows, std::size_t attr, const schema& sch) {
  if (rows.empty()) throw data_error("gain_ratio: empty instance set");
  if (attr >= sch.size()) throw data_error("gain_ratio: attribute index out of range");
  detail::check_examples(rows, sch);
  std::vector<const example*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  return score_split(detail::count(ptrs), detail::branch_counts(ptrs, attr, sch[attr].values.size()));
}

// Upper limit of the (one-sided, exact binomial) confidence interval on the
// error rate of a leaf that misclassifies `errors` of `n` cases: the p with
// P(X <= errors | n, p) = confidence.
inline double upper_error_bound(std::size_t n, std::size_t errors, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw data_error("confidence must lie in (0,1)");
  if (n == 0) return 0.0;
  if (errors >= n) return 1.0;
  const double nn = static_cast<double>(n);
  if (errors == 0) return 1.0 - std::pow(confidence, 1.0 / nn);

  auto cdf = [&](double p) {
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double sum = 0.0;
    for (std::size_t k = 0; k <= errors; ++k) {
      const double kk = static_cast<double>(k);
      double log_pmf = std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) + kk * lp + (nn - kk) * lq;
      sum += std::exp(log_pmf);
    }
    return sum;
  };
  double lo = static_cast<double>(errors) / nn;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) > confidence) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double pessimistic_errors(const class_counts& c, label as, double confidence) {
  return static_cast<double>(c.total()) * upper_error_bound(c.total(), c.errors_as(as), confidence);
}

namespace detail {

inline double prune_node(node& n, std::span<const example* const> rows, double confidence) {
  n.counts = count(rows);
  if (n.counts.total() > 0) n.leaf_label = n.counts.majority();
  const double as_leaf = pessimistic_errors(n.counts, n.leaf_label, confidence);
  if (n.is_leaf()) return as_leaf;

  std::vector<std::vector<const example*>> parts(n.branches.size());
  for (const auto* r : rows) parts[r->values[*n.split]].push_back(r);
  double as_subtree = 0.0;
  for (std::size_t v = 0; v < n.branches.size(); ++v) as_subtree += prune_node(n.branches[v], parts[v], confidence);

  if (as_leaf <= as_subtree + 1e-9) {
    n.split.reset();
    n.branches.clear();
    return as_leaf;
  }
  return as_subtree;
}

} // namespace detail

// Bottom-up subtree replacement against the pessimistic error estimate.
inline decision_tree prune(decision_tree tree, std::span<const example> rows, double confidence) {
  detail::check_examples(rows, tree.attributes);
  std::vector<const example*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  detail::prune_node(tree.root, ptrs, confidence);
  tree.params.prune = true;
  tree.params.pruning_confidence = confidence;
  return tree;
}

inline decision_tree train(std::span<const example> rows, const schema& sch, const train_params& params) {
  if (rows.empty()) throw data_error("train: empty instance set");
  if (sch.empty()) throw data_error("train: empty schema");
  if (params.min_instances_per_branch == 0) throw data_error("train: min_instances_per_branch must be >= 1");
  if (!(params.pruning_confidence > 0.0 && params.pruning_confidence < 1.0))
    throw data_error("train: pruning_confidence must lie in (0,1)");
  detail::check_examples(rows, sch);

  std::vector<const example*> ptrs;
  for (const auto& r : rows) ptrs.push_back(&r);
  decision_tree tree;
  tree.attributes = sch;
  tree.params = params;
  tree.params.prune = false;
  tree.root = detail::builder(sch, params).build(std::move(ptrs), label::negative);
  if (params.prune) tree = prune(std::move(tree), rows, params.pruning_confidence);
  return tree;
}

inline classification classify(const decision_tree& tree, std::span<const std::uint8_t> values) {
  if (values.size() != tree.attributes.size()) throw data_error("classify: value count does not match schema");
  const node* n = &tree.root;
  while (!n->is_leaf()) {
    auto v = values[*n->split];
    if (v >= n->branches.size()) throw data_error("classify: value index out of range");
    n = &n->branches[v];
  }
  return {n->leaf_label, n->counts};
}

// Lookup by attribute name, so callers need not know the schema order.
inline classification classify(const decision_tree& tree, const std::map<std::string, std::string>& values) {
  std::vector<std::uint8_t> idx(tree.attributes.size());
  for (std::size_t a = 0; a < tree.attributes.size(); ++a) {
    const auto& attr = tree.attributes[a];
    auto it = values.find(attr.name);
    if (it == values.end()) throw data_error("classify: missing attribute " + attr.name);
    auto pos = std::find(attr.values.begin(), attr.values.end(), it->second);
    if (pos == attr.values.end()) throw data_error("classify: " + attr.name + ": unknown value '" + it->second + "'");
    idx[a] = static_cast<std::uint8_t>(pos - attr.values.begin());
  }
  return classify(tree, idx);
}

// ---- model file -----------------------------------------------------------

inline constexpr std::string_view model_format = "coref-dtree";
inline constexpr int model_version = 1;

namespace detail {

using json_util::json;
using json_util::object_reader;

inline json counts_to_json(const class_counts& c) {
  return json{{"positive", c.positive}, {"negative", c.negative}};
}

inline json node_to_json(const node& n, const schema& sch) {
  json j = json::object();
  if (n.split) j["split"] = sch[*n.split].name;
  j["label"] = to_string(n.leaf_label);
  j["counts"] = counts_to_json(n.counts);
  if (n.split) {
    json b = json::object();
    for (std::size_t v = 0; v < n.branches.size(); ++v) b[sch[*n.split].values[v]] = node_to_json(n.branches[v], sch);
    j["branches"] = std::move(b);
  }
  return j;
}

inline node node_from_json(const json& j, const schema& sch, std::vector<bool>& used, const std::string& path) {
  object_reader r(j, path);
  r.allow_only({"split", "label", "counts", "branches"});
  node n;
  auto lbl = parse_label(r.string("label"));
  if (!lbl || *lbl == label::unlabeled) object_reader::fail(r.sub("label"), "expected POSITIVE or NEGATIVE");
  n.leaf_label = *lbl;
  object_reader c(r.required("counts"), r.sub("counts"));
  c.allow_only({"positive", "negative"});
  n.counts.positive = c.unsigned_int("positive");
  n.counts.negative = c.unsigned_int("negative");

  if (!r.has("split")) {
    if (r.has("branches")) object_reader::fail(r.sub("branches"), "leaf node with branches");
    return n;
  }
  auto name = r.string("split");
  auto it = std::find_if(sch.begin(), sch.end(), [&](const attribute& a) { return a.name == name; });
  if (it == sch.end()) object_reader::fail(r.sub("split"), "unknown attribute '" + name + "'");
  std::size_t attr = static_cast<std::size_t>(it - sch.begin());
  if (used[attr]) object_reader::fail(r.sub("split"), "attribute '" + name + "' reused on its own path");
  n.split = attr;

  object_reader b(r.required("branches"), r.sub("branches"));
  if (r.required("branches").size() != it->values.size())
    object_reader::fail(r.sub("branches"), "branches must cover every value of " + name);
  used[attr] = true;
  for (const auto& v : it->values) n.branches.push_back(node_from_json(b.required(v), sch, used, b.sub(v)));
  used[attr] = false;
  return n;
}

} // namespace detail

inline json_util::json tree_to_json(const decision_tree& tree) {
  using detail::json;
  json j = json::object();
  j["format"] = model_format;
  j["version"] = model_version;
  j["params"] = json{{"min_instances_per_branch", tree.params.min_instances_per_branch},
                     {"pruning_confidence", tree.params.pruning_confidence},
                     {"prune", tree.params.prune},
                     {"mean_gain_gate", tree.params.mean_gain_gate}};
  json sch = json::array();
  for (const auto& a : tree.attributes) sch.push_back(json{{"name", a.name}, {"values", a.values}});
  j["schema"] = std::move(sch);
  j["root"] = detail::node_to_json(tree.root, tree.attributes);
  return j;
}

inline std::string serialize_tree(const decision_tree& tree) { return tree_to_json(tree).dump(2) + "\n"; }

inline decision_tree deserialize_tree(std::string_view text) {
  using detail::object_reader;
  auto j = json_util::parse_json(text, "model");
  object_reader r(j, "");
  r.allow_only({"format", "version", "params", "schema", "root"});
  if (r.string("format") != model_format) object_reader::fail("format", "not a decision-tree model file");
  const auto& ver = r.required("version");
  if (!ver.is_number_integer() || ver.get<long long>() != model_version)
    object_reader::fail("version", "unsupported model version " + ver.dump());

  decision_tree tree;
  object_reader p(r.required("params"), "params");
  p.allow_only({"min_instances_per_branch", "pruning_confidence", "prune", "mean_gain_gate"});
  tree.params.min_instances_per_branch = p.unsigned_int("min_instances_per_branch");
  tree.params.pruning_confidence = object_reader::as_number(p.required("pruning_confidence"), "params.pruning_confidence");
  tree.params.prune = object_reader::as_bool(p.required("prune"), "params.prune");
  if (auto* g = p.optional("mean_gain_gate")) tree.params.mean_gain_gate = object_reader::as_bool(*g, "params.mean_gain_gate");

  const auto& sch = object_reader::as_array(r.required("schema"), "schema");
  for (std::size_t i = 0; i < sch.size(); ++i) {
    auto path = "schema[" + std::to_string(i) + "]";
    object_reader a(sch[i], path);
    a.allow_only({"name", "values"});
    attribute attr;
    attr.name = a.string("name");
    const auto& vals = object_reader::as_array(a.required("values"), a.sub("values"));
    for (std::size_t k = 0; k < vals.size(); ++k)
      attr.values.push_back(object_reader::as_string(vals[k], a.sub("values") + "[" + std::to_string(k) + "]"));
    if (attr.values.empty() || attr.values.size() > 255) object_reader::fail(a.sub("values"), "bad value count");
    tree.attributes.push_back(std::move(attr));
  }
  std::vector<bool> used(tree.attributes.size(), false);
  tree.root = detail::node_from_json(r.required("root"), tree.attributes, used, "root");
  return tree;
}

// ---- adapters for pair-feature instances -----------------------------------

inline schema pair_feature_schema() {
  schema sch;
  for (std::size_t i = 0; i < feature_count; ++i) {
    attribute a;
    a.name = std::string(feature_specs[i].name);
    for (auto v : feature_domain(static_cast<feature>(i))) a.values.emplace_back(to_string(v));
    sch.push_back(std::move(a));
  }
  return sch;
}

inline std::vector<std::uint8_t> encode_features(const feature_vector& f) {
  std::vector<std::uint8_t> out(feature_count);
  for (std::size_t i = 0; i < feature_count; ++i) {
    auto domain = feature_domain(static_cast<feature>(i));
    auto it = std::find(domain.begin(), domain.end(), f.at(i));
    if (it == domain.end()) throw data_error(std::string(feature_specs[i].name) + ": value outside domain");
    out[i] = static_cast<std::uint8_t>(it - domain.begin());
  }
  return out;
}

inline example to_example(const instance& inst) { return {encode_features(inst.features), inst.lbl}; }

inline std::vector<example> to_examples(std::span<const instance> instances) {
  std::vector<example> out;
  out.reserve(instances.size());
  for (const auto& i : instances) out.push_back(to_example(i));
  return out;
}

inline decision_tree train(std::span<const instance> instances, const train_params& params) {
  auto rows = to_examples(instances);
  return train(rows, pair_feature_schema(), params);
}

inline classification classify(const decision_tree& tree, const feature_vector& f) {
  if (tree.attributes != pair_feature_schema()) {
    std::map<std::string, std::string> named;
    for (std::size_t i = 0; i < feature_count; ++i)
      named.emplace(std::string(feature_specs[i].name), std::string(to_string(f.at(i))));
    return classify(tree, named);
  }
  auto enc = encode_features(f);
  return classify(tree, std::span<const std::uint8_t>(enc));
}

} // namespace coref::dtree
