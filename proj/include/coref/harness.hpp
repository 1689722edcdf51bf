#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "coref/chains.hpp"
#include "coref/corpus.hpp"
#include "coref/dtree.hpp"
#include "coref/json_util.hpp"
#include "coref/pairgen.hpp"
#include "coref/rules.hpp"
#include "coref/scorer.hpp"

namespace coref {

enum class engine { tree_unpruned, tree_pruned, rules };

inline std::string_view to_string(engine e) {
  switch (e) {
    case engine::tree_unpruned: return "tree-unpruned";
    case engine::tree_pruned: return "tree-pruned";
    case engine::rules: return "rules";
  }
  return "?";
}

inline engine parse_engine(std::string_view s) {
  if (s == "tree-unpruned") return engine::tree_unpruned;
  if (s == "tree-pruned") return engine::tree_pruned;
  if (s == "rules") return engine::rules;
  throw parse_error("unknown engine '" + std::string(s) + "'");
}

struct experiment_config {
  engine eng = engine::tree_unpruned;
  dtree::train_params train;
  link_strategy strategy = link_strategy::consecutive;
  aggregation agg = aggregation::macro;
  std::vector<double> betas = default_betas();
  std::uint64_t seed = 42;
};

// A decision for every pair of one document, and the positive links.
struct document_response {
  std::string doc_id;
  std::vector<phrase_pair> pairs;
  std::vector<bool> coreferent;
  std::vector<std::optional<int>> fired_rule;           // rules engine
  std::vector<dtree::class_counts> leaf_counts;          // tree engine
  link_set links;
};

inline document_response respond_rules(const document& doc, const std::vector<phrase_pair>& pairs) {
  document_response r;
  r.doc_id = doc.doc_id;
  r.pairs = pairs;
  for (const auto& p : pairs) {
    auto d = classify_rules(p, doc);
    r.coreferent.push_back(d.coreferent);
    r.fired_rule.push_back(d.fired_rule);
    if (d.coreferent) r.links.emplace(p.first, p.second);
  }
  return r;
}

inline document_response respond_tree(const dtree::decision_tree& tree, const std::string& doc_id,
                                      const std::vector<instance>& instances) {
  document_response r;
  r.doc_id = doc_id;
  for (const auto& inst : instances) {
    auto c = dtree::classify(tree, inst.features);
    bool pos = c.lbl == label::positive;
    r.pairs.push_back(inst.pair);
    r.coreferent.push_back(pos);
    r.leaf_counts.push_back(c.leaf_counts);
    if (pos) r.links.emplace(inst.pair.first, inst.pair.second);
  }
  return r;
}

struct fold_result {
  std::size_t fold = 0;
  std::string doc_id;
  bool skipped = false;
  std::size_t test_pairs = 0;
  std::size_t train_instances = 0;
  score_report report;
};

struct xval_result {
  engine eng = engine::tree_unpruned;
  std::vector<fold_result> folds;
  score_report aggregate;
};

// Per-document instance sets, computed once and shared by all folds.
class instance_table {
public:
  explicit instance_table(const corpus& docs) {
    for (const auto& d : docs) per_doc_.push_back(document_instances(d));
  }

  const std::vector<instance>& of(std::size_t doc) const { return per_doc_[doc]; }
  std::size_t size() const { return per_doc_.size(); }

  std::vector<instance> all_except(std::size_t held_out) const {
    std::vector<instance> out;
    for (std::size_t i = 0; i < per_doc_.size(); ++i)
      if (i != held_out) out.insert(out.end(), per_doc_[i].begin(), per_doc_[i].end());
    return out;
  }

private:
  std::vector<std::vector<instance>> per_doc_;
};

inline dtree::train_params engine_train_params(const experiment_config& cfg) {
  auto p = cfg.train;
  p.prune = cfg.eng == engine::tree_pruned;
  return p;
}

inline fold_result run_fold(const corpus& docs, const instance_table& table, std::size_t fold,
                            const experiment_config& cfg) {
  const auto& doc = docs[fold];
  fold_result fr;
  fr.fold = fold;
  fr.doc_id = doc.doc_id;
  const auto& test = table.of(fold);
  fr.test_pairs = test.size();

  document_response resp;
  if (cfg.eng == engine::rules) {
    std::vector<phrase_pair> pairs;
    for (const auto& i : test) pairs.push_back(i.pair);
    resp = respond_rules(doc, pairs);
  } else {
    auto train_set = table.all_except(fold);
    fr.train_instances = train_set.size();
    if (train_set.empty()) {
      throw data_error("fold " + std::to_string(fold) + " ('" + doc.doc_id + "'): no training instances");
    }
    auto tree = dtree::train(train_set, engine_train_params(cfg));
    resp = respond_tree(tree, doc.doc_id, test);
  }
  fr.skipped = test.empty();
  fr.report = score_document(key_chains(doc), resp.links, cfg.strategy, cfg.betas);
  return fr;
}

// One fold per document; each fold trains on every other document. Results
// are ordered by fold index whatever the degree of parallelism.
inline xval_result leave_one_out(const corpus& docs, const experiment_config& cfg, std::size_t jobs = 1,
                                 const instance_table* shared_table = nullptr) {
  if (docs.size() < 2) throw data_error("leave_one_out: need at least two documents");
  std::optional<instance_table> own;
  if (!shared_table) own.emplace(docs);
  const instance_table& table = shared_table ? *shared_table : *own;

  xval_result out;
  out.eng = cfg.eng;
  out.folds.resize(docs.size());
  jobs = std::max<std::size_t>(1, std::min(jobs, docs.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= docs.size()) return;
      try {
        out.folds[i] = run_fold(docs, table, i, cfg);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<score_report> kept;
  for (const auto& f : out.folds)
    if (!f.skipped) kept.push_back(f.report);
  if (kept.empty()) throw data_error("leave_one_out: every fold was skipped (no test pairs)");
  out.aggregate = aggregate(kept, cfg.agg, cfg.betas);
  return out;
}

struct comparison {
  experiment_config base;
  std::vector<xval_result> rows;  // unpruned, pruned, rules
};

inline comparison run_experiment(const corpus& docs, const experiment_config& base, std::size_t jobs = 1) {
  comparison c;
  c.base = base;
  instance_table table(docs);
  for (auto e : {engine::tree_unpruned, engine::tree_pruned, engine::rules}) {
    auto cfg = base;
    cfg.eng = e;
    c.rows.push_back(leave_one_out(docs, cfg, jobs, &table));
  }
  return c;
}

// ---- output ------------------------------------------------------------------

inline json_util::json document_report_json(const std::string& doc_id, const score_report& r) {
  json_util::json j = json_util::json::object();
  j["doc_id"] = doc_id;
  auto body = report_to_json(r);
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

inline json_util::json comparison_to_json(const comparison& c) {
  using json_util::json;
  json j = json::object();
  j["format"] = 1;
  j["strategy"] = to_string(c.base.strategy);
  j["aggregation"] = to_string(c.base.agg);
  j["seed"] = c.base.seed;
  j["train_params"] = json{{"min_instances_per_branch", c.base.train.min_instances_per_branch},
                           {"pruning_confidence", c.base.train.pruning_confidence}};
  json rows = json::array();
  for (const auto& row : c.rows) {
    json r = json::object();
    r["engine"] = to_string(row.eng);
    r["aggregate"] = report_to_json(row.aggregate);
    json folds = json::array();
    for (const auto& f : row.folds) {
      json fj = json::object();
      fj["fold"] = f.fold;
      fj["skipped"] = f.skipped;
      fj["test_pairs"] = f.test_pairs;
      fj["train_instances"] = f.train_instances;
      fj["report"] = document_report_json(f.doc_id, f.report);
      folds.push_back(std::move(fj));
    }
    r["folds"] = std::move(folds);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

inline std::string_view engine_display_name(engine e) {
  switch (e) {
    case engine::tree_unpruned: return "decision tree (unpruned)";
    case engine::tree_pruned: return "decision tree (pruned)";
    case engine::rules: return "rule baseline";
  }
  return "?";
}

inline std::string format_comparison_table(const comparison& c) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-26s %9s %10s", "System", "Recall", "Precision");
  os << buf;
  for (double b : c.base.betas) {
    std::snprintf(buf, sizeof buf, " %9s", ("F(" + format_beta(b) + ")").c_str());
    os << buf;
  }
  os << '\n';
  for (const auto& row : c.rows) {
    std::snprintf(buf, sizeof buf, "%-26s %9s %10s", std::string(engine_display_name(row.eng)).c_str(),
                  percent(row.aggregate.recall).c_str(), percent(row.aggregate.precision).c_str());
    os << buf;
    for (const auto& [b, f] : row.aggregate.f_measures) {
      std::snprintf(buf, sizeof buf, " %9s", percent(f).c_str());
      os << buf;
    }
    os << '\n';
  }
  std::size_t skipped = 0;
  for (const auto& f : c.rows.front().folds) skipped += f.skipped ? 1 : 0;
  os << "folds: " << c.rows.front().folds.size() << " (" << skipped << " skipped, no test pairs); aggregation: "
     << to_string(c.base.agg) << "; key links: " << to_string(c.base.strategy) << '\n';
  return os.str();
}

// ---- experiment config file --------------------------------------------------

inline experiment_config experiment_config_from_json(const json_util::json& j) {
  using json_util::object_reader;
  object_reader r(j, "");
  r.allow_only({"format", "engine", "strategy", "aggregation", "betas", "seed", "train_params"});
  if (r.unsigned_int("format") != 1) object_reader::fail("format", "unsupported experiment config version");
  experiment_config cfg;
  if (auto* v = r.optional("engine")) cfg.eng = parse_engine(object_reader::as_string(*v, "engine"));
  if (auto* v = r.optional("strategy")) cfg.strategy = parse_link_strategy(object_reader::as_string(*v, "strategy"));
  if (auto* v = r.optional("aggregation")) cfg.agg = parse_aggregation(object_reader::as_string(*v, "aggregation"));
  if (auto* v = r.optional("seed")) cfg.seed = object_reader::as_unsigned(*v, "seed");
  if (auto* v = r.optional("betas")) {
    object_reader::as_array(*v, "betas");
    cfg.betas.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      double b = object_reader::as_number((*v)[i], "betas[" + std::to_string(i) + "]");
      if (!(b > 0.0)) object_reader::fail("betas[" + std::to_string(i) + "]", "beta must be positive");
      cfg.betas.push_back(b);
    }
  }
  if (auto* v = r.optional("train_params")) {
    object_reader t(*v, "train_params");
    t.allow_only({"min_instances_per_branch", "pruning_confidence", "mean_gain_gate"});
    if (auto* x = t.optional("min_instances_per_branch"))
      cfg.train.min_instances_per_branch = object_reader::as_unsigned(*x, t.sub("min_instances_per_branch"));
    if (auto* x = t.optional("pruning_confidence"))
      cfg.train.pruning_confidence = object_reader::as_number(*x, t.sub("pruning_confidence"));
    if (auto* x = t.optional("mean_gain_gate"))
      cfg.train.mean_gain_gate = object_reader::as_bool(*x, t.sub("mean_gain_gate"));
  }
  return cfg;
}

} // namespace coref
