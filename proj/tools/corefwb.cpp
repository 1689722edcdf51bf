// corefwb: staged coreference pipeline (generate, pairs, train, classify,
// score, xval, trace) and the annotation service.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"

#include "coref/annosvc.hpp"
#include "coref/coref.hpp"

namespace {

namespace fs = std::filesystem;
using namespace coref;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_internal = 3;

bool quiet = false;

void note(const std::string& msg) {
  if (!quiet) std::cerr << "corefwb: " << msg << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error(path + ": cannot open");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Writes to `path` via a temporary sibling and rename, or to stdout for "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  fs::path p(path);
  auto tmp = p;
  tmp += ".partial";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw data_error(path + ": cannot write");
      out << content;
      out.flush();
      if (!out) throw data_error(path + ": write failed");
    }
    fs::rename(tmp, p);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

corpus load_corpus(const std::string& path) {
  std::istringstream in(read_file(path));
  corpus_load loaded;
  try {
    loaded = parse_corpus(in);
  } catch (const std::runtime_error& e) {
    throw data_error(path + ": " + e.what());
  }
  for (const auto& w : loaded.warnings) note(path + ": doc '" + w.doc_id + "' phrase '" + w.phrase + "': " + w.message);
  return std::move(loaded.documents);
}

std::vector<instance> load_instances(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    return read_instances(in);
  } catch (const std::runtime_error& e) {
    throw data_error(path + ": " + e.what());
  }
}

json_util::json load_json(const std::string& path) { return json_util::parse_json(read_file(path), path); }

const document& find_document(const corpus& docs, const std::string& id) {
  for (const auto& d : docs)
    if (d.doc_id == id) return d;
  throw data_error("no document '" + id + "' in corpus");
}

std::vector<double> parse_betas(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t used = 0;
      double b = 0.0;
      try {
        b = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !(b > 0.0)) throw CLI::ValidationError("--beta", "not a positive number: " + tok);
      out.push_back(b);
    }
  }
  if (out.empty()) throw CLI::ValidationError("--beta", "empty list");
  return out;
}

// ---- subcommands -------------------------------------------------------------

struct generate_opts {
  std::string params_file;
  std::uint64_t seed = 42;
  std::optional<std::size_t> n_texts;
  std::string out;
};

void cmd_generate(const generate_opts& o) {
  generator_params params;
  if (!o.params_file.empty()) params = generator_params_from_json(load_json(o.params_file));
  if (o.n_texts) params.n_texts = *o.n_texts;
  std::ostringstream os;
  write_corpus(os, generate_corpus(params, o.seed));
  emit(o.out, os.str());
}

struct pairs_opts {
  std::string corpus_file;
  std::vector<std::string> docs;
  std::vector<std::string> exclude;
  std::string out;
};

void cmd_pairs(const pairs_opts& o) {
  auto docs = load_corpus(o.corpus_file);
  std::set<std::string> keep(o.docs.begin(), o.docs.end());
  std::set<std::string> drop(o.exclude.begin(), o.exclude.end());
  for (const auto& id : keep) find_document(docs, id);
  for (const auto& id : drop) find_document(docs, id);
  std::vector<instance> all;
  for (const auto& d : docs) {
    if (!keep.empty() && !keep.count(d.doc_id)) continue;
    if (drop.count(d.doc_id)) continue;
    auto inst = document_instances(d);
    all.insert(all.end(), inst.begin(), inst.end());
  }
  std::ostringstream os;
  write_instances(os, all);
  emit(o.out, os.str());
}

struct train_opts {
  std::string instances_file;
  bool prune = false;
  double cf = 0.25;
  std::size_t min_instances = 2;
  bool no_gain_gate = false;
  std::string out;
};

void cmd_train(const train_opts& o) {
  auto inst = load_instances(o.instances_file);
  if (inst.empty()) throw data_error(o.instances_file + ": no instances to train on");
  dtree::train_params p;
  p.prune = o.prune;
  p.pruning_confidence = o.cf;
  p.min_instances_per_branch = o.min_instances;
  p.mean_gain_gate = !o.no_gain_gate;
  auto tree = dtree::train(inst, p);
  note("trained on " + std::to_string(inst.size()) + " instances, " + std::to_string(tree.node_count()) + " nodes");
  emit(o.out, dtree::serialize_tree(tree));
}

struct classify_opts {
  std::string engine_name = "tree";
  std::string model;
  std::string corpus_file;
  std::string instances_file;
  std::vector<std::string> docs;
  std::string out;
};

void cmd_classify(const classify_opts& o) {
  std::vector<document_response> responses;
  std::string label;
  if (o.engine_name == "rules") {
    if (o.corpus_file.empty()) throw CLI::ValidationError("classify", "--engine rules needs a corpus file");
    if (!o.model.empty()) throw CLI::ValidationError("classify", "--model is only used with --engine tree");
    label = "rules";
    auto docs = load_corpus(o.corpus_file);
    std::set<std::string> keep(o.docs.begin(), o.docs.end());
    for (const auto& id : keep) find_document(docs, id);
    for (const auto& d : docs)
      if (keep.empty() || keep.count(d.doc_id)) responses.push_back(respond_rules(d, generate_pairs(d)));
  } else {
    if (o.model.empty()) throw CLI::ValidationError("classify", "--engine tree needs --model");
    if (o.corpus_file.empty() == o.instances_file.empty())
      throw CLI::ValidationError("classify", "give exactly one of a corpus file or --instances");
    auto tree = dtree::deserialize_tree(read_file(o.model));
    label = tree.params.prune ? "tree-pruned" : "tree-unpruned";
    std::set<std::string> keep(o.docs.begin(), o.docs.end());
    // Group instances by document, keeping first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<instance>> by_doc;
    if (!o.corpus_file.empty()) {
      auto docs = load_corpus(o.corpus_file);
      for (const auto& id : keep) find_document(docs, id);
      for (const auto& d : docs) {
        if (!keep.empty() && !keep.count(d.doc_id)) continue;
        order.push_back(d.doc_id);
        by_doc[d.doc_id] = document_instances(d);
      }
    } else {
      for (auto& inst : load_instances(o.instances_file)) {
        if (!keep.empty() && !keep.count(inst.pair.doc_id)) continue;
        auto [it, fresh] = by_doc.try_emplace(inst.pair.doc_id);
        if (fresh) order.push_back(inst.pair.doc_id);
        it->second.push_back(std::move(inst));
      }
      for (const auto& id : keep) {
        if (by_doc.count(id)) continue;
        order.push_back(id);
        by_doc[id];
      }
    }
    for (const auto& id : order) responses.push_back(respond_tree(tree, id, by_doc[id]));
  }
  std::ostringstream os;
  for (const auto& r : responses) os << response_to_json(r, label).dump() << '\n';
  emit(o.out, os.str());
}

struct score_opts {
  std::string corpus_file;
  std::string response_file;
  std::string strategy = "consecutive";
  std::string agg = "macro";
  std::vector<std::string> betas;
  std::vector<std::string> docs;
  std::string out;
};

void cmd_score(const score_opts& o) {
  auto docs = load_corpus(o.corpus_file);
  if (!o.docs.empty()) {
    corpus subset;
    for (const auto& id : o.docs) subset.push_back(find_document(docs, id));
    docs = std::move(subset);
  }
  std::map<std::string, link_set> responses;
  {
    std::istringstream in(read_file(o.response_file));
    try {
      responses = read_responses(in);
    } catch (const std::runtime_error& e) {
      throw data_error(o.response_file + ": " + e.what());
    }
  }
  if (!o.docs.empty())
    std::erase_if(responses, [&](const auto& kv) { return std::find(o.docs.begin(), o.docs.end(), kv.first) == o.docs.end(); });
  auto betas = o.betas.empty() ? default_betas() : parse_betas(o.betas);
  auto agg = parse_aggregation(o.agg);
  auto scores = score_corpus(docs, responses, parse_link_strategy(o.strategy), agg, betas);
  std::ostringstream os;
  for (std::size_t i = 0; i < scores.doc_ids.size(); ++i) {
    auto j = document_report_json(scores.doc_ids[i], scores.reports[i]);
    if (scores.skipped[i]) j["skipped"] = true;
    os << j.dump() << '\n';
  }
  json_util::json a = json_util::json::object();
  a["aggregate"] = to_string(agg);
  if (scores.aggregate) {
    auto body = report_to_json(*scores.aggregate);
    for (auto& [k, v] : body.items()) a[k] = v;
  } else {
    a["undefined"] = true;
    note("aggregate undefined: no document has key links or response links");
  }
  os << a.dump() << '\n';
  emit(o.out, os.str());
}

struct xval_opts {
  std::string corpus_file;
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string strategy;
  std::string agg;
  std::vector<std::string> betas;
  std::optional<double> cf;
  std::optional<std::size_t> min_instances;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string format = "table";
  std::string out;
};

void cmd_xval(const xval_opts& o) {
  experiment_config cfg;
  if (!o.config_file.empty()) cfg = experiment_config_from_json(load_json(o.config_file));
  if (o.seed) cfg.seed = *o.seed;
  if (!o.strategy.empty()) cfg.strategy = parse_link_strategy(o.strategy);
  if (!o.agg.empty()) cfg.agg = parse_aggregation(o.agg);
  if (!o.betas.empty()) cfg.betas = parse_betas(o.betas);
  if (o.cf) cfg.train.pruning_confidence = *o.cf;
  if (o.min_instances) cfg.train.min_instances_per_branch = *o.min_instances;
  auto docs = load_corpus(o.corpus_file);
  auto result = run_experiment(docs, cfg, o.jobs);
  emit(o.out, o.format == "json" ? comparison_to_json(result).dump(2) + "\n" : format_comparison_table(result));
}

struct trace_opts {
  std::string corpus_file;
  std::string doc;
  std::string first;
  std::string second;
  std::string out;
};

void cmd_trace(const trace_opts& o) {
  auto docs = load_corpus(o.corpus_file);
  const auto& d = find_document(docs, o.doc);
  if (o.first.empty() != o.second.empty()) throw CLI::ValidationError("trace", "--first and --second go together");
  std::ostringstream os;
  for (const auto& p : generate_pairs(d)) {
    if (!o.first.empty()) {
      bool match = (p.first == o.first && p.second == o.second) || (p.first == o.second && p.second == o.first);
      if (!match) continue;
    }
    os << format_rule_trace(rule_trace(p, d));
  }
  if (!o.first.empty() && os.str().empty())
    throw data_error("no pair (" + o.first + ", " + o.second + ") in '" + o.doc + "'");
  emit(o.out, os.str());
}

struct serve_opts {
  std::string dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string import_file;
  std::string static_dir;
};

void cmd_serve(const serve_opts& o) {
  if (!o.import_file.empty()) {
    auto docs = load_corpus(o.import_file);
    annosvc::annotation_store::import_corpus(o.dir, docs);
    note("imported " + std::to_string(docs.size()) + " documents into " + o.dir);
  }
  annosvc::annotation_store store(o.dir);
  httplib::Server server;
  annosvc::register_routes(server, store);
  if (!o.static_dir.empty() && !server.set_mount_point("/", o.static_dir))
    throw data_error(o.static_dir + ": not a directory");
  int port = o.port;
  if (port == 0) {
    port = server.bind_to_any_port(o.host);
  } else if (!server.bind_to_port(o.host, port)) {
    port = -1;
  }
  if (port < 0) throw data_error("cannot bind " + o.host + ":" + std::to_string(o.port));
  // The bound address goes to stderr even with -q so callers can find a random port.
  std::cerr << "corefwb: listening on " << o.host << ":" << port << std::endl;
  server.listen_after_bind();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise coreference pipeline: corpus generation, features, learning, scoring"};
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", quiet, "suppress notes on stderr");
  app.fallthrough();

  auto strategy_check = CLI::IsMember({"consecutive", "all-pairs"});
  auto agg_check = CLI::IsMember({"macro", "micro"});

  generate_opts gen;
  auto* g = app.add_subcommand("generate", "write a synthetic annotated corpus");
  g->add_option("--params", gen.params_file, "generator parameter file (JSON)")->check(CLI::ExistingFile);
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--texts", gen.n_texts, "override the number of texts");
  g->add_option("-o,--out", gen.out, "output corpus file (default stdout)");

  pairs_opts pairs;
  auto* pa = app.add_subcommand("pairs", "dump labeled pair instances as TSV");
  pa->add_option("corpus", pairs.corpus_file, "corpus file")->required();
  pa->add_option("--doc", pairs.docs, "only these documents");
  pa->add_option("--exclude-doc", pairs.exclude, "skip these documents");
  pa->add_option("-o,--out", pairs.out, "output file (default stdout)");

  train_opts train;
  auto* tr = app.add_subcommand("train", "induce a decision tree from an instance dump");
  tr->add_option("instances", train.instances_file, "instance TSV")->required();
  tr->add_flag("--prune", train.prune, "apply pessimistic subtree replacement");
  tr->add_option("--cf", train.cf, "pruning confidence")->check(CLI::Range(0.0, 1.0));
  tr->add_option("--min-instances", train.min_instances, "minimum instances in two branches of a split");
  tr->add_flag("--no-gain-gate", train.no_gain_gate, "consider every attribute, not just above-mean gain");
  tr->add_option("-o,--out", train.out, "model file (default stdout)");

  classify_opts cls;
  auto* cl = app.add_subcommand("classify", "classify pairs; writes response links and decisions");
  cl->add_option("corpus", cls.corpus_file, "corpus file");
  cl->add_option("--engine", cls.engine_name, "rules or tree")->check(CLI::IsMember({"rules", "tree"}));
  cl->add_option("--model", cls.model, "tree model file");
  cl->add_option("--instances", cls.instances_file, "instance TSV instead of a corpus (tree engine)");
  cl->add_option("--doc", cls.docs, "only these documents");
  cl->add_option("-o,--out", cls.out, "output file (default stdout)");

  score_opts sc;
  auto* s = app.add_subcommand("score", "score response links against key chains");
  s->add_option("--corpus", sc.corpus_file, "key corpus")->required();
  s->add_option("--response", sc.response_file, "response file from classify")->required();
  s->add_option("--strategy", sc.strategy, "explicit key links")->check(strategy_check);
  s->add_option("--agg", sc.agg, "aggregation")->check(agg_check);
  s->add_option("--beta", sc.betas, "F-measure betas, comma separated");
  s->add_option("--doc", sc.docs, "only these documents");
  s->add_option("-o,--out", sc.out, "output file (default stdout)");

  xval_opts xv;
  auto* x = app.add_subcommand("xval", "leave-one-text-out comparison of the three engines");
  x->add_option("corpus", xv.corpus_file, "corpus file")->required();
  x->add_option("--config", xv.config_file, "experiment config (JSON)")->check(CLI::ExistingFile);
  x->add_option("--seed", xv.seed, "seed recorded with the experiment");
  x->add_option("--strategy", xv.strategy, "explicit key links")->check(strategy_check);
  x->add_option("--agg", xv.agg, "aggregation")->check(agg_check);
  x->add_option("--beta", xv.betas, "F-measure betas, comma separated");
  x->add_option("--cf", xv.cf, "pruning confidence")->check(CLI::Range(0.0, 1.0));
  x->add_option("--min-instances", xv.min_instances, "minimum instances in two branches of a split");
  x->add_option("--jobs", xv.jobs, "parallel folds")->check(CLI::PositiveNumber);
  x->add_option("--format", xv.format, "table or json")->check(CLI::IsMember({"table", "json"}));
  x->add_option("-o,--out", xv.out, "output file (default stdout)");

  trace_opts tc;
  auto* t = app.add_subcommand("trace", "show every rule antecedent for a document's pairs");
  t->add_option("corpus", tc.corpus_file, "corpus file")->required();
  t->add_option("--doc", tc.doc, "document id")->required();
  t->add_option("--first", tc.first, "first phrase id");
  t->add_option("--second", tc.second, "second phrase id");
  t->add_option("-o,--out", tc.out, "output file (default stdout)");

  serve_opts sv;
  auto* se = app.add_subcommand("serve", "run the annotation HTTP service");
  se->add_option("dir", sv.dir, "store directory")->required();
  se->add_option("--host", sv.host, "bind address");
  se->add_option("--port", sv.port, "port, 0 for any")->check(CLI::Range(0, 65535));
  se->add_option("--import", sv.import_file, "seed the store from a corpus file first");
  se->add_option("--static", sv.static_dir, "serve the built UI from this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*g) cmd_generate(gen);
    else if (*pa) cmd_pairs(pairs);
    else if (*tr) cmd_train(train);
    else if (*cl) cmd_classify(cls);
    else if (*s) cmd_score(sc);
    else if (*x) cmd_xval(xv);
    else if (*t) cmd_trace(tc);
    else if (*se) cmd_serve(sv);
  } catch (const CLI::Error& e) {
    std::cerr << "corefwb: " << e.what() << '\n';
    return exit_usage;
  } catch (const parse_error& e) {
    std::cerr << "corefwb: " << e.what() << '\n';
    return exit_data;
  } catch (const validation_error& e) {
    std::cerr << "corefwb: " << e.what() << '\n';
    return exit_data;
  } catch (const data_error& e) {
    std::cerr << "corefwb: " << e.what() << '\n';
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "corefwb: internal error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_ok;
}
