#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "httplib.h"

#include "coref/corpus.hpp"
#include "coref/corpus_io.hpp"
#include "coref/json_util.hpp"

// Versioned document store behind the annotation UI, and its HTTP front end.
// Storage is one corpus-format file per document plus a version sidecar.
namespace coref::annosvc {

namespace fs = std::filesystem;

struct document_summary {
  std::string doc_id;
  std::uint64_t version;
  std::size_t phrase_count;
};

struct versioned_document {
  document doc;
  std::uint64_t version;
};

struct put_ok {
  std::uint64_t version;
};
struct put_conflict {
  std::uint64_t current_version;
};
struct put_invalid {
  std::vector<violation> violations;
};
struct put_not_found {};

using put_result = std::variant<put_ok, put_conflict, put_invalid, put_not_found>;

// Ids double as file names.
inline bool valid_doc_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

inline void write_file_atomically(const fs::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

class annotation_store {
public:
  explicit annotation_store(fs::path dir) : dir_(std::move(dir)) {
    if (!fs::is_directory(dir_)) throw data_error("annotation store: not a directory: " + dir_.string());
    for (const auto& entry : fs::directory_iterator(dir_)) {
      if (entry.path().extension() != ".jsonl") continue;
      std::ifstream in(entry.path());
      std::string line, record;
      while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) record = line;
      auto doc = parse_document_record(record, entry.path().string());
      if (doc.doc_id != entry.path().stem().string())
        throw validation_error(entry.path().string() + ": doc_id does not match file name");
      std::uint64_t version = 1;
      std::ifstream vin(version_path(doc.doc_id));
      if (vin) vin >> version;
      auto e = std::make_unique<slot>();
      e->doc = std::move(doc);
      e->version = version;
      docs_.emplace(e->doc.doc_id, std::move(e));
    }
  }

  // Writes each document of a corpus into `dir` at version 1.
  static void import_corpus(const fs::path& dir, const corpus& docs) {
    fs::create_directories(dir);
    for (const auto& d : docs) {
      if (!valid_doc_id(d.doc_id)) throw data_error("doc_id '" + d.doc_id + "' cannot be used as a file name");
      write_file_atomically(dir / (d.doc_id + ".jsonl"), serialize_document(d) + "\n");
      write_file_atomically(dir / (d.doc_id + ".version"), "1\n");
    }
  }

  std::vector<document_summary> list() const {
    std::vector<document_summary> out;
    for (const auto& [id, s] : docs_) {
      std::shared_lock lock(s->mutex);
      out.push_back({id, s->version, s->doc.phrases.size()});
    }
    return out;
  }

  std::optional<versioned_document> get(const std::string& id) const {
    auto it = docs_.find(id);
    if (it == docs_.end()) return std::nullopt;
    std::shared_lock lock(it->second->mutex);
    return versioned_document{it->second->doc, it->second->version};
  }

  // Compare-and-set write. The stored text is immutable; sentences and
  // phrases are replaced wholesale. Durable before returning put_ok.
  put_result put(const std::string& id, std::uint64_t expected_version, document incoming) {
    auto it = docs_.find(id);
    if (it == docs_.end()) return put_not_found{};
    auto& s = *it->second;

    std::vector<violation> vs;
    if (incoming.doc_id != id) vs.push_back({"doc_id mismatch", "doc_id", "record doc_id differs from the URL"});
    {
      std::shared_lock lock(s.mutex);
      if (incoming.text != s.doc.text) vs.push_back({"text mismatch", "text", "document text is immutable"});
    }
    auto more = validate_document(incoming);
    vs.insert(vs.end(), more.begin(), more.end());
    if (!vs.empty()) return put_invalid{std::move(vs)};

    std::unique_lock lock(s.mutex);
    if (s.version != expected_version) return put_conflict{s.version};
    write_file_atomically(dir_ / (id + ".jsonl"), serialize_document(incoming) + "\n");
    write_file_atomically(version_path(id), std::to_string(s.version + 1) + "\n");
    s.doc = std::move(incoming);
    ++s.version;
    return put_ok{s.version};
  }

  // All stored records in doc_id order, in corpus file format.
  std::string export_corpus() const {
    std::ostringstream os;
    for (const auto& [id, s] : docs_) {
      std::shared_lock lock(s->mutex);
      os << serialize_document(s->doc) << '\n';
    }
    return os.str();
  }

  const fs::path& dir() const { return dir_; }

private:
  struct slot {
    mutable std::shared_mutex mutex;
    document doc;
    std::uint64_t version = 1;
  };

  fs::path version_path(const std::string& id) const { return dir_ / (id + ".version"); }

  fs::path dir_;
  std::map<std::string, std::unique_ptr<slot>> docs_;
};

namespace detail {

using json_util::json;

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& error, const std::string& message) {
  send_json(res, status, json{{"error", error}, {"message", message}});
}

} // namespace detail

// Registers GET /docs, GET /docs/{id}, PUT /docs/{id}?version=N, GET /export.
inline void register_routes(httplib::Server& server, annotation_store& store) {
  using detail::json;

  server.Get("/docs", [&store](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& s : store.list())
      out.push_back(json{{"doc_id", s.doc_id}, {"version", s.version}, {"phrase_count", s.phrase_count}});
    detail::send_json(res, 200, out);
  });

  server.Get(R"(/docs/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
    auto doc = store.get(req.matches[1]);
    if (!doc) return detail::send_error(res, 404, "not_found", "no document '" + std::string(req.matches[1]) + "'");
    detail::send_json(res, 200, json{{"version", doc->version}, {"document", document_to_json(doc->doc)}});
  });

  server.Put(R"(/docs/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!req.has_param("version")) return detail::send_error(res, 400, "bad_request", "missing ?version=N");
    std::uint64_t expected = 0;
    try {
      std::size_t used = 0;
      auto v = req.get_param_value("version");
      expected = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      return detail::send_error(res, 400, "bad_request", "version must be a non-negative integer");
    }

    document incoming;
    try {
      incoming = document_from_json(json_util::parse_json(req.body, "body"));
    } catch (const parse_error& e) {
      return detail::send_error(res, 400, "bad_request", e.what());
    }

    auto result = store.put(id, expected, std::move(incoming));
    if (auto* ok = std::get_if<put_ok>(&result)) {
      detail::send_json(res, 200, json{{"doc_id", id}, {"version", ok->version}});
    } else if (auto* c = std::get_if<put_conflict>(&result)) {
      detail::send_json(res, 409, json{{"error", "conflict"},
                                       {"message", "stale version; reload the document"},
                                       {"current_version", c->current_version}});
    } else if (auto* bad = std::get_if<put_invalid>(&result)) {
      json vs = json::array();
      for (const auto& v : bad->violations)
        vs.push_back(json{{"code", v.code}, {"location", v.location}, {"message", v.message}});
      detail::send_json(res, 422, json{{"error", "validation"}, {"violations", vs}});
    } else {
      detail::send_error(res, 404, "not_found", "no document '" + id + "'");
    }
  });

  server.Get("/export", [&store](const httplib::Request&, httplib::Response& res) {
    res.status = 200;
    res.set_content(store.export_corpus(), "application/x-ndjson");
  });
}

} // namespace coref::annosvc
