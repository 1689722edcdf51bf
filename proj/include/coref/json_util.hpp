#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"

#include "coref/error.hpp"

namespace coref::json_util {

using json = nlohmann::ordered_json;

inline std::string type_name(const json& j) { return j.type_name(); }

// Strict view over a JSON object: rejects unknown keys and reports the
// dotted field path on every type error.
class object_reader {
public:
  object_reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected object, got " + type_name(j_));
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (auto k : keys) known = known || it.key() == k;
      if (!known) fail(sub(it.key()), "unknown field");
    }
  }

  bool has(std::string_view key) const { return j_.contains(key); }

  const json& required(std::string_view key) const {
    auto it = j_.find(key);
    if (it == j_.end()) fail(sub(key), "missing required field");
    return *it;
  }

  const json* optional(std::string_view key) const {
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string string(std::string_view key) const { return as_string(required(key), sub(key)); }

  std::uint64_t unsigned_int(std::string_view key) const { return as_unsigned(required(key), sub(key)); }

  std::string sub(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const std::string& path() const { return path_; }

  [[noreturn]] static void fail(const std::string& path, const std::string& message) {
    throw parse_error(path + ": " + message);
  }

  static std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected string, got " + type_name(j));
    return j.get<std::string>();
  }

  static std::uint64_t as_unsigned(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
      fail(path, "expected non-negative integer, got " + type_name(j));
    }
    return j.get<std::uint64_t>();
  }

  static double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected number, got " + type_name(j));
    return j.get<double>();
  }

  static bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected boolean, got " + type_name(j));
    return j.get<bool>();
  }

  static const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected array, got " + type_name(j));
    return j;
  }

private:
  const json& j_;
  std::string path_;
};

inline json parse_json(std::string_view s, const std::string& where) {
  try {
    return json::parse(s);
  } catch (const json::parse_error& e) {
    throw parse_error(where + ": malformed JSON: " + e.what());
  }
}

} // namespace coref::json_util
