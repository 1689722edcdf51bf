#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coref/error.hpp"

namespace coref::text {

// Byte offset of every code point in a UTF-8 string, plus a final entry equal
// to the string length. Offsets in annotation files count code points, so
// code point i occupies bytes [offsets[i], offsets[i+1]).
inline std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  offsets.reserve(s.size() + 1);
  std::size_t i = 0;
  while (i < s.size()) {
    offsets.push_back(i);
    auto lead = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    } else if (lead >= 0x80) {
      throw parse_error("invalid UTF-8: stray continuation byte at offset " + std::to_string(i));
    }
    if (i + len > s.size()) {
      throw parse_error("invalid UTF-8: truncated sequence at offset " + std::to_string(i));
    }
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        throw parse_error("invalid UTF-8: bad continuation byte at offset " + std::to_string(i + k));
      }
    }
    i += len;
  }
  offsets.push_back(s.size());
  return offsets;
}

inline std::size_t code_point_length(std::string_view s) { return code_point_offsets(s).size() - 1; }

// Substring by code point range [begin, end). Caller checks bounds.
inline std::string slice(std::string_view s, const std::vector<std::size_t>& offsets, std::size_t begin,
                         std::size_t end) {
  return std::string(s.substr(offsets[begin], offsets[end] - offsets[begin]));
}

// Uppercase (ASCII), collapse whitespace runs to one space, trim, and strip
// trailing periods. Used for name equality, alias tests and NP comparison.
inline std::string normalize_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  while (!out.empty() && out.back() == '.') {
    out.pop_back();
  }
  while (!out.empty() && out.back() == ' ') {
    out.pop_back();
  }
  return out;
}

inline std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) tokens.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

} // namespace coref::text
