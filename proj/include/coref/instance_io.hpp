#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "coref/error.hpp"
#include "coref/pairgen.hpp"

namespace coref {

// Tab-separated instance dump: a fixed header line, then one instance per line.
inline std::string instance_header() {
  std::string h = "doc_id\tfirst\tsecond";
  for (const auto& spec : feature_specs) {
    h += '\t';
    h += spec.name;
  }
  h += "\tlabel";
  return h;
}

inline void write_instances(std::ostream& out, const std::vector<instance>& instances) {
  out << instance_header() << '\n';
  for (const auto& inst : instances) {
    out << inst.pair.doc_id << '\t' << inst.pair.first << '\t' << inst.pair.second;
    for (std::size_t i = 0; i < feature_count; ++i) out << '\t' << to_string(inst.features.at(i));
    out << '\t' << to_string(inst.lbl) << '\n';
  }
}

inline std::vector<instance> read_instances(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("instance dump: empty input (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != instance_header()) throw parse_error("instance dump line 1: unexpected header");

  std::vector<instance> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (!line.empty() && line.back() == '\t') cols.emplace_back();
    auto where = "instance dump line " + std::to_string(line_no);
    if (cols.size() != 3 + feature_count + 1) {
      throw parse_error(where + ": expected " + std::to_string(4 + feature_count) + " columns, got " +
                        std::to_string(cols.size()));
    }
    instance inst;
    inst.pair = {cols[0], cols[1], cols[2]};
    if (inst.pair.doc_id.empty() || inst.pair.first.empty() || inst.pair.second.empty())
      throw parse_error(where + ": empty identifier");
    if (inst.pair.first == inst.pair.second) throw parse_error(where + ": pair of a phrase with itself");
    for (std::size_t i = 0; i < feature_count; ++i) {
      auto v = parse_feature_value(cols[3 + i]);
      if (!v || (*v == feature_value::unknown && !feature_specs[i].ternary)) {
        throw parse_error(where + ": " + std::string(feature_specs[i].name) + ": invalid value '" + cols[3 + i] + "'");
      }
      inst.features[static_cast<feature>(i)] = *v;
    }
    auto l = parse_label(cols.back());
    if (!l) throw parse_error(where + ": label: invalid value '" + cols.back() + "'");
    inst.lbl = *l;
    out.push_back(std::move(inst));
  }
  return out;
}

} // namespace coref
