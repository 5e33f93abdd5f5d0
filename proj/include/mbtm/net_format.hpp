#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mbtm/bn.hpp"

namespace mbtm::bn {

/// Parses the JSON network document:
///   {"nodes": [{"name": "...", "parents": [...], "cpd": [...]}, ...],
///    "target": "..."}
/// CPD rows are P(value = 1), ordered by parent assignment read as a
/// big-endian bit string over the declared parent order.
inline BayesNet load_net(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("network document: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("target"))
      throw ParseError("network document needs top-level 'nodes' and 'target'");
    std::vector<Node> nodes;
    for (const auto& jn : doc.at("nodes")) {
      Node n;
      n.name = jn.at("name").get<std::string>();
      if (jn.contains("parents"))
        n.cpd.parents = jn.at("parents").get<std::vector<std::string>>();
      n.cpd.rows = jn.at("cpd").get<std::vector<double>>();
      nodes.push_back(std::move(n));
    }
    return BayesNet(std::move(nodes), doc.at("target").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network document: ") + e.what());
  }
}

}  // namespace mbtm::bn
