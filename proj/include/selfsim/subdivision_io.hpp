/* subdivision_io.hpp -- JSON rule files for subdivision rules */

#pragma once

#include <string>

#include <json.hpp>

#include "selfsim/subdivision.hpp"

namespace selfsim {

inline RuleSpec rule_spec_from_json(const nlohmann::ordered_json& doc) {
  RuleSpec spec;
  if (!doc.is_object() || !doc.contains("edge_types") || !doc.contains("tile_types") || !doc.contains("complex")) {
    throw ParseError("rule file needs edge_types, tile_types and complex fields");
  }
  for (const auto& et : doc.at("edge_types")) {
    RuleSpec::EdgeType out;
    out.name = et.at("name").get<std::string>();
    for (const auto& s : et.at("subdivision")) {
      out.subdivision.push_back({s.at(0).get<std::string>(), s.at(1).get<int>()});
    }
    spec.edge_types.push_back(std::move(out));
  }
  for (const auto& tt : doc.at("tile_types")) {
    RuleSpec::TileType out;
    out.name = tt.at("name").get<std::string>();
    for (const auto& s : tt.at("boundary")) {
      out.boundary.push_back({s.at(0).get<std::string>(), s.at(1).get<int>()});
    }
    const auto& sub = tt.at("subdivision");
    out.subdivision.vertices = sub.at("vertices").get<int>();
    for (const auto& e : sub.at("edges")) {
      out.subdivision.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<std::string>()});
    }
    for (const auto& f : sub.at("faces")) {
      RuleSpec::TileSubdivision::Face face;
      for (const auto& idx : f.at("cycle")) face.cycle.push_back(idx.get<int>());
      face.type = f.at("type").get<std::string>();
      out.subdivision.faces.push_back(std::move(face));
    }
    for (const auto& chain : sub.at("boundary_chains")) {
      std::vector<int> c;
      for (const auto& idx : chain) c.push_back(idx.get<int>());
      out.subdivision.boundary_chains.push_back(std::move(c));
    }
    spec.tile_types.push_back(std::move(out));
  }
  const auto& cx = doc.at("complex");
  for (const auto& t : cx.at("tiles")) spec.complex.tiles.push_back(t.at("type").get<std::string>());
  for (const auto& g : cx.at("gluings")) {
    spec.complex.gluings.push_back(
        {g.at(0).get<int>(), g.at(1).get<int>(), g.at(2).get<int>(), g.at(3).get<int>(), g.at(4).get<int>()});
  }
  return spec;
}

inline SubdivisionRule parse_rule(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rule file is not valid JSON: ") + e.what());
  }
  try {
    return SubdivisionRule::validate(rule_spec_from_json(doc));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rule file has the wrong shape: ") + e.what());
  }
}

}  // namespace selfsim
