/* machine_io.hpp -- JSON machine files: parse, validate, canonical re-serialization */

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "selfsim/biset.hpp"

namespace selfsim {

using ordered_json = nlohmann::ordered_json;

inline MachineSpec machine_spec_from_json(const ordered_json& doc) {
  MachineSpec spec;
  if (!doc.is_object() || !doc.contains("model") || !doc.contains("alphabet") || !doc.contains("generators")) {
    throw ParseError("machine file needs model, alphabet and generators fields");
  }
  const auto& model = doc.at("model");
  std::string kind = model.value("kind", "");
  if (kind == "free") {
    spec.kind = GroupKind::Free;
    if (!model.contains("generators")) throw ParseError("free model needs a generators list");
    for (const auto& n : model.at("generators")) spec.generator_names.push_back(n.get<std::string>());
  } else if (kind == "abelian") {
    spec.kind = GroupKind::FreeAbelian;
    if (!model.contains("rank")) throw ParseError("abelian model needs a rank");
    spec.rank = model.at("rank").get<int>();
  } else {
    throw ParseError("model kind must be \"free\" or \"abelian\"");
  }

  for (const auto& l : doc.at("alphabet")) spec.alphabet.push_back(l.get<std::string>());

  for (const auto& g : doc.at("generators")) {
    GeneratorRecursion rec;
    rec.name = g.value("name", "");
    if (!g.contains("perm") || !g.contains("restrictions")) {
      throw ParseError("generator entry needs perm and restrictions");
    }
    for (const auto& p : g.at("perm")) rec.perm.push_back(p.get<int>());
    for (const auto& r : g.at("restrictions")) {
      if (r.is_array()) {
        // vector restriction written as a JSON array
        std::string s;
        for (const auto& c : r) {
          if (!s.empty()) s += ',';
          s += std::to_string(c.get<std::int64_t>());
        }
        rec.restrictions.push_back(s);
      } else {
        rec.restrictions.push_back(r.get<std::string>());
      }
    }
    spec.recursions.push_back(std::move(rec));
  }
  return spec;
}

inline ordered_json machine_to_json(const BisetMachine& m) {
  ordered_json doc;
  ordered_json model;
  if (m.model().kind() == GroupKind::Free) {
    model["kind"] = "free";
    model["generators"] = m.model().generator_names();
  } else {
    model["kind"] = "abelian";
    model["rank"] = m.model().rank();
  }
  doc["model"] = std::move(model);
  doc["alphabet"] = m.alphabet().labels;
  ordered_json gens = ordered_json::array();
  for (int g = 0; g < m.model().rank(); ++g) {
    ordered_json entry;
    entry["name"] = m.model().generator_names()[static_cast<std::size_t>(g)];
    ordered_json perm = ordered_json::array();
    ordered_json rests = ordered_json::array();
    GroupElement gen = m.model().generator(g);
    for (int x = 0; x < m.degree(); ++x) {
      LetterAction a = m.act_letter(gen, x);
      perm.push_back(a.letter);
      rests.push_back(m.model().format(a.restriction));
    }
    entry["perm"] = std::move(perm);
    entry["restrictions"] = std::move(rests);
    gens.push_back(std::move(entry));
  }
  doc["generators"] = std::move(gens);
  return doc;
}

inline BisetMachine parse_machine(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("machine file is not valid JSON: ") + e.what());
  }
  try {
    return BisetMachine::validate(machine_spec_from_json(doc));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("machine file has the wrong shape: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline BisetMachine load_machine(const std::string& path) { return parse_machine(read_file(path)); }

}  // namespace selfsim
