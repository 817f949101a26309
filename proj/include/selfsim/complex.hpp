/* complex.hpp -- leveled graphs with horizontal/vertical edges: finite
 * truncations of the self-similarity complex, the tile graph shape, BFS
 * metrics, a Gromov 4-point delta probe, DOT/JSON export */

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfsim/biset.hpp"
#include "selfsim/common.hpp"

namespace selfsim {

/// Undirected leveled graph. Horizontal edges join vertices of equal level,
/// vertical edges join consecutive levels. Self-loops are never stored;
/// parallel contacts collapse into one edge with merged labels.
class ComplexGraph {
 public:
  enum class EdgeKind { Horizontal, Vertical };

  struct Vertex {
    std::string name;
    int level = 0;
  };

  struct Edge {
    int u = 0, v = 0;  // u < v
    EdgeKind kind = EdgeKind::Horizontal;
    std::vector<std::string> labels;
  };

  int add_vertex(const std::string& name, int level) {
    auto [it, inserted] = index_.try_emplace(name, static_cast<int>(vertices_.size()));
    if (!inserted) throw Error("duplicate vertex name: " + name);
    vertices_.push_back({name, level});
    adjacency_.emplace_back();
    return it->second;
  }

  int vertex_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown vertex: " + name);
    return it->second;
  }

  bool has_vertex(const std::string& name) const { return index_.count(name) > 0; }

  void add_edge(int u, int v, EdgeKind kind, const std::string& label) {
    if (u == v) throw Error("self-loops are not stored");
    if (u > v) std::swap(u, v);
    const Vertex& vu = vertices_[static_cast<std::size_t>(u)];
    const Vertex& vv = vertices_[static_cast<std::size_t>(v)];
    if (kind == EdgeKind::Horizontal && vu.level != vv.level) throw Error("horizontal edge across levels");
    if (kind == EdgeKind::Vertical && std::abs(vu.level - vv.level) != 1) throw Error("vertical edge must span one level");
    auto key = std::make_pair(u, v);
    auto it = edge_index_.find(key);
    if (it != edge_index_.end()) {
      Edge& e = edges_[static_cast<std::size_t>(it->second)];
      if (e.kind != kind) throw Error("edge kind conflict between " + vu.name + " and " + vv.name);
      if (!label.empty() && std::find(e.labels.begin(), e.labels.end(), label) == e.labels.end()) {
        e.labels.push_back(label);
      }
      return;
    }
    edge_index_.emplace(key, static_cast<int>(edges_.size()));
    Edge e;
    e.u = u;
    e.v = v;
    e.kind = kind;
    if (!label.empty()) e.labels.push_back(label);
    edges_.push_back(std::move(e));
    adjacency_[static_cast<std::size_t>(u)].push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::size_t count_edges(EdgeKind kind) const {
    std::size_t n = 0;
    for (const auto& e : edges_) {
      if (e.kind == kind) ++n;
    }
    return n;
  }

  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::map<std::string, int> index_;
  std::map<std::pair<int, int>, int> edge_index_;
  std::vector<std::vector<int>> adjacency_;  // kept in step with edges_
};

/// Right shift: deletes the first letter. The root (empty word) is outside
/// the domain.
inline std::vector<int> shift_word(std::span<const int> word) {
  if (word.empty()) throw Error("shift is undefined on the empty word");
  return {word.begin() + 1, word.end()};
}

/// Truncation of the self-similarity complex up to the given level:
/// vertices are all words of length <= level (including the empty word),
/// horizontal edges {w, s.w} per generator, vertical edges {w, xw} per letter.
inline ComplexGraph build_truncation(const BisetMachine& m, int level, std::uint64_t vertex_budget = 200000) {
  if (level < 0) throw ParseError("negative level");
  std::uint64_t total = 0, layer = 1;
  for (int k = 0; k <= level; ++k) {
    total += layer;
    if (total > vertex_budget) throw BudgetError("truncation exceeds the vertex budget");
    layer *= static_cast<std::uint64_t>(m.degree());
  }

  ComplexGraph graph;
  std::vector<std::vector<int>> current{{}};  // level-0: the empty word
  graph.add_vertex("", 0);
  std::vector<std::vector<std::vector<int>>> levels{current};
  for (int k = 1; k <= level; ++k) {
    std::vector<std::vector<int>> next;
    next.reserve(current.size() * static_cast<std::size_t>(m.degree()));
    for (const auto& w : current) {
      for (int x = 0; x < m.degree(); ++x) {
        std::vector<int> xw;
        xw.reserve(w.size() + 1);
        xw.push_back(x);
        xw.insert(xw.end(), w.begin(), w.end());
        next.push_back(std::move(xw));
      }
    }
    std::sort(next.begin(), next.end());
    for (const auto& w : next) graph.add_vertex(m.alphabet().format_word(w), k);
    levels.push_back(next);
    current = std::move(next);
  }

  // Vertical edges w -- xw.
  for (int k = 0; k < level; ++k) {
    for (const auto& w : levels[static_cast<std::size_t>(k)]) {
      int u = graph.vertex_index(m.alphabet().format_word(w));
      for (int x = 0; x < m.degree(); ++x) {
        std::vector<int> xw;
        xw.push_back(x);
        xw.insert(xw.end(), w.begin(), w.end());
        int v = graph.vertex_index(m.alphabet().format_word(xw));
        graph.add_edge(u, v, ComplexGraph::EdgeKind::Vertical, m.alphabet().labels[static_cast<std::size_t>(x)]);
      }
    }
  }

  // Horizontal edges w -- s.w; a generator fixing w contributes nothing.
  for (int k = 0; k <= level; ++k) {
    for (const auto& w : levels[static_cast<std::size_t>(k)]) {
      int u = graph.vertex_index(m.alphabet().format_word(w));
      for (int g = 0; g < m.model().rank(); ++g) {
        WordAction a = m.act_word(m.model().generator(g), w);
        if (a.word == w) continue;
        int v = graph.vertex_index(m.alphabet().format_word(a.word));
        graph.add_edge(u, v, ComplexGraph::EdgeKind::Horizontal,
                       m.model().generator_names()[static_cast<std::size_t>(g)]);
      }
    }
  }
  return graph;
}

inline std::vector<int> bfs_distances(const ComplexGraph& g, int source) {
  const auto& adj = g.adjacency();
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<int> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

/// Unweighted shortest-path distance; nullopt for a disconnected pair.
inline std::optional<int> graph_distance(const ComplexGraph& g, int u, int v) {
  if (u == v) return 0;
  std::vector<int> dist = bfs_distances(g, u);
  int d = dist[static_cast<std::size_t>(v)];
  if (d < 0) return std::nullopt;
  return d;
}

struct DeltaProbe {
  std::int64_t quadruples = 0;    // evaluated 4-tuples
  int delta_times2 = 0;           // 2 * observed delta (delta is a half-integer)
  bool exhaustive = false;
  bool degenerate = false;        // fewer than 4 vertices
  std::uint64_t seed = 0;

  double delta() const { return delta_times2 / 2.0; }
};

/// Four-point condition probe: for each sampled quadruple the two largest of
/// the three pairwise-sum matchings differ by at most 2*delta; reports the
/// maximum observed delta. Exhaustive when samples is nullopt.
inline DeltaProbe delta_estimate(const ComplexGraph& g, std::optional<std::int64_t> samples,
                                 std::uint64_t seed = 0) {
  DeltaProbe probe;
  probe.seed = seed;
  const int n = static_cast<int>(g.vertex_count());
  if (n < 4) {
    probe.degenerate = true;
    return probe;
  }
  std::vector<std::vector<int>> dist;
  dist.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dist.push_back(bfs_distances(g, i));
    for (int d : dist.back()) {
      if (d < 0) throw Error("delta probe requires a connected graph");
    }
  }

  auto eval = [&](int a, int b, int c, int d) {
    const int s1 = dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +
                   dist[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
    const int s2 = dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] +
                   dist[static_cast<std::size_t>(b)][static_cast<std::size_t>(d)];
    const int s3 = dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)] +
                   dist[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
    int hi = std::max({s1, s2, s3});
    int mid = s1 + s2 + s3 - hi - std::min({s1, s2, s3});
    probe.delta_times2 = std::max(probe.delta_times2, hi - mid);
    ++probe.quadruples;
  };

  if (!samples) {
    probe.exhaustive = true;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        for (int c = b + 1; c < n; ++c) {
          for (int d = c + 1; d < n; ++d) eval(a, b, c, d);
        }
      }
    }
    return probe;
  }

  Rng rng(seed);
  for (std::int64_t s = 0; s < *samples; ++s) {
    int idx[4];
    for (int i = 0; i < 4; ++i) {
      while (true) {
        int candidate = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        bool dup = false;
        for (int j = 0; j < i; ++j) dup = dup || idx[j] == candidate;
        if (!dup) {
          idx[i] = candidate;
          break;
        }
      }
    }
    eval(idx[0], idx[1], idx[2], idx[3]);
  }
  return probe;
}

/// Deterministic DOT rendering: one rank group per level, horizontal edges
/// labelled by generators, vertical edges by letters.
inline std::string export_dot(const ComplexGraph& g) {
  std::string out = "graph complex {\n";
  std::map<int, std::vector<int>> by_level;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    by_level[g.vertices()[i].level].push_back(static_cast<int>(i));
  }
  for (const auto& [level, ids] : by_level) {
    out += "  { rank=same;";
    for (int id : ids) {
      const std::string& name = g.vertices()[static_cast<std::size_t>(id)].name;
      out += " n" + std::to_string(id) + " [label=\"" + (name.empty() ? std::string("\xce\xb5") : name) + "\"];";
    }
    out += " }\n";
  }
  for (const auto& e : g.edges()) {
    std::string label;
    for (const auto& l : e.labels) {
      if (!label.empty()) label += ',';
      label += l;
    }
    out += "  n" + std::to_string(e.u) + " -- n" + std::to_string(e.v);
    out += " [style=" + std::string(e.kind == ComplexGraph::EdgeKind::Horizontal ? "solid" : "dashed");
    if (!label.empty()) out += ",label=\"" + label + "\"";
    out += "];\n";
  }
  out += "}\n";
  return out;
}

inline nlohmann::ordered_json graph_to_json(const ComplexGraph& g) {
  nlohmann::ordered_json doc;
  auto verts = nlohmann::ordered_json::array();
  for (const auto& v : g.vertices()) {
    verts.push_back({{"word", v.name}, {"level", v.level}});
  }
  doc["vertices"] = std::move(verts);
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) {
    std::string label;
    for (const auto& l : e.labels) {
      if (!label.empty()) label += ',';
      label += l;
    }
    edges.push_back({{"u", g.vertices()[static_cast<std::size_t>(e.u)].name},
                     {"v", g.vertices()[static_cast<std::size_t>(e.v)].name},
                     {"kind", e.kind == ComplexGraph::EdgeKind::Horizontal ? "horizontal" : "vertical"},
                     {"label", label}});
  }
  doc["edges"] = std::move(edges);
  return doc;
}

inline std::string export_json(const ComplexGraph& g) { return graph_to_json(g).dump(2) + "\n"; }

inline ComplexGraph parse_graph_json(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph file is not valid JSON: ") + e.what());
  }
  ComplexGraph g;
  for (const auto& v : doc.at("vertices")) {
    g.add_vertex(v.at("word").get<std::string>(), v.at("level").get<int>());
  }
  for (const auto& e : doc.at("edges")) {
    int u = g.vertex_index(e.at("u").get<std::string>());
    int v = g.vertex_index(e.at("v").get<std::string>());
    auto kind = e.at("kind").get<std::string>() == "horizontal" ? ComplexGraph::EdgeKind::Horizontal
                                                                : ComplexGraph::EdgeKind::Vertical;
    // Merged labels stay in their comma-joined form; the re-exported bytes
    // are identical and the graph structure is unchanged.
    g.add_edge(u, v, kind, e.at("label").get<std::string>());
  }
  return g;
}

}  // namespace selfsim
