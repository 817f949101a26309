/* subdivision.hpp -- combinatorial finite subdivision rules on sphere cell
 * complexes: validation, refinement, the "mesh going to zero combinatorially"
 * conditions, and the tile-adjacency realization of the covering complex */

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "selfsim/common.hpp"
#include "selfsim/complex.hpp"

namespace selfsim {

/// Raw rule description, straight from the rule file.
struct RuleSpec {
  struct EdgeType {
    std::string name;
    std::vector<std::pair<std::string, int>> subdivision;  // (edge type, orient)
  };
  struct TileSubdivision {
    int vertices = 0;
    struct Edge {
      int u = 0, v = 0;
      std::string type;
    };
    std::vector<Edge> edges;
    struct Face {
      std::vector<int> cycle;  // edge indices
      std::string type;
    };
    std::vector<Face> faces;
    std::vector<std::vector<int>> boundary_chains;  // per boundary side, edge indices
  };
  struct TileType {
    std::string name;
    std::vector<std::pair<std::string, int>> boundary;  // (edge type, orient)
    TileSubdivision subdivision;
  };
  struct Gluing {
    int tile_a = 0, side_a = 0, tile_b = 0, side_b = 0;
    int orient = 1;
  };
  struct Complex {
    std::vector<std::string> tiles;  // tile type name per tile
    std::vector<Gluing> gluings;
  };

  std::vector<EdgeType> edge_types;
  std::vector<TileType> tile_types;
  Complex complex;
};

/// A directed reference to an edge: sign +1 traverses the stored direction.
struct SignedRef {
  int index = 0;
  int sign = 1;

  friend bool operator==(const SignedRef& a, const SignedRef& b) {
    return a.index == b.index && a.sign == b.sign;
  }
};

namespace detail {

struct EdgeEnd {
  int u, v;
};

inline int ref_tail(const EdgeEnd& e, int sign) { return sign > 0 ? e.u : e.v; }
inline int ref_head(const EdgeEnd& e, int sign) { return sign > 0 ? e.v : e.u; }

/// Resolves a cyclic list of edge indices into a directed closed walk where
/// consecutive edges chain head-to-tail. Tries the first edge forward, then
/// backward.
inline std::optional<std::vector<SignedRef>> resolve_cycle(const std::vector<EdgeEnd>& ends,
                                                           const std::vector<int>& cycle) {
  if (cycle.empty()) return std::nullopt;
  for (int e : cycle) {
    if (e < 0 || e >= static_cast<int>(ends.size())) return std::nullopt;
    if (ends[static_cast<std::size_t>(e)].u == ends[static_cast<std::size_t>(e)].v) return std::nullopt;  // loop edge
  }
  for (int first_sign : {1, -1}) {
    std::vector<SignedRef> walk;
    walk.push_back({cycle[0], first_sign});
    bool ok = true;
    for (std::size_t i = 1; i < cycle.size(); ++i) {
      int h = ref_head(ends[static_cast<std::size_t>(walk.back().index)], walk.back().sign);
      const EdgeEnd& e = ends[static_cast<std::size_t>(cycle[i])];
      if (e.u == h) {
        walk.push_back({cycle[i], 1});
      } else if (e.v == h) {
        walk.push_back({cycle[i], -1});
      } else {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    int h = ref_head(ends[static_cast<std::size_t>(walk.back().index)], walk.back().sign);
    int t = ref_tail(ends[static_cast<std::size_t>(walk.front().index)], walk.front().sign);
    if (h == t) return walk;
  }
  return std::nullopt;
}

inline std::vector<SignedRef> reversed_walk(const std::vector<SignedRef>& walk) {
  std::vector<SignedRef> out;
  out.reserve(walk.size());
  for (auto it = walk.rbegin(); it != walk.rend(); ++it) out.push_back({it->index, -it->sign});
  return out;
}

}  // namespace detail

/// Validated subdivision rule: every cross-reference resolved, every tile
/// subdivision a combinatorial disk whose boundary chains match the edge-type
/// subdivisions side by side, and every sub-face walk rotated into alignment
/// with its tile type's boundary.
class SubdivisionRule {
 public:
  struct EdgeType {
    std::string name;
    std::vector<std::pair<int, int>> subdivision;  // (edge type index, orient)
  };

  struct TileType {
    std::string name;
    std::vector<std::pair<int, int>> boundary;  // (edge type index, orient)
    int sub_vertex_count = 0;
    std::vector<detail::EdgeEnd> sub_edges;
    std::vector<int> sub_edge_types;
    std::vector<bool> sub_edge_on_boundary;
    std::vector<std::vector<SignedRef>> boundary_chains;   // resolved, walk order
    std::vector<std::vector<SignedRef>> sub_face_walks;    // aligned to the face's type
    std::vector<int> sub_face_types;
    std::vector<int> outer_tails;  // local vertex sequence along the outer walk
  };

  static SubdivisionRule validate(const RuleSpec& spec);

  int edge_type_index(std::string_view name) const {
    for (std::size_t i = 0; i < edge_types_.size(); ++i) {
      if (edge_types_[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }
  int tile_type_index(std::string_view name) const {
    for (std::size_t i = 0; i < tile_types_.size(); ++i) {
      if (tile_types_[i].name == name) return static_cast<int>(i);
    }
    return -1;
  }

  const std::vector<EdgeType>& edge_types() const { return edge_types_; }
  const std::vector<TileType>& tile_types() const { return tile_types_; }
  const RuleSpec::Complex& base_complex_spec() const { return base_; }

 private:
  std::vector<EdgeType> edge_types_;
  std::vector<TileType> tile_types_;
  RuleSpec::Complex base_;
};

/// One closed cell complex on the sphere: V - E + F = 2 and every edge
/// bounds exactly two face sides. Edge and face types are stored by name so
/// a complex can only be refined by a rule that knows them.
struct CellComplex2 {
  struct Edge {
    int u = 0, v = 0;
    std::string type;
    int parent = -1;  // edge index one level down; self index at level 0; -1 when face-interior
  };
  struct Face {
    std::vector<SignedRef> walk;  // aligned: walk[i] traverses side i of the tile type
    std::string type;
    int parent = -1;  // face index one level down; self index at level 0
  };

  int level = 0;
  int vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<Face> faces;

  void verify_sphere() const {
    std::vector<int> incidence(edges.size(), 0);
    for (const auto& f : faces) {
      for (const auto& ref : f.walk) ++incidence[static_cast<std::size_t>(ref.index)];
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (incidence[e] != 2) {
        throw Error("edge " + std::to_string(e) + " bounds " + std::to_string(incidence[e]) +
                    " face sides; the complex is not closed");
      }
    }
    const std::int64_t chi = static_cast<std::int64_t>(vertex_count) - static_cast<std::int64_t>(edges.size()) +
                             static_cast<std::int64_t>(faces.size());
    if (chi != 2) throw Error("Euler characteristic " + std::to_string(chi) + "; not a sphere");
  }
};

inline SubdivisionRule SubdivisionRule::validate(const RuleSpec& spec) {
  SubdivisionRule rule;

  if (spec.edge_types.empty() || spec.tile_types.empty()) {
    throw ParseError("rule needs at least one edge type and one tile type");
  }

  // Pass 1: names and edge-type subdivisions.
  for (const auto& et : spec.edge_types) {
    if (et.name.empty()) throw ParseError("edge type with empty name");
    if (et.subdivision.empty()) throw ParseError("edge type " + et.name + " has an empty subdivision");
    rule.edge_types_.push_back({et.name, {}});
  }
  for (const auto& tt : spec.tile_types) {
    if (tt.name.empty()) throw ParseError("tile type with empty name");
    rule.tile_types_.push_back({});
    rule.tile_types_.back().name = tt.name;
  }
  for (std::size_t i = 0; i < spec.edge_types.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.edge_types.size(); ++j) {
      if (spec.edge_types[i].name == spec.edge_types[j].name) {
        throw ParseError("duplicate edge type name: " + spec.edge_types[i].name);
      }
    }
  }
  for (std::size_t i = 0; i < spec.tile_types.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.tile_types.size(); ++j) {
      if (spec.tile_types[i].name == spec.tile_types[j].name) {
        throw ParseError("duplicate tile type name: " + spec.tile_types[i].name);
      }
    }
  }
  for (std::size_t i = 0; i < spec.edge_types.size(); ++i) {
    for (const auto& [name, orient] : spec.edge_types[i].subdivision) {
      int idx = rule.edge_type_index(name);
      if (idx < 0) throw ParseError("edge type " + spec.edge_types[i].name + " refers to unknown type " + name);
      if (orient != 1 && orient != -1) throw ParseError("orientation flags must be +1 or -1");
      rule.edge_types_[i].subdivision.push_back({idx, orient});
    }
  }

  // Pass 2: tile boundaries.
  for (std::size_t t = 0; t < spec.tile_types.size(); ++t) {
    const auto& tt = spec.tile_types[t];
    if (tt.boundary.empty()) throw ParseError("tile type " + tt.name + " has an empty boundary");
    for (const auto& [name, orient] : tt.boundary) {
      int idx = rule.edge_type_index(name);
      if (idx < 0) throw ParseError("tile type " + tt.name + " boundary refers to unknown edge type " + name);
      if (orient != 1 && orient != -1) throw ParseError("orientation flags must be +1 or -1");
      rule.tile_types_[t].boundary.push_back({idx, orient});
    }
  }

  // Pass 3: tile subdivision complexes.
  for (std::size_t t = 0; t < spec.tile_types.size(); ++t) {
    const auto& tt = spec.tile_types[t];
    auto& out = rule.tile_types_[t];
    const auto& sub = tt.subdivision;
    if (sub.vertices <= 0) throw ParseError("tile type " + tt.name + ": subdivision needs vertices");
    out.sub_vertex_count = sub.vertices;
    for (const auto& e : sub.edges) {
      if (e.u < 0 || e.u >= sub.vertices || e.v < 0 || e.v >= sub.vertices) {
        throw ParseError("tile type " + tt.name + ": edge endpoint out of range");
      }
      if (e.u == e.v) throw ParseError("tile type " + tt.name + ": loop edges are not supported");
      int ty = rule.edge_type_index(e.type);
      if (ty < 0) throw ParseError("tile type " + tt.name + ": edge of unknown type " + e.type);
      out.sub_edges.push_back({e.u, e.v});
      out.sub_edge_types.push_back(ty);
    }
    if (sub.boundary_chains.size() != tt.boundary.size()) {
      throw ParseError("tile type " + tt.name + ": one boundary chain per side required");
    }

    // Resolve the outer walk: concatenation of the boundary chains.
    std::vector<int> outer;
    for (const auto& chain : sub.boundary_chains) {
      if (chain.empty()) throw ParseError("tile type " + tt.name + ": empty boundary chain");
      outer.insert(outer.end(), chain.begin(), chain.end());
    }
    auto outer_walk = detail::resolve_cycle(out.sub_edges, outer);
    if (!outer_walk) {
      throw ParseError("tile type " + tt.name + ": boundary chains do not form a closed walk");
    }

    out.sub_edge_on_boundary.assign(out.sub_edges.size(), false);
    for (const auto& ref : *outer_walk) {
      if (out.sub_edge_on_boundary[static_cast<std::size_t>(ref.index)]) {
        throw ParseError("tile type " + tt.name + ": boundary walk repeats an edge");
      }
      out.sub_edge_on_boundary[static_cast<std::size_t>(ref.index)] = true;
    }
    {
      std::set<int> seen;
      for (const auto& ref : *outer_walk) {
        int tail = detail::ref_tail(out.sub_edges[static_cast<std::size_t>(ref.index)], ref.sign);
        if (!seen.insert(tail).second) {
          throw ParseError("tile type " + tt.name + ": boundary walk revisits a vertex");
        }
        out.outer_tails.push_back(tail);
      }
    }

    // Split the resolved walk back into per-side chains and check each side
    // against the subdivision of its edge type, type by type and in order.
    {
      std::size_t pos = 0;
      for (std::size_t side = 0; side < tt.boundary.size(); ++side) {
        const auto [ety, orient] = out.boundary[side];
        const auto& pattern = rule.edge_types_[static_cast<std::size_t>(ety)].subdivision;
        const auto& chain = sub.boundary_chains[side];
        if (chain.size() != pattern.size()) {
          throw ParseError("tile type " + tt.name + ": side " + std::to_string(side) + " has " +
                           std::to_string(chain.size()) + " sub-edges, its edge type subdivides into " +
                           std::to_string(pattern.size()));
        }
        std::vector<SignedRef> resolved(outer_walk->begin() + static_cast<std::ptrdiff_t>(pos),
                                        outer_walk->begin() + static_cast<std::ptrdiff_t>(pos + chain.size()));
        for (std::size_t k = 0; k < chain.size(); ++k) {
          const auto [want_type, want_orient] =
              orient > 0 ? pattern[k] : std::make_pair(pattern[pattern.size() - 1 - k].first,
                                                       -pattern[pattern.size() - 1 - k].second);
          if (out.sub_edge_types[static_cast<std::size_t>(resolved[k].index)] != want_type) {
            throw ParseError("tile type " + tt.name + ": side " + std::to_string(side) +
                             " sub-edge types do not match its edge type subdivision");
          }
          if (resolved[k].sign != want_orient) {
            throw ParseError("tile type " + tt.name + ": side " + std::to_string(side) +
                             " sub-edge orientations do not match its edge type subdivision");
          }
        }
        out.boundary_chains.push_back(std::move(resolved));
        pos += chain.size();
      }
    }

    // Faces: resolve, then rotate into alignment with the declared type.
    if (sub.faces.empty()) throw ParseError("tile type " + tt.name + ": subdivision needs at least one face");
    for (const auto& face : sub.faces) {
      int fty = rule.tile_type_index(face.type);
      if (fty < 0) throw ParseError("tile type " + tt.name + ": face of unknown tile type " + face.type);
      auto walk = detail::resolve_cycle(out.sub_edges, face.cycle);
      if (!walk) throw ParseError("tile type " + tt.name + ": face cycle does not close up");
      const auto& fboundary = rule.tile_types_[static_cast<std::size_t>(fty)].boundary;
      if (walk->size() != fboundary.size()) {
        throw ParseError("tile type " + tt.name + ": face walk length does not match type " + face.type);
      }
      auto aligned = [&](const std::vector<SignedRef>& w) -> std::optional<std::vector<SignedRef>> {
        const std::size_t L = w.size();
        for (std::size_t r = 0; r < L; ++r) {
          bool ok = true;
          for (std::size_t j = 0; j < L && ok; ++j) {
            const auto& ref = w[(j + r) % L];
            ok = out.sub_edge_types[static_cast<std::size_t>(ref.index)] == fboundary[j].first &&
                 ref.sign == fboundary[j].second;
          }
          if (ok) {
            std::vector<SignedRef> rotated;
            rotated.reserve(L);
            for (std::size_t j = 0; j < L; ++j) rotated.push_back(w[(j + r) % L]);
            return rotated;
          }
        }
        return std::nullopt;
      };
      auto rotated = aligned(*walk);
      if (!rotated) rotated = aligned(detail::reversed_walk(*walk));
      if (!rotated) {
        throw ParseError("tile type " + tt.name + ": face walk cannot be aligned with type " + face.type);
      }
      out.sub_face_walks.push_back(std::move(*rotated));
      out.sub_face_types.push_back(fty);
    }

    // Disk checks: Euler count with the outer boundary, interior edges bound
    // two faces, boundary edges one.
    {
      std::vector<int> incidence(out.sub_edges.size(), 0);
      for (const auto& w : out.sub_face_walks) {
        for (const auto& ref : w) ++incidence[static_cast<std::size_t>(ref.index)];
      }
      for (std::size_t e = 0; e < out.sub_edges.size(); ++e) {
        const int want = out.sub_edge_on_boundary[e] ? 1 : 2;
        if (incidence[e] != want) {
          throw ParseError("tile type " + tt.name + ": edge " + std::to_string(e) + " bounds " +
                           std::to_string(incidence[e]) + " faces, expected " + std::to_string(want) +
                           "; not a combinatorial disk");
        }
      }
      std::vector<bool> used(static_cast<std::size_t>(sub.vertices), false);
      for (const auto& e : out.sub_edges) {
        used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = true;
      }
      if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw ParseError("tile type " + tt.name + ": isolated vertex in the subdivision");
      }
      const std::int64_t chi = static_cast<std::int64_t>(sub.vertices) -
                               static_cast<std::int64_t>(out.sub_edges.size()) +
                               static_cast<std::int64_t>(out.sub_face_walks.size());
      if (chi != 1) {
        throw ParseError("tile type " + tt.name + ": V-E+F = " + std::to_string(chi) +
                         ", a disk subdivision needs 1");
      }
    }
  }

  rule.base_ = spec.complex;
  return rule;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace detail

/// Builds the level-0 sphere complex from the rule's tile list and gluings.
inline CellComplex2 build_base_complex(const SubdivisionRule& rule) {
  const auto& spec = rule.base_complex_spec();
  if (spec.tiles.empty()) throw ParseError("complex needs at least one tile");

  std::vector<int> tile_type(spec.tiles.size());
  std::vector<int> side_offset(spec.tiles.size() + 1, 0);
  for (std::size_t t = 0; t < spec.tiles.size(); ++t) {
    int ty = rule.tile_type_index(spec.tiles[t]);
    if (ty < 0) throw ParseError("complex tile of unknown type " + spec.tiles[t]);
    tile_type[t] = ty;
    side_offset[t + 1] = side_offset[t] + static_cast<int>(rule.tile_types()[static_cast<std::size_t>(ty)].boundary.size());
  }
  const int total_sides = side_offset[spec.tiles.size()];
  auto side_id = [&](int tile, int side) { return side_offset[static_cast<std::size_t>(tile)] + side; };
  auto sides_of = [&](int tile) {
    return static_cast<int>(rule.tile_types()[static_cast<std::size_t>(tile_type[static_cast<std::size_t>(tile)])].boundary.size());
  };

  // One corner vertex per side start; gluings identify them.
  detail::UnionFind uf(total_sides);
  std::vector<int> glued(static_cast<std::size_t>(total_sides), -1);

  for (std::size_t gi = 0; gi < spec.gluings.size(); ++gi) {
    const auto& gl = spec.gluings[gi];
    auto check_side = [&](int tile, int side) {
      if (tile < 0 || tile >= static_cast<int>(spec.tiles.size())) throw ParseError("gluing refers to unknown tile");
      if (side < 0 || side >= sides_of(tile)) throw ParseError("gluing refers to unknown side");
    };
    check_side(gl.tile_a, gl.side_a);
    check_side(gl.tile_b, gl.side_b);
    if (gl.orient != 1 && gl.orient != -1) throw ParseError("gluing orientation must be +1 or -1");
    if (gl.tile_a == gl.tile_b && gl.side_a == gl.side_b) throw ParseError("a side cannot be glued to itself");
    const int sa = side_id(gl.tile_a, gl.side_a);
    const int sb = side_id(gl.tile_b, gl.side_b);
    if (glued[static_cast<std::size_t>(sa)] >= 0 || glued[static_cast<std::size_t>(sb)] >= 0) {
      throw ParseError("side glued twice");
    }
    glued[static_cast<std::size_t>(sa)] = static_cast<int>(gi);
    glued[static_cast<std::size_t>(sb)] = static_cast<int>(gi);

    const auto& ba = rule.tile_types()[static_cast<std::size_t>(tile_type[static_cast<std::size_t>(gl.tile_a)])]
                         .boundary[static_cast<std::size_t>(gl.side_a)];
    const auto& bb = rule.tile_types()[static_cast<std::size_t>(tile_type[static_cast<std::size_t>(gl.tile_b)])]
                         .boundary[static_cast<std::size_t>(gl.side_b)];
    if (ba.first != bb.first) throw ParseError("glued sides have different edge types");
    if (gl.orient != ba.second * bb.second) {
      throw ParseError("gluing orientation is incompatible with the side orientations of the tile types");
    }

    const int a_start = side_id(gl.tile_a, gl.side_a);
    const int a_end = side_id(gl.tile_a, (gl.side_a + 1) % sides_of(gl.tile_a));
    const int b_start = side_id(gl.tile_b, gl.side_b);
    const int b_end = side_id(gl.tile_b, (gl.side_b + 1) % sides_of(gl.tile_b));
    if (gl.orient > 0) {
      uf.unite(a_start, b_start);
      uf.unite(a_end, b_end);
    } else {
      uf.unite(a_start, b_end);
      uf.unite(a_end, b_start);
    }
  }
  for (int s = 0; s < total_sides; ++s) {
    if (glued[static_cast<std::size_t>(s)] < 0) throw ParseError("unglued side; the complex is not closed");
  }

  // Compact vertex ids.
  std::map<int, int> vertex_of_root;
  auto vertex_id = [&](int corner) {
    int root = uf.find(corner);
    auto [it, inserted] = vertex_of_root.try_emplace(root, static_cast<int>(vertex_of_root.size()));
    return it->second;
  };

  CellComplex2 c;
  c.level = 0;

  // One edge per gluing; direction chosen so that tile A's walk sign equals
  // its tile type's side orientation.
  std::vector<int> side_edge(static_cast<std::size_t>(total_sides), -1);
  for (std::size_t gi = 0; gi < spec.gluings.size(); ++gi) {
    const auto& gl = spec.gluings[gi];
    const auto& ta = rule.tile_types()[static_cast<std::size_t>(tile_type[static_cast<std::size_t>(gl.tile_a)])];
    const int o1 = ta.boundary[static_cast<std::size_t>(gl.side_a)].second;
    const int tail = vertex_id(side_id(gl.tile_a, gl.side_a));
    const int head = vertex_id(side_id(gl.tile_a, (gl.side_a + 1) % sides_of(gl.tile_a)));
    CellComplex2::Edge e;
    e.type = rule.edge_types()[static_cast<std::size_t>(ta.boundary[static_cast<std::size_t>(gl.side_a)].first)].name;
    e.u = o1 > 0 ? tail : head;
    e.v = o1 > 0 ? head : tail;
    e.parent = static_cast<int>(gi);  // self at level 0
    side_edge[static_cast<std::size_t>(side_id(gl.tile_a, gl.side_a))] = static_cast<int>(gi);
    side_edge[static_cast<std::size_t>(side_id(gl.tile_b, gl.side_b))] = static_cast<int>(gi);
    c.edges.push_back(std::move(e));
  }
  c.vertex_count = static_cast<int>(vertex_of_root.size());

  for (std::size_t t = 0; t < spec.tiles.size(); ++t) {
    const auto& ty = rule.tile_types()[static_cast<std::size_t>(tile_type[t])];
    CellComplex2::Face f;
    f.type = ty.name;
    f.parent = static_cast<int>(t);  // self at level 0
    for (int s = 0; s < sides_of(static_cast<int>(t)); ++s) {
      f.walk.push_back({side_edge[static_cast<std::size_t>(side_id(static_cast<int>(t), s))],
                        ty.boundary[static_cast<std::size_t>(s)].second});
    }
    c.faces.push_back(std::move(f));
  }

  c.verify_sphere();
  return c;
}

/// One refinement step: every edge is replaced by its type's subdivision
/// chain, every face by its type's subdivision complex glued along the shared
/// chains. Ancestor ids point one level down.
inline CellComplex2 refine(const CellComplex2& c, const SubdivisionRule& rule) {
  CellComplex2 out;
  out.level = c.level + 1;
  out.vertex_count = c.vertex_count;

  // Subdivide edges.
  std::vector<std::vector<SignedRef>> chains(c.edges.size());
  for (std::size_t e = 0; e < c.edges.size(); ++e) {
    int ty = rule.edge_type_index(c.edges[e].type);
    if (ty < 0) throw ParseError("complex edge of unknown type " + c.edges[e].type);
    const auto& pattern = rule.edge_types()[static_cast<std::size_t>(ty)].subdivision;
    const int m = static_cast<int>(pattern.size());
    std::vector<int> stops;
    stops.push_back(c.edges[e].u);
    for (int k = 1; k < m; ++k) stops.push_back(out.vertex_count++);
    stops.push_back(c.edges[e].v);
    for (int k = 0; k < m; ++k) {
      const auto [sub_type, orient] = pattern[static_cast<std::size_t>(k)];
      CellComplex2::Edge sub;
      sub.type = rule.edge_types()[static_cast<std::size_t>(sub_type)].name;
      sub.u = orient > 0 ? stops[static_cast<std::size_t>(k)] : stops[static_cast<std::size_t>(k + 1)];
      sub.v = orient > 0 ? stops[static_cast<std::size_t>(k + 1)] : stops[static_cast<std::size_t>(k)];
      sub.parent = static_cast<int>(e);
      chains[e].push_back({static_cast<int>(out.edges.size()), orient});
      out.edges.push_back(std::move(sub));
    }
  }

  // Subdivide faces.
  for (std::size_t fi = 0; fi < c.faces.size(); ++fi) {
    const auto& face = c.faces[fi];
    int ty = rule.tile_type_index(face.type);
    if (ty < 0) throw ParseError("complex face of unknown type " + face.type);
    const auto& tile = rule.tile_types()[static_cast<std::size_t>(ty)];
    if (face.walk.size() != tile.boundary.size()) throw Error("internal: face walk does not match its type");

    // Global outer walk of this face: per-side chains, reversed when the
    // side is traversed against the stored edge direction.
    std::vector<SignedRef> global_walk;
    for (std::size_t s = 0; s < face.walk.size(); ++s) {
      if (face.walk[s].sign != tile.boundary[s].second) {
        throw Error("internal: face walk orientation diverged from its tile type");
      }
      const auto& chain = chains[static_cast<std::size_t>(face.walk[s].index)];
      if (face.walk[s].sign > 0) {
        global_walk.insert(global_walk.end(), chain.begin(), chain.end());
      } else {
        auto rev = detail::reversed_walk(chain);
        global_walk.insert(global_walk.end(), rev.begin(), rev.end());
      }
    }

    if (global_walk.size() != tile.outer_tails.size()) {
      throw Error("internal: outer walk length mismatch during refinement");
    }

    // Local -> global vertex map along the boundary, fresh ids inside.
    std::vector<int> vmap(static_cast<std::size_t>(tile.sub_vertex_count), -1);
    std::vector<SignedRef> flat_local;
    for (const auto& chain : tile.boundary_chains) {
      flat_local.insert(flat_local.end(), chain.begin(), chain.end());
    }
    for (std::size_t p = 0; p < global_walk.size(); ++p) {
      const int local_tail = tile.outer_tails[p];
      const int global_tail = global_walk[p].sign > 0 ? out.edges[static_cast<std::size_t>(global_walk[p].index)].u
                                                      : out.edges[static_cast<std::size_t>(global_walk[p].index)].v;
      if (vmap[static_cast<std::size_t>(local_tail)] == -1) {
        vmap[static_cast<std::size_t>(local_tail)] = global_tail;
      } else if (vmap[static_cast<std::size_t>(local_tail)] != global_tail) {
        throw Error("gluing inconsistency: boundary vertex identified with two images");
      }
    }
    for (int lv = 0; lv < tile.sub_vertex_count; ++lv) {
      if (vmap[static_cast<std::size_t>(lv)] == -1) vmap[static_cast<std::size_t>(lv)] = out.vertex_count++;
    }

    // Local -> global edge map: boundary edges onto the chains, interior
    // edges created fresh.
    std::vector<int> emap(tile.sub_edges.size(), -1);
    for (std::size_t p = 0; p < flat_local.size(); ++p) {
      const int le = flat_local[p].index;
      const int ge = global_walk[p].index;
      if (flat_local[p].sign != global_walk[p].sign) {
        throw Error("gluing inconsistency: side chain orientation mismatch");
      }
      if (out.edges[static_cast<std::size_t>(ge)].type !=
          rule.edge_types()[static_cast<std::size_t>(tile.sub_edge_types[static_cast<std::size_t>(le)])].name) {
        throw Error("gluing inconsistency: side chain type mismatch");
      }
      if (emap[static_cast<std::size_t>(le)] == -1) {
        emap[static_cast<std::size_t>(le)] = ge;
      } else if (emap[static_cast<std::size_t>(le)] != ge) {
        throw Error("gluing inconsistency: boundary edge identified with two images");
      }
    }
    for (std::size_t le = 0; le < tile.sub_edges.size(); ++le) {
      if (tile.sub_edge_on_boundary[le]) continue;
      CellComplex2::Edge sub;
      sub.type = rule.edge_types()[static_cast<std::size_t>(tile.sub_edge_types[le])].name;
      sub.u = vmap[static_cast<std::size_t>(tile.sub_edges[le].u)];
      sub.v = vmap[static_cast<std::size_t>(tile.sub_edges[le].v)];
      sub.parent = -1;
      emap[le] = static_cast<int>(out.edges.size());
      out.edges.push_back(std::move(sub));
    }

    // Sanity: boundary edge endpoints agree through the two maps.
    for (std::size_t le = 0; le < tile.sub_edges.size(); ++le) {
      if (!tile.sub_edge_on_boundary[le]) continue;
      const auto& ge = out.edges[static_cast<std::size_t>(emap[le])];
      if (ge.u != vmap[static_cast<std::size_t>(tile.sub_edges[le].u)] ||
          ge.v != vmap[static_cast<std::size_t>(tile.sub_edges[le].v)]) {
        throw Error("gluing inconsistency: orientation mismatch along a shared edge");
      }
    }

    for (std::size_t sf = 0; sf < tile.sub_face_walks.size(); ++sf) {
      CellComplex2::Face nf;
      nf.type = rule.tile_types()[static_cast<std::size_t>(tile.sub_face_types[sf])].name;
      nf.parent = static_cast<int>(fi);
      for (const auto& ref : tile.sub_face_walks[sf]) {
        nf.walk.push_back({emap[static_cast<std::size_t>(ref.index)], ref.sign});
      }
      out.faces.push_back(std::move(nf));
    }
  }

  out.verify_sphere();
  return out;
}

/// All refinement levels 0..n of a base complex.
inline std::vector<CellComplex2> refinement_tower(const SubdivisionRule& rule, const CellComplex2& c0, int n) {
  std::vector<CellComplex2> levels{c0};
  for (int k = 1; k <= n; ++k) levels.push_back(refine(levels.back(), rule));
  return levels;
}

namespace detail {

/// Level-0 ancestor of every edge per level; -1 for face-interior descent.
inline std::vector<std::vector<int>> edge_ancestors(const std::vector<CellComplex2>& levels) {
  std::vector<std::vector<int>> anc(levels.size());
  for (std::size_t e = 0; e < levels[0].edges.size(); ++e) anc[0].push_back(static_cast<int>(e));
  for (std::size_t k = 1; k < levels.size(); ++k) {
    anc[k].reserve(levels[k].edges.size());
    for (const auto& e : levels[k].edges) {
      anc[k].push_back(e.parent < 0 ? -1 : anc[k - 1][static_cast<std::size_t>(e.parent)]);
    }
  }
  return anc;
}

inline std::vector<std::vector<int>> face_ancestors(const std::vector<CellComplex2>& levels) {
  std::vector<std::vector<int>> anc(levels.size());
  for (std::size_t f = 0; f < levels[0].faces.size(); ++f) anc[0].push_back(static_cast<int>(f));
  for (std::size_t k = 1; k < levels.size(); ++k) {
    anc[k].reserve(levels[k].faces.size());
    for (const auto& f : levels[k].faces) {
      anc[k].push_back(anc[k - 1][static_cast<std::size_t>(f.parent)]);
    }
  }
  return anc;
}

/// Hierarchical tile names: level 0 tiles "0", "1", ...; children append
/// their ordinal within the parent subdivision.
inline std::vector<std::vector<std::string>> face_names(const std::vector<CellComplex2>& levels) {
  std::vector<std::vector<std::string>> names(levels.size());
  for (std::size_t f = 0; f < levels[0].faces.size(); ++f) names[0].push_back(std::to_string(f));
  for (std::size_t k = 1; k < levels.size(); ++k) {
    std::vector<int> child_count(levels[k - 1].faces.size(), 0);
    names[k].reserve(levels[k].faces.size());
    for (const auto& f : levels[k].faces) {
      int ordinal = child_count[static_cast<std::size_t>(f.parent)]++;
      names[k].push_back(names[k - 1][static_cast<std::size_t>(f.parent)] + "." + std::to_string(ordinal));
    }
  }
  return names;
}

inline std::pair<int, int> edge_endpoints(const CellComplex2& c, const SignedRef& ref) {
  const auto& e = c.edges[static_cast<std::size_t>(ref.index)];
  return ref.sign > 0 ? std::make_pair(e.u, e.v) : std::make_pair(e.v, e.u);
}

}  // namespace detail

struct MeshReport {
  int level = 0;
  bool condition_i = false;
  std::vector<int> offenders_i;  // level-0 edges not properly subdivided
  struct Violation {
    std::string tile;  // level-n tile name
    int edge_a = 0;    // disjoint level-0 boundary edges met by the tile
    int edge_b = 0;
  };
  bool condition_ii = false;
  std::vector<Violation> offenders_ii;

  bool pass() const { return condition_i && condition_ii; }
};

namespace detail {

inline MeshReport mesh_check_levels(const std::vector<CellComplex2>& levels) {
  const int n = static_cast<int>(levels.size()) - 1;
  MeshReport report;
  report.level = n;

  const auto edge_anc = edge_ancestors(levels);
  const auto face_anc = face_ancestors(levels);
  const auto names = face_names(levels);
  const CellComplex2& base = levels.front();
  const CellComplex2& top = levels.back();

  // (i): every level-0 edge decomposes into at least two level-n edges.
  std::vector<int> pieces(base.edges.size(), 0);
  for (std::size_t e = 0; e < top.edges.size(); ++e) {
    int a = edge_anc[static_cast<std::size_t>(n)][e];
    if (a >= 0) ++pieces[static_cast<std::size_t>(a)];
  }
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    if (pieces[e] < 2) report.offenders_i.push_back(static_cast<int>(e));
  }
  report.condition_i = report.offenders_i.empty();

  // (ii): for disjoint boundary edges e, e' of a level-0 tile (no shared
  // endpoint), no level-n tile inside it meets both.
  std::vector<std::vector<std::pair<int, int>>> disjoint_pairs(base.faces.size());
  for (std::size_t f = 0; f < base.faces.size(); ++f) {
    const auto& walk = base.faces[f].walk;
    for (std::size_t i = 0; i < walk.size(); ++i) {
      auto [iu, iv] = edge_endpoints(base, walk[i]);
      for (std::size_t j = i + 1; j < walk.size(); ++j) {
        auto [ju, jv] = edge_endpoints(base, walk[j]);
        if (iu != ju && iu != jv && iv != ju && iv != jv) {
          disjoint_pairs[f].push_back({walk[i].index, walk[j].index});
        }
      }
    }
  }
  for (std::size_t t = 0; t < top.faces.size(); ++t) {
    const int f0 = face_anc[static_cast<std::size_t>(n)][t];
    if (disjoint_pairs[static_cast<std::size_t>(f0)].empty()) continue;
    std::set<int> met;
    for (const auto& ref : top.faces[t].walk) {
      int a = edge_anc[static_cast<std::size_t>(n)][static_cast<std::size_t>(ref.index)];
      if (a >= 0) met.insert(a);
    }
    for (const auto& [ea, eb] : disjoint_pairs[static_cast<std::size_t>(f0)]) {
      if (met.count(ea) && met.count(eb)) {
        report.offenders_ii.push_back({names[static_cast<std::size_t>(n)][t], ea, eb});
      }
    }
  }
  report.condition_ii = report.offenders_ii.empty();
  return report;
}

}  // namespace detail

/// Conditions (i) and (ii) of "mesh going to zero combinatorially" after n
/// refinements, with offending cells listed. Failures are report content,
/// not errors.
inline MeshReport mesh_check(const SubdivisionRule& rule, const CellComplex2& c0, int n) {
  if (n < 1) throw ParseError("mesh check needs n >= 1");
  return detail::mesh_check_levels(refinement_tower(rule, c0, n));
}

/// Smallest n <= max_n at which both mesh conditions hold; nullopt when none
/// (inconclusive: the property is existential in n).
inline std::optional<int> mesh_search(const SubdivisionRule& rule, const CellComplex2& c0, int max_n) {
  if (max_n < 1) throw ParseError("mesh search needs max_n >= 1");
  std::vector<CellComplex2> levels{c0};
  for (int n = 1; n <= max_n; ++n) {
    levels.push_back(refine(levels.back(), rule));
    if (detail::mesh_check_levels(levels).pass()) return n;
  }
  return std::nullopt;
}

enum class TileAdjacency { Vertex, Edge };

/// Tile-adjacency realization of the covering complex: one vertex per tile of
/// each refinement level plus a root, horizontal edges between same-level
/// tiles whose closures intersect, vertical edges by containment. Horizontal
/// labels record the contact multiplicity.
inline ComplexGraph tile_graph(const SubdivisionRule& rule, const CellComplex2& c0, int n,
                               TileAdjacency adjacency = TileAdjacency::Vertex,
                               std::uint64_t tile_budget = 200000) {
  if (n < 0) throw ParseError("negative level");
  std::vector<CellComplex2> levels{c0};
  std::uint64_t total = c0.faces.size();
  for (int k = 1; k <= n; ++k) {
    levels.push_back(refine(levels.back(), rule));
    total += levels.back().faces.size();
    if (total > tile_budget) throw BudgetError("tile graph exceeds the tile budget");
  }
  const auto names = detail::face_names(levels);

  ComplexGraph graph;
  graph.add_vertex("o", -1);
  for (int k = 0; k <= n; ++k) {
    for (const auto& name : names[static_cast<std::size_t>(k)]) graph.add_vertex(name, k);
  }

  // Vertical: root to level 0, then containment.
  for (std::size_t f = 0; f < levels[0].faces.size(); ++f) {
    graph.add_edge(graph.vertex_index("o"), graph.vertex_index(names[0][f]), ComplexGraph::EdgeKind::Vertical,
                   names[0][f]);
  }
  for (int k = 1; k <= n; ++k) {
    for (std::size_t f = 0; f < levels[static_cast<std::size_t>(k)].faces.size(); ++f) {
      const auto& face = levels[static_cast<std::size_t>(k)].faces[f];
      graph.add_edge(graph.vertex_index(names[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(face.parent)]),
                     graph.vertex_index(names[static_cast<std::size_t>(k)][f]), ComplexGraph::EdgeKind::Vertical,
                     names[static_cast<std::size_t>(k)][f]);
    }
  }

  // Horizontal: same-level closure contact (shared vertex, or shared edge).
  for (int k = 0; k <= n; ++k) {
    const CellComplex2& c = levels[static_cast<std::size_t>(k)];
    std::map<std::pair<int, int>, int> contact;  // (face, face) -> multiplicity
    if (adjacency == TileAdjacency::Vertex) {
      std::map<int, std::vector<int>> faces_at_vertex;
      for (std::size_t f = 0; f < c.faces.size(); ++f) {
        std::set<int> verts;
        for (const auto& ref : c.faces[f].walk) verts.insert(detail::edge_endpoints(c, ref).first);
        for (int v : verts) faces_at_vertex[v].push_back(static_cast<int>(f));
      }
      for (const auto& [v, fs] : faces_at_vertex) {
        for (std::size_t i = 0; i < fs.size(); ++i) {
          for (std::size_t j = i + 1; j < fs.size(); ++j) ++contact[{fs[i], fs[j]}];
        }
      }
    } else {
      std::map<int, std::vector<int>> faces_at_edge;
      for (std::size_t f = 0; f < c.faces.size(); ++f) {
        std::set<int> es;
        for (const auto& ref : c.faces[f].walk) es.insert(ref.index);
        for (int e : es) faces_at_edge[e].push_back(static_cast<int>(f));
      }
      for (const auto& [e, fs] : faces_at_edge) {
        for (std::size_t i = 0; i < fs.size(); ++i) {
          for (std::size_t j = i + 1; j < fs.size(); ++j) ++contact[{fs[i], fs[j]}];
        }
      }
    }
    for (const auto& [pair, multiplicity] : contact) {
      graph.add_edge(graph.vertex_index(names[static_cast<std::size_t>(k)][static_cast<std::size_t>(pair.first)]),
                     graph.vertex_index(names[static_cast<std::size_t>(k)][static_cast<std::size_t>(pair.second)]),
                     ComplexGraph::EdgeKind::Horizontal, std::to_string(multiplicity));
    }
  }
  return graph;
}

}  // namespace selfsim
