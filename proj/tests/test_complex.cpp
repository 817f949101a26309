#include <doctest.h>

#include <selfsim/complex.hpp>
#include <selfsim/machine_io.hpp>

using namespace selfsim;

namespace {

std::string fixture(const std::string& name) { return std::string(SELFSIM_FIXTURES_DIR) + "/" + name; }

BisetMachine odometer() { return load_machine(fixture("odometer.json")); }
BisetMachine basilica() { return load_machine(fixture("basilica.json")); }

ComplexGraph path_graph(int n) {
  ComplexGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex("p" + std::to_string(i), 0);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, ComplexGraph::EdgeKind::Horizontal, "");
  return g;
}

ComplexGraph cycle_graph(int n) {
  ComplexGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex("c" + std::to_string(i), 0);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, ComplexGraph::EdgeKind::Horizontal, "");
  return g;
}

}  // namespace

TEST_CASE("odometer truncation at level 2") {
  ComplexGraph g = build_truncation(odometer(), 2);
  CHECK(g.vertex_count() == 7);
  CHECK(g.count_edges(ComplexGraph::EdgeKind::Vertical) == 6);

  // Level-2 horizontal edges form the 4-cycle 00-10-01-11.
  auto has_h = [&](const char* u, const char* v) {
    int iu = g.vertex_index(u), iv = g.vertex_index(v);
    for (const auto& e : g.edges()) {
      if (e.kind != ComplexGraph::EdgeKind::Horizontal) continue;
      if ((e.u == std::min(iu, iv)) && (e.v == std::max(iu, iv))) return true;
    }
    return false;
  };
  CHECK(has_h("00", "10"));
  CHECK(has_h("10", "01"));
  CHECK(has_h("01", "11"));
  CHECK(has_h("11", "00"));
  CHECK(!has_h("00", "01"));
}

TEST_CASE("trivial truncation") {
  ComplexGraph g = build_truncation(odometer(), 0);
  CHECK(g.vertex_count() == 1);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("truncation structure") {
  BisetMachine m = basilica();
  ComplexGraph g = build_truncation(m, 3);
  CHECK(g.vertex_count() == 15);  // 1 + 2 + 4 + 8

  SUBCASE("vertex counts per level are powers of the degree") {
    std::map<int, int> per_level;
    for (const auto& v : g.vertices()) per_level[v.level]++;
    for (int k = 0; k <= 3; ++k) CHECK(per_level[k] == 1 << k);
  }

  SUBCASE("every level-k>=1 vertex has exactly one parent and d children") {
    std::map<int, int> up, down;
    for (const auto& e : g.edges()) {
      if (e.kind != ComplexGraph::EdgeKind::Vertical) continue;
      const auto& vu = g.vertices()[static_cast<std::size_t>(e.u)];
      const auto& vv = g.vertices()[static_cast<std::size_t>(e.v)];
      int lower = vu.level < vv.level ? e.u : e.v;
      int upper = vu.level < vv.level ? e.v : e.u;
      down[lower]++;
      up[upper]++;
    }
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
      int level = g.vertices()[i].level;
      if (level >= 1) CHECK(up[static_cast<int>(i)] == 1);
      if (level <= 2) CHECK(down[static_cast<int>(i)] == 2);
    }
  }

  SUBCASE("shift equivariance of horizontal edges") {
    for (const auto& e : g.edges()) {
      if (e.kind != ComplexGraph::EdgeKind::Horizontal) continue;
      const auto& vu = g.vertices()[static_cast<std::size_t>(e.u)];
      if (vu.level < 2) continue;
      std::vector<int> wu = m.alphabet().parse_word(vu.name);
      std::vector<int> wv = m.alphabet().parse_word(g.vertices()[static_cast<std::size_t>(e.v)].name);
      REQUIRE(!e.labels.empty());
      for (const auto& label : e.labels) {
        // One of the two endpoints is s.(other); identify the direction.
        GroupElement s = m.model().parse(label);
        WordAction a = m.act_word(s, wu);
        std::vector<int> src = wu, dst = wv;
        if (a.word != wv) {
          a = m.act_word(s, wv);
          src = wv;
          dst = wu;
          REQUIRE(a.word == dst);
        }
        // Restriction of the label maps the shifted source to the shifted target.
        LetterAction first = m.act_letter(s, src[0]);
        WordAction shifted = m.act_word(first.restriction, shift_word(src));
        CHECK(shifted.word == shift_word(dst));
      }
    }
  }
}

TEST_CASE("shift") {
  BisetMachine m = odometer();
  CHECK(m.alphabet().format_word(shift_word(m.alphabet().parse_word("011"))) == "11");
  CHECK(m.alphabet().format_word(shift_word(m.alphabet().parse_word("0"))) == "");
  CHECK_THROWS_AS(shift_word(std::vector<int>{}), Error);

  SUBCASE("exactly 2-to-1 on each level of the truncation") {
    ComplexGraph g = build_truncation(m, 3);
    std::map<std::string, int> preimages;
    for (const auto& v : g.vertices()) {
      if (v.level == 0) continue;
      preimages[m.alphabet().format_word(shift_word(m.alphabet().parse_word(v.name)))]++;
    }
    for (const auto& v : g.vertices()) {
      if (v.level >= 3) continue;
      CHECK(preimages[v.name] == 2);
    }
  }
}

TEST_CASE("graph distance") {
  ComplexGraph g = build_truncation(odometer(), 2);
  int w00 = g.vertex_index("00");
  int w11 = g.vertex_index("11");
  CHECK(graph_distance(g, w00, w00) == 0);
  // On the level-2 4-cycle 00-10-01-11-00, {11,00} is an edge and {10,11}
  // are antipodal.
  CHECK(graph_distance(g, w00, w11) == 1);
  CHECK(graph_distance(g, g.vertex_index("10"), w11) == 2);

  SUBCASE("vertical descent is geodesic from the root") {
    ComplexGraph t = build_truncation(odometer(), 5);
    int root = t.vertex_index("");
    for (const auto& v : t.vertices()) {
      auto d = graph_distance(t, root, t.vertex_index(v.name));
      REQUIRE(d.has_value());
      CHECK(*d == v.level);
    }
  }

  SUBCASE("disconnected pair") {
    ComplexGraph two;
    two.add_vertex("x", 0);
    two.add_vertex("y", 0);
    CHECK(!graph_distance(two, 0, 1).has_value());
  }

  SUBCASE("metric axioms on random triples") {
    ComplexGraph t = build_truncation(basilica(), 4);
    const int n = static_cast<int>(t.vertex_count());
    std::vector<std::vector<int>> dist;
    for (int i = 0; i < n; ++i) dist.push_back(bfs_distances(t, i));
    Rng rng(13);
    for (int trial = 0; trial < 2000; ++trial) {
      int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      CHECK(dist[a][b] == dist[b][a]);
      CHECK(dist[a][c] <= dist[a][b] + dist[b][c]);
      CHECK((dist[a][b] == 0) == (a == b));
    }
  }
}

TEST_CASE("delta probe") {
  SUBCASE("path graph is a tree: delta 0") {
    DeltaProbe p = delta_estimate(path_graph(5), std::nullopt);
    CHECK(p.exhaustive);
    CHECK(p.delta_times2 == 0);
  }

  SUBCASE("4-cycle, exhaustive scan") {
    DeltaProbe p = delta_estimate(cycle_graph(4), std::nullopt);
    CHECK(p.exhaustive);
    CHECK(p.delta() == doctest::Approx(1.0));
    CHECK(p.quadruples == 1);
  }

  SUBCASE("degenerate below 4 vertices") {
    DeltaProbe p = delta_estimate(path_graph(3), std::nullopt);
    CHECK(p.degenerate);
  }

  SUBCASE("sampled maximum matches exhaustive on the odometer truncation") {
    ComplexGraph g = build_truncation(odometer(), 6);
    CHECK(g.vertex_count() == 127);
    DeltaProbe full = delta_estimate(g, std::nullopt);
    DeltaProbe sampled = delta_estimate(g, 10000, 2026);
    CHECK(full.exhaustive);
    CHECK(!sampled.exhaustive);
    CHECK(sampled.delta_times2 == full.delta_times2);
  }
}

TEST_CASE("export") {
  BisetMachine m = odometer();

  SUBCASE("single node DOT") {
    std::string dot = export_dot(build_truncation(m, 0));
    CHECK(dot.find("graph complex") != std::string::npos);
    CHECK(dot.find("n0") != std::string::npos);
  }

  SUBCASE("level-1 counts") {
    ComplexGraph g = build_truncation(m, 1);
    CHECK(g.vertex_count() == 3);
    CHECK(g.count_edges(ComplexGraph::EdgeKind::Horizontal) == 1);
    CHECK(g.count_edges(ComplexGraph::EdgeKind::Vertical) == 2);
    std::string dot = export_dot(g);
    CHECK(dot.find("label=\"a\"") != std::string::npos);
  }

  SUBCASE("JSON round-trip is byte-identical") {
    ComplexGraph g = build_truncation(m, 3);
    std::string once = export_json(g);
    ComplexGraph g2 = parse_graph_json(once);
    std::string twice = export_json(g2);
    CHECK(once == twice);
  }
}
