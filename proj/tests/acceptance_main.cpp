/* Acceptance suite: end-to-end criteria with pinned tolerances and runtime
 * budgets. Prints one PASS/FAIL line per criterion and exits nonzero when
 * any criterion fails. */

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <selfsim/complex.hpp>
#include <selfsim/contraction.hpp>
#include <selfsim/machine_io.hpp>
#include <selfsim/subdivision_io.hpp>
#include <selfsim/torus.hpp>

using namespace selfsim;
using ordered_json = nlohmann::ordered_json;

namespace {

int failures = 0;

struct Check {
  std::string name;
  double limit_seconds;
  std::function<void(std::ostream&)> body;  // throws on failure, may add detail
};

void run(const Check& check) {
  std::ostringstream detail;
  auto start = std::chrono::steady_clock::now();
  std::string error;
  try {
    check.body(detail);
  } catch (const std::exception& e) {
    error = e.what();
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (error.empty() && seconds > check.limit_seconds) {
    error = "runtime " + std::to_string(seconds) + "s exceeds the " + std::to_string(check.limit_seconds) +
            "s budget";
  }
  if (error.empty()) {
    std::printf("[PASS] %s (%.2fs%s%s)\n", check.name.c_str(), seconds,
                detail.str().empty() ? "" : "; ", detail.str().c_str());
  } else {
    ++failures;
    std::printf("[FAIL] %s (%.2fs): %s\n", check.name.c_str(), seconds, error.c_str());
  }
  std::fflush(stdout);
}

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

std::string fixture(const std::string& name) { return std::string(SELFSIM_FIXTURES_DIR) + "/" + name; }

GroupElement random_element(const BisetMachine& m, Rng& rng, int max_len) {
  if (m.model().kind() == GroupKind::Free) {
    std::vector<std::int64_t> raw;
    const std::int64_t len = rng.range(0, max_len);
    for (std::int64_t i = 0; i < len; ++i) {
      raw.push_back((rng.below(2) ? 1 : -1) * rng.range(1, m.model().rank()));
    }
    return m.model().reduce(raw);
  }
  std::vector<std::int64_t> coords;
  for (int i = 0; i < m.model().rank(); ++i) coords.push_back(rng.range(-max_len, max_len));
  return m.model().from_vector(std::move(coords));
}

std::vector<int> random_word(const BisetMachine& m, Rng& rng, int max_len) {
  std::vector<int> w;
  const std::int64_t len = rng.range(1, max_len);
  for (std::int64_t i = 0; i < len; ++i) {
    w.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(m.degree()))));
  }
  return w;
}

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(SELFSIM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw Error("cannot spawn the CLI");
  RunResult result;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.stdout_text.append(buf.data(), n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace

int main() {
  // 1. Cocycle law on the four fixtures, 1000 random triples each, exact.
  run({"criterion 1: cocycle law act_word(gh, w) = (g(h(w)), g|_{h.w} h|_w)", 5.0, [](std::ostream& detail) {
         const std::vector<std::pair<std::string, BisetMachine>> machines = {
             {"odometer", load_machine(fixture("odometer.json"))},
             {"basilica", load_machine(fixture("basilica.json"))},
             {"torus 2Id", torus_biset({2, 0, 0, 2})},
             {"torus [[2,0],[1,1]]", torus_biset({2, 0, 1, 1})},
         };
         std::uint64_t seed = 1001;
         for (const auto& [name, m] : machines) {
           Rng rng(seed++);
           for (int t = 0; t < 1000; ++t) {
             GroupElement g = random_element(m, rng, 6);
             GroupElement h = random_element(m, rng, 6);
             std::vector<int> w = random_word(m, rng, 5);
             WordAction hw = m.act_word(h, w);
             WordAction ghw = m.act_word(g, hw.word);
             WordAction product = m.act_word(multiply(g, h), w);
             require(product.word == ghw.word, name + ": letter parts differ");
             require(product.restriction == multiply(ghw.restriction, hw.restriction),
                     name + ": restriction parts differ");
           }
         }
         detail << "4 fixtures x 1000 triples";
       }});

  // 2. Odometer nucleus: exactly {1, a, a^-1}, closure verified exhaustively.
  run({"criterion 2: odometer nucleus = {1, a, a^-1}", 1.0, [](std::ostream& detail) {
         BisetMachine m = load_machine(fixture("odometer.json"));
         ContractionReport rep = nucleus(m);
         require(rep.status == ContractionStatus::Contracting, "status is not contracting");
         require(rep.nucleus.size() == 3, "nucleus size is not 3");
         require(rep.stats.certificate_depth == 1, "closure did not stabilize at depth 1");
         GroupElement a = m.model().parse("a");
         require(std::count(rep.nucleus.begin(), rep.nucleus.end(), m.model().identity()) == 1, "missing identity");
         require(std::count(rep.nucleus.begin(), rep.nucleus.end(), a) == 1, "missing a");
         require(std::count(rep.nucleus.begin(), rep.nucleus.end(), invert(a)) == 1, "missing a^-1");
         require(verify_nucleus(m, rep.nucleus, 1), "post-hoc pair-product closure failed");
         detail << "closure verified at depth 1";
       }});

  // 3. Basilica: contracting with a finite absorbing set; no Levy witness.
  run({"criterion 3: basilica contracts, levy search empty at bounds 4/4", 30.0, [](std::ostream& detail) {
         BisetMachine m = load_machine(fixture("basilica.json"));
         ContractionReport rep = nucleus(m);
         require(rep.status == ContractionStatus::Contracting, "status is not contracting");
         require(!rep.nucleus.empty(), "empty nucleus");
         require(verify_nucleus(m, rep.nucleus, rep.stats.certificate_depth),
                 "pair products do not absorb at the reported depth");
         require(!levy_search(m, 4, 4).has_value(), "unexpected levy witness");
         detail << "nucleus size " << rep.nucleus.size() << ", absorbs pair products at depth "
                << rep.stats.certificate_depth;
       }});

  // 4. Torus oracle equivalence over entries in [-3,3], det in [2,9].
  run({"criterion 4: torus sweep oracle equivalence (nucleus vs spectrum)", 300.0, [](std::ostream& detail) {
         Budget budget{500, 50, 30};
         auto rows = torus_sweep(3, 9, budget, 8, 3);
         std::int64_t units = 0;
         for (const auto& row : rows) {
           require(row.agree, row.matrix.str() + ": nucleus verdict disagrees with the classifier");
           require(row.float_agree, row.matrix.str() + ": integer and floating classifications disagree");
           if (row.cls == TorusClass::UnitEigenvalue) {
             ++units;
             require(row.unit_witness_ok, row.matrix.str() + ": no replayable levy witness");
           }
         }
         require(!rows.empty() && units > 0, "sweep did not cover the expected classes");
         detail << rows.size() << " matrices, " << units << " unit-eigenvalue cases";
       }});

  // 5. Built-in obstruction fixture.
  run({"criterion 5: fixed-restriction machine yields witness (g, \"0\")", 1.0, [](std::ostream&) {
         BisetMachine m = load_machine(fixture("fixed_restriction.json"));
         ContractionReport rep = nucleus(m);
         require(rep.status == ContractionStatus::ObstructionFound, "obstruction not found");
         require(rep.witness.has_value(), "missing witness");
         require(rep.witness->kind == LevyWitness::Kind::ExactFixed, "wrong witness kind");
         require(rep.witness->element == m.model().parse("g"), "witness element is not g");
         require(rep.witness->word == std::vector<int>{0}, "witness word is not \"0\"");
         require(replay_witness(m, *rep.witness), "witness does not replay");
       }});

  // 6. Self-similarity complex truncation structure at level 6.
  run({"criterion 6: odometer truncation level 6 structure", 5.0, [](std::ostream& detail) {
         BisetMachine m = load_machine(fixture("odometer.json"));
         ComplexGraph g = build_truncation(m, 6);
         require(g.vertex_count() == 127, "vertex count is not 127");

         std::map<int, int> parents;
         for (const auto& e : g.edges()) {
           if (e.kind != ComplexGraph::EdgeKind::Vertical) continue;
           const auto& vu = g.vertices()[static_cast<std::size_t>(e.u)];
           const auto& vv = g.vertices()[static_cast<std::size_t>(e.v)];
           parents[vu.level > vv.level ? e.u : e.v] += 1;
         }
         for (std::size_t i = 0; i < g.vertex_count(); ++i) {
           if (g.vertices()[i].level >= 1) {
             require(parents[static_cast<int>(i)] == 1, "a vertex does not have exactly one parent");
           }
         }

         GroupElement a = m.model().parse("a");
         for (int k = 1; k <= 6; ++k) {
           auto perm = m.level_action(a, k);
           std::uint64_t steps = 0, at = 0;
           do {
             at = perm[at];
             ++steps;
           } while (at != 0);
           require(steps == (1ull << k), "level action of a is not a single 2^k cycle");
         }

         std::map<std::string, int> preimages;
         for (const auto& v : g.vertices()) {
           if (v.level == 0) continue;
           preimages[m.alphabet().format_word(shift_word(m.alphabet().parse_word(v.name)))] += 1;
         }
         for (const auto& v : g.vertices()) {
           if (v.level >= 6) continue;
           require(preimages[v.name] == 2, "shift is not exactly 2-to-1 at " + (v.name.empty() ? "root" : v.name));
         }
         detail << "127 vertices, unique parents, 2^k cycles, 2-to-1 shift";
       }});

  // 7. Contraction ratio of the odometer: exactly 1/2 at depths 1..4.
  run({"criterion 7: odometer contraction ratio is exactly 1/2 at n=1..4", 10.0, [](std::ostream&) {
         BisetMachine m = load_machine(fixture("odometer.json"));
         for (int n = 1; n <= 4; ++n) {
           RatioEstimate est = contraction_ratio_estimate(m, n, 16);
           require(!est.inconclusive, "empty domain sample at depth " + std::to_string(n));
           require(est.exact_root.has_value(), "no exact root at depth " + std::to_string(n));
           require(*est.exact_root == Rational(1, 2), "estimate differs from 1/2 at depth " + std::to_string(n));
         }
       }});

  // 8. Mesh conditions on the three rule fixtures; sphere invariant throughout.
  run({"criterion 8: subdivision mesh checks", 5.0, [](std::ostream& detail) {
         SubdivisionRule quad = parse_rule(read_file(fixture("quad2x2.json")));
         CellComplex2 quad_c0 = build_base_complex(quad);
         require(mesh_search(quad, quad_c0, 3) == 1, "quad 2x2 did not pass at level 1");

         SubdivisionRule strip = parse_rule(read_file(fixture("quad1x2.json")));
         CellComplex2 strip_c0 = build_base_complex(strip);
         require(!mesh_search(strip, strip_c0, 5).has_value(), "quad 1x2 unexpectedly passed");
         MeshReport strip_rep = mesh_check(strip, strip_c0, 5);
         std::vector<int> vertical_edges;
         for (std::size_t e = 0; e < strip_c0.edges.size(); ++e) {
           if (strip_c0.edges[e].type == "Ev") vertical_edges.push_back(static_cast<int>(e));
         }
         require(strip_rep.offenders_i == vertical_edges,
                 "condition (i) offenders are not exactly the vertical ancestor edges");

         SubdivisionRule delayed = parse_rule(read_file(fixture("delayed_split.json")));
         CellComplex2 delayed_c0 = build_base_complex(delayed);
         require(mesh_search(delayed, delayed_c0, 5) == 2, "delayed rule did not pass first at level 2");

         for (const auto& [rule, c0] : {std::pair<const SubdivisionRule&, const CellComplex2&>{quad, quad_c0},
                                        {strip, strip_c0},
                                        {delayed, delayed_c0}}) {
           for (const auto& level : refinement_tower(rule, c0, 3)) level.verify_sphere();
         }
         detail << "quad2x2 at 1, quad1x2 none<=5, delayed at 2, spheres OK";
       }});

  // 9. Metric sanity and delta probe agreement.
  run({"criterion 9: graph metric sanity and delta probe", 30.0, [](std::ostream& detail) {
         BisetMachine m = load_machine(fixture("odometer.json"));
         ComplexGraph sigma = build_truncation(m, 5);
         SubdivisionRule quad = parse_rule(read_file(fixture("quad2x2.json")));
         ComplexGraph gamma = tile_graph(quad, build_base_complex(quad), 4);

         std::uint64_t seed = 9001;
         for (const ComplexGraph* g : {&sigma, &gamma}) {
           const int n = static_cast<int>(g->vertex_count());
           std::vector<std::vector<int>> dist;
           dist.reserve(static_cast<std::size_t>(n));
           for (int i = 0; i < n; ++i) {
             dist.push_back(bfs_distances(*g, i));
             for (int d : dist.back()) require(d >= 0, "graph is not connected");
           }
           Rng rng(seed++);
           for (int t = 0; t < 10000; ++t) {
             int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
             int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
             int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
             require(dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] ==
                         dist[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)],
                     "distance symmetry failed");
             require(dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] <=
                         dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +
                             dist[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)],
                     "triangle inequality failed");
           }
         }

         // Exhaustive equals sampled maximum on graphs with <= 200 vertices.
         ComplexGraph small_gamma = tile_graph(quad, build_base_complex(quad), 2);
         for (const ComplexGraph* g : {&sigma, &small_gamma}) {
           require(g->vertex_count() <= 200, "probe graph exceeds 200 vertices");
           DeltaProbe full = delta_estimate(*g, std::nullopt);
           DeltaProbe sampled = delta_estimate(*g, 10000, 2026);
           require(full.exhaustive, "exhaustive probe flag missing");
           require(full.delta_times2 == sampled.delta_times2, "sampled maximum differs from exhaustive");
         }
         detail << "sigma(odometer,5): " << sigma.vertex_count() << " vertices, gamma(quad2x2,4): "
                << gamma.vertex_count() << " vertices";
       }});

  // 10. Determinism of every CLI subcommand with a fixed seed.
  run({"criterion 10: CLI determinism (byte-identical canonical reports)", 60.0, [](std::ostream& detail) {
         const std::vector<std::string> cases = {
             "contract " + fixture("odometer.json") + " --seed 5",
             "levy " + fixture("fixed_restriction.json") + " --max-g 3 --max-w 3 --seed 5",
             "ratio " + fixture("odometer.json") + " --depth 3 --len 12 --seed 5",
             "complex " + fixture("odometer.json") + " --levels 4 --delta samples=500 --seed 5",
             "torus --matrix 2,1,1,2 --seed 5",
             "torus sweep --range 2 --det-max 5",
             "fsr check " + fixture("quad2x2.json") + " --max-n 2 --seed 5",
             "fsr graph " + fixture("quad2x2.json") + " --levels 2 --delta samples=300 --seed 5",
         };
         for (const auto& args : cases) {
           RunResult a = run_cli(args);
           RunResult b = run_cli(args);
           require(a.exit_code == b.exit_code, "exit codes differ for: " + args);
           ordered_json da = ordered_json::parse(a.stdout_text);
           ordered_json db = ordered_json::parse(b.stdout_text);
           require(da.at("report").dump() == db.at("report").dump(),
                   "canonical report sections differ for: " + args);
         }
         detail << cases.size() << " subcommands";
       }});

  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", failures);
  return 1;
}
