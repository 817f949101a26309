/* selfsim -- command line front end: contraction analysis, Levy obstruction
 * search, self-similarity complex truncations, torus endomorphism
 * classification, and finite subdivision rule checks.
 *
 * Every run prints one JSON document: a deterministic "report" section
 * (identical bytes for identical inputs, budgets and seed) plus a "timing"
 * section that is excluded from determinism guarantees.
 *
 * Exit codes: 0 normal, 10 obstruction found, 20 budget exceeded or
 * inconclusive, 2 malformed input. */

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <selfsim/common.hpp>
#include <selfsim/complex.hpp>
#include <selfsim/contraction.hpp>
#include <selfsim/machine_io.hpp>
#include <selfsim/subdivision_io.hpp>
#include <selfsim/torus.hpp>

using namespace selfsim;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitObstruction = 10;
constexpr int kExitInconclusive = 20;
constexpr int kExitInputError = 2;

struct Output {
  std::string format = "json";  // json | text (dot applies to graph payloads)
  std::string out_path;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Output& out, bool graph_output = false) {
  if (graph_output) {
    cmd->add_option("--format", out.format, "report format: json, text, or dot (graph to stdout)")
        ->check(CLI::IsMember({"json", "text", "dot"}));
  } else {
    cmd->add_option("--format", out.format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
  }
  cmd->add_option("--out", out.out_path, "write the report to a file instead of stdout");
  cmd->add_option("--seed", out.seed, "seed recorded in the report and used for sampling");
}

ordered_json input_section(const std::string& path, const std::string& bytes) {
  return ordered_json{{"path", path}, {"digest", "fnv1a:" + hex64(fnv1a(bytes))}};
}

ordered_json budget_section(const Budget& b) {
  return ordered_json{{"max_nucleus_size", b.max_nucleus_size},
                      {"max_element_length", b.max_element_length},
                      {"max_depth", b.max_depth}};
}

ordered_json report_shell(const std::string& subcommand, std::uint64_t seed) {
  ordered_json rep;
  rep["tool"] = "selfsim";
  rep["version"] = std::string(kVersion);
  rep["subcommand"] = subcommand;
  rep["seed"] = seed;
  return rep;
}

void attach_caveat(ordered_json& rep, const BisetMachine& machine) {
  if (machine.model().kind() == GroupKind::Free) rep["caveat"] = std::string(kFreeModelCaveat);
}

std::string word_string(const BisetMachine& m, const std::vector<int>& w) {
  return m.alphabet().format_word(w);
}

ordered_json witness_json(const BisetMachine& m, const LevyWitness& w) {
  ordered_json doc;
  if (w.kind == LevyWitness::Kind::ExactFixed) {
    doc["kind"] = "exact_fixed";
    doc["element"] = m.model().format(w.element);
    doc["word"] = word_string(m, w.word);
  } else {
    doc["kind"] = "restriction_cycle";
    ordered_json elements = ordered_json::array();
    ordered_json letters = ordered_json::array();
    for (const auto& g : w.cycle) elements.push_back(m.model().format(g));
    for (int x : w.cycle_letters) letters.push_back(m.alphabet().labels[static_cast<std::size_t>(x)]);
    doc["elements"] = std::move(elements);
    doc["letters"] = std::move(letters);
  }
  return doc;
}

// Text output is a projection of the JSON report.
void render_text(const ordered_json& node, const std::string& prefix, std::ostream& os) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object() || value.is_array()) {
        render_text(value, prefix.empty() ? key : prefix + "." + key, os);
      } else {
        os << (prefix.empty() ? key : prefix + "." + key) << ": " << value.dump() << "\n";
      }
    }
  } else if (node.is_array()) {
    int i = 0;
    for (const auto& value : node) {
      render_text(value, prefix + "[" + std::to_string(i++) + "]", os);
    }
  } else {
    os << prefix << ": " << node.dump() << "\n";
  }
}

int emit(const ordered_json& report, const Output& out, int exit_code,
         std::chrono::steady_clock::time_point started) {
  ordered_json doc;
  doc["report"] = report;
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  doc["timing"] = ordered_json{{"wall_ms", elapsed.count()}};

  std::string text;
  if (out.format == "text") {
    std::ostringstream os;
    render_text(doc["report"], "", os);
    text = os.str();
  } else {
    text = doc.dump(2) + "\n";
  }
  if (out.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out.out_path, std::ios::binary);
    if (!f) throw ParseError("cannot write to " + out.out_path);
    f << text;
  }
  return exit_code;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write to " + path);
  f << bytes;
}

ordered_json contraction_result(const BisetMachine& machine, const ContractionReport& rep) {
  ordered_json result;
  result["status"] = to_string(rep.status);
  if (rep.status == ContractionStatus::Contracting) {
    ordered_json nucleus = ordered_json::array();
    for (const auto& g : rep.nucleus) nucleus.push_back(machine.model().format(g));
    result["nucleus"] = std::move(nucleus);
    result["nucleus_size"] = rep.nucleus.size();
  }
  if (rep.witness) result["witness"] = witness_json(machine, *rep.witness);
  if (!rep.note.empty()) result["note"] = rep.note;
  result["stats"] = ordered_json{{"iterations", rep.stats.iterations},
                                 {"peak_size", rep.stats.peak_size},
                                 {"certificate_depth", rep.stats.certificate_depth},
                                 {"explored", rep.stats.explored}};
  return result;
}

ordered_json delta_json(const DeltaProbe& probe) {
  return ordered_json{{"delta", probe.delta()},          {"delta_times2", probe.delta_times2},
                      {"quadruples", probe.quadruples},  {"exhaustive", probe.exhaustive},
                      {"degenerate", probe.degenerate},  {"seed", probe.seed}};
}

ordered_json graph_summary(const ComplexGraph& g) {
  return ordered_json{{"vertices", g.vertex_count()},
                      {"horizontal_edges", g.count_edges(ComplexGraph::EdgeKind::Horizontal)},
                      {"vertical_edges", g.count_edges(ComplexGraph::EdgeKind::Vertical)}};
}

ordered_json mesh_report_json(const MeshReport& rep) {
  ordered_json doc;
  doc["level"] = rep.level;
  doc["condition_i"] = ordered_json{{"pass", rep.condition_i}, {"offending_edges", rep.offenders_i}};
  ordered_json viols = ordered_json::array();
  for (const auto& v : rep.offenders_ii) {
    viols.push_back(ordered_json{{"tile", v.tile}, {"edge_a", v.edge_a}, {"edge_b", v.edge_b}});
  }
  doc["condition_ii"] = ordered_json{{"pass", rep.condition_ii}, {"violations", std::move(viols)}};
  doc["pass"] = rep.pass();
  return doc;
}

std::optional<std::int64_t> parse_delta_spec(const std::string& spec, std::uint64_t& seed_io) {
  // "exhaustive" or "samples=K[,seed=S]"
  if (spec == "exhaustive") return std::nullopt;
  if (spec.rfind("samples=", 0) != 0) throw ParseError("--delta takes 'exhaustive' or 'samples=K[,seed=S]'");
  std::string rest = spec.substr(8);
  std::size_t comma = rest.find(',');
  std::int64_t samples = std::stoll(rest.substr(0, comma));
  if (samples <= 0) throw ParseError("sample count must be positive");
  if (comma != std::string::npos) {
    std::string seed_part = rest.substr(comma + 1);
    if (seed_part.rfind("seed=", 0) != 0) throw ParseError("--delta takes 'exhaustive' or 'samples=K[,seed=S]'");
    seed_io = std::stoull(seed_part.substr(5));
  }
  return samples;
}

IntMatrix2 parse_matrix(const std::string& csv) {
  std::array<std::int64_t, 4> entries{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok.empty() || (comma == std::string::npos) != (i == 3)) {
      throw ParseError("--matrix takes four comma-separated integers a,b,c,d");
    }
    std::size_t used = 0;
    entries[static_cast<std::size_t>(i)] = std::stoll(tok, &used);
    if (used != tok.size()) throw ParseError("malformed matrix entry: " + tok);
    pos = comma + 1;
  }
  return {entries[0], entries[1], entries[2], entries[3]};
}

}  // namespace

int main(int argc, char** argv) {
  auto started = std::chrono::steady_clock::now();

  CLI::App app{"algebraic analysis of self-similar group actions, torus endomorphisms and subdivision rules"};
  app.require_subcommand(1);

  Output out;
  Budget budget;
  std::string machine_path, rule_path;
  int levels = 2;
  std::int64_t ratio_len = 16;
  int ratio_depth = 4;
  std::int64_t levy_max_g = 6;
  int levy_max_w = 4;
  std::string dot_path, json_path, delta_spec, adjacency = "vertex", matrix_csv, emit_biset_path;
  int mesh_max_n = 5;
  std::int64_t sweep_range = 3, sweep_det_max = 9;

  auto* contract = app.add_subcommand("contract", "decide contraction by nucleus closure");
  contract->add_option("machine", machine_path, "machine JSON file")->required();
  contract->add_option("--max-size", budget.max_nucleus_size, "nucleus size budget");
  contract->add_option("--max-len", budget.max_element_length, "element length budget");
  contract->add_option("--max-iter", budget.max_depth, "iteration/depth budget");
  add_common(contract, out);

  auto* levy = app.add_subcommand("levy", "search for a Levy-type witness g.w = w.g");
  levy->add_option("machine", machine_path)->required();
  levy->add_option("--max-g", levy_max_g, "element length bound");
  levy->add_option("--max-w", levy_max_w, "word length bound");
  add_common(levy, out);

  auto* ratio = app.add_subcommand("ratio", "estimate the contraction ratio");
  ratio->add_option("machine", machine_path)->required();
  ratio->add_option("--depth", ratio_depth, "largest iterate depth n");
  ratio->add_option("--len", ratio_len, "element length window upper bound L");
  add_common(ratio, out);

  auto* complex_cmd = app.add_subcommand("complex", "build a truncation of the self-similarity complex");
  complex_cmd->add_option("machine", machine_path)->required();
  complex_cmd->add_option("--levels", levels, "truncation depth")->required();
  complex_cmd->add_option("--dot", dot_path, "write DOT to this file");
  complex_cmd->add_option("--json", json_path, "write the graph JSON to this file");
  complex_cmd->add_option("--delta", delta_spec, "probe hyperbolicity: exhaustive | samples=K[,seed=S]");
  add_common(complex_cmd, out, true);

  auto* torus_cmd = app.add_subcommand("torus", "classify an integer torus endomorphism");
  torus_cmd->add_option("--matrix", matrix_csv, "matrix a,b,c,d (row major)");
  torus_cmd->add_option("--emit-biset", emit_biset_path, "write the induced Z^2 machine to this file");
  add_common(torus_cmd, out);

  auto* sweep_cmd = torus_cmd->add_subcommand("sweep", "nucleus-vs-classifier sweep over a matrix box");
  sweep_cmd->add_option("--range", sweep_range, "entry range [-range, range]");
  sweep_cmd->add_option("--det-max", sweep_det_max, "largest determinant");
  sweep_cmd->add_option("--max-size", budget.max_nucleus_size);
  sweep_cmd->add_option("--max-len", budget.max_element_length);
  sweep_cmd->add_option("--max-iter", budget.max_depth);
  add_common(sweep_cmd, out);

  auto* fsr = app.add_subcommand("fsr", "finite subdivision rules");
  fsr->require_subcommand(1);
  auto* fsr_check = fsr->add_subcommand("check", "mesh-going-to-zero conditions");
  fsr_check->add_option("rule", rule_path, "rule JSON file")->required();
  fsr_check->add_option("--max-n", mesh_max_n, "largest level to try");
  add_common(fsr_check, out);
  auto* fsr_graph = fsr->add_subcommand("graph", "tile-adjacency covering graph");
  fsr_graph->add_option("rule", rule_path, "rule JSON file")->required();
  fsr_graph->add_option("--levels", levels, "number of refinement levels")->required();
  fsr_graph->add_option("--dot", dot_path, "write DOT to this file");
  fsr_graph->add_option("--json", json_path, "write the graph JSON to this file");
  fsr_graph->add_option("--adjacency", adjacency, "closure contact: vertex or edge")
      ->check(CLI::IsMember({"vertex", "edge"}));
  fsr_graph->add_option("--delta", delta_spec, "probe hyperbolicity: exhaustive | samples=K[,seed=S]");
  add_common(fsr_graph, out, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    budget.check();

    if (contract->parsed()) {
      std::string bytes = read_file(machine_path);
      BisetMachine machine = parse_machine(bytes);
      ordered_json rep = report_shell("contract", out.seed);
      rep["input"] = input_section(machine_path, bytes);
      rep["budgets"] = budget_section(budget);
      attach_caveat(rep, machine);
      ContractionReport result = nucleus(machine, budget);
      rep["result"] = contraction_result(machine, result);
      int code = result.status == ContractionStatus::ObstructionFound  ? kExitObstruction
                 : result.status == ContractionStatus::BudgetExceeded ? kExitInconclusive
                                                                      : kExitOk;
      return emit(rep, out, code, started);
    }

    if (levy->parsed()) {
      std::string bytes = read_file(machine_path);
      BisetMachine machine = parse_machine(bytes);
      ordered_json rep = report_shell("levy", out.seed);
      rep["input"] = input_section(machine_path, bytes);
      rep["bounds"] = ordered_json{{"max_g", levy_max_g}, {"max_w", levy_max_w}};
      attach_caveat(rep, machine);
      auto witness = levy_search(machine, levy_max_g, levy_max_w);
      rep["result"] = ordered_json{{"witness", witness ? witness_json(machine, *witness) : ordered_json(nullptr)}};
      return emit(rep, out, witness ? kExitObstruction : kExitOk, started);
    }

    if (ratio->parsed()) {
      std::string bytes = read_file(machine_path);
      BisetMachine machine = parse_machine(bytes);
      ordered_json rep = report_shell("ratio", out.seed);
      rep["input"] = input_section(machine_path, bytes);
      rep["parameters"] = ordered_json{{"depth", ratio_depth}, {"len", ratio_len}};
      attach_caveat(rep, machine);
      ordered_json rows = ordered_json::array();
      bool any_inconclusive = false;
      for (int n = 1; n <= ratio_depth; ++n) {
        RatioEstimate est = contraction_ratio_estimate(machine, n, ratio_len, out.seed);
        ordered_json row;
        row["n"] = est.depth;
        row["candidates"] = est.candidates;
        row["domain_hits"] = est.domain_hits;
        row["sampled"] = est.sampled;
        row["max_ratio"] = est.max_ratio.str();
        row["root"] = est.root;
        row["root_exact"] = est.exact_root ? ordered_json(est.exact_root->str()) : ordered_json(nullptr);
        row["degenerate"] = est.degenerate;
        row["inconclusive"] = est.inconclusive;
        any_inconclusive = any_inconclusive || est.inconclusive;
        rows.push_back(std::move(row));
      }
      rep["result"] = ordered_json{{"table", std::move(rows)}};
      return emit(rep, out, any_inconclusive ? kExitInconclusive : kExitOk, started);
    }

    if (complex_cmd->parsed()) {
      std::string bytes = read_file(machine_path);
      BisetMachine machine = parse_machine(bytes);
      ordered_json rep = report_shell("complex", out.seed);
      rep["input"] = input_section(machine_path, bytes);
      rep["parameters"] = ordered_json{{"levels", levels}};
      attach_caveat(rep, machine);
      ComplexGraph graph = build_truncation(machine, levels);
      if (out.format == "dot") {
        std::string dot = export_dot(graph);
        if (out.out_path.empty()) {
          std::cout << dot;
        } else {
          write_file(out.out_path, dot);
        }
        return kExitOk;
      }
      ordered_json result = graph_summary(graph);
      if (!delta_spec.empty()) {
        std::uint64_t seed = out.seed;
        auto samples = parse_delta_spec(delta_spec, seed);
        result["delta"] = delta_json(delta_estimate(graph, samples, seed));
      }
      if (!dot_path.empty()) {
        write_file(dot_path, export_dot(graph));
        result["dot_file"] = dot_path;
      }
      if (!json_path.empty()) {
        write_file(json_path, export_json(graph));
        result["json_file"] = json_path;
      }
      rep["result"] = std::move(result);
      return emit(rep, out, kExitOk, started);
    }

    if (torus_cmd->parsed() && !sweep_cmd->parsed()) {
      if (matrix_csv.empty()) throw ParseError("torus needs --matrix a,b,c,d (or the sweep subcommand)");
      IntMatrix2 A = parse_matrix(matrix_csv);
      ordered_json rep = report_shell("torus", out.seed);
      rep["input"] = ordered_json{{"matrix", {A.a, A.b, A.c, A.d}}};
      TorusClassification cls = classify(A);
      ordered_json result;
      result["class"] = to_string(cls.cls);
      if (cls.cls == TorusClass::UnitEigenvalue) result["sign"] = cls.unit_sign;
      result["trace"] = cls.trace;
      result["det"] = cls.det;
      result["discriminant"] = cls.discriminant;
      result["roots"] = cls.roots;
      auto witness = unit_eigen_witness(A);
      result["witness"] = witness ? ordered_json({(*witness)[0], (*witness)[1]}) : ordered_json(nullptr);
      if (!emit_biset_path.empty()) {
        write_file(emit_biset_path, machine_to_json(torus_biset(A)).dump(2) + "\n");
        result["emitted_biset"] = emit_biset_path;
      }
      rep["result"] = std::move(result);
      return emit(rep, out, kExitOk, started);
    }

    if (sweep_cmd->parsed()) {
      ordered_json rep = report_shell("torus sweep", out.seed);
      rep["parameters"] = ordered_json{{"range", sweep_range}, {"det_max", sweep_det_max}};
      rep["budgets"] = budget_section(budget);
      ordered_json rows = ordered_json::array();
      std::int64_t agreements = 0, units = 0;
      auto sweep_rows = torus_sweep(sweep_range, sweep_det_max, budget);
      for (const auto& row : sweep_rows) {
        agreements += row.agree ? 1 : 0;
        units += row.cls == TorusClass::UnitEigenvalue ? 1 : 0;
        rows.push_back(ordered_json{{"matrix", {row.matrix.a, row.matrix.b, row.matrix.c, row.matrix.d}},
                                    {"class", to_string(row.cls)},
                                    {"nucleus_status", to_string(row.nucleus_status)},
                                    {"nucleus_size", row.nucleus_size},
                                    {"agree", row.agree},
                                    {"float_agree", row.float_agree},
                                    {"unit_witness_ok", row.unit_witness_ok}});
      }
      rep["result"] = ordered_json{{"rows", std::move(rows)},
                                   {"summary", ordered_json{{"total", sweep_rows.size()},
                                                            {"agreements", agreements},
                                                            {"unit_count", units}}}};
      return emit(rep, out, kExitOk, started);
    }

    if (fsr_check->parsed()) {
      std::string bytes = read_file(rule_path);
      SubdivisionRule rule = parse_rule(bytes);
      CellComplex2 c0 = build_base_complex(rule);
      ordered_json rep = report_shell("fsr check", out.seed);
      rep["input"] = input_section(rule_path, bytes);
      rep["parameters"] = ordered_json{{"max_n", mesh_max_n}};
      auto found = mesh_search(rule, c0, mesh_max_n);
      ordered_json per_level = ordered_json::array();
      for (int n = 1; n <= (found ? *found : mesh_max_n); ++n) {
        per_level.push_back(mesh_report_json(mesh_check(rule, c0, n)));
      }
      rep["result"] = ordered_json{{"found", found ? ordered_json(*found) : ordered_json(nullptr)},
                                   {"levels", std::move(per_level)}};
      return emit(rep, out, found ? kExitOk : kExitInconclusive, started);
    }

    if (fsr_graph->parsed()) {
      std::string bytes = read_file(rule_path);
      SubdivisionRule rule = parse_rule(bytes);
      CellComplex2 c0 = build_base_complex(rule);
      ordered_json rep = report_shell("fsr graph", out.seed);
      rep["input"] = input_section(rule_path, bytes);
      rep["parameters"] = ordered_json{{"levels", levels}, {"adjacency", adjacency}};
      ComplexGraph graph = tile_graph(rule, c0, levels,
                                      adjacency == "vertex" ? TileAdjacency::Vertex : TileAdjacency::Edge);
      if (out.format == "dot") {
        std::string dot = export_dot(graph);
        if (out.out_path.empty()) {
          std::cout << dot;
        } else {
          write_file(out.out_path, dot);
        }
        return kExitOk;
      }
      ordered_json result = graph_summary(graph);
      if (!delta_spec.empty()) {
        std::uint64_t seed = out.seed;
        auto samples = parse_delta_spec(delta_spec, seed);
        result["delta"] = delta_json(delta_estimate(graph, samples, seed));
      }
      if (!dot_path.empty()) {
        write_file(dot_path, export_dot(graph));
        result["dot_file"] = dot_path;
      }
      if (!json_path.empty()) {
        write_file(json_path, export_json(graph));
        result["json_file"] = json_path;
      }
      rep["result"] = std::move(result);
      return emit(rep, out, kExitOk, started);
    }

    throw ParseError("no subcommand dispatched");
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
