// Command-line front end. Exit codes: 0 ok, 2 input or parse error,
// 3 internal inconsistency, 4 numerical failure, 5 precondition violated.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crn/errors.hpp"
#include "crn/exactlin.hpp"
#include "crn/markov.hpp"
#include "crn/masterdyn.hpp"
#include "crn/network.hpp"
#include "crn/ratedyn.hpp"
#include "crn/report.hpp"
#include "crn/structure.hpp"

using namespace crn;

namespace {

enum Exit { kOk = 0, kInput = 2, kInternal = 3, kNumerical = 4, kPrecondition = 5 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ReactionNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

/// Whitespace- or comma-separated rows; '#' starts a comment; blank lines skipped.
RealMatrix read_matrix(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ParseError("not a number: '" + tok + "'", lineno, 1);
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path + ": empty matrix");
  const auto n = rows.size();
  RealMatrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw InputError(path + ": matrix is not square");
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

template <typename V>
V to_vector(const std::vector<typename V::Scalar>& xs) {
  V v(static_cast<Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Index>(i)) = xs[i];
  return v;
}

Json real_array(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int worker_threads() {
  const char* env = std::getenv("CRN_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long k = std::strtol(env, &end, 10);
  if (*end != '\0' || k < 1 || k > 1024) throw InputError("CRN_THREADS must be a positive integer");
  return static_cast<int>(k);
}

struct Output {
  std::string format = "json";
  std::string path;

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
  }
  void require(std::initializer_list<const char*> allowed) const {
    for (const char* a : allowed)
      if (format == a) return;
    throw InputError("--format " + format + " is not available for this command");
  }
};

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string file;
};

void cmd_analyze(const AnalyzeArgs& a, const Output& out) {
  out.require({"json"});
  const auto n = load_network(a.file);
  out.emit(dump_json(structure_json(analyze_structure(n))) + "\n");
}

struct ParseArgs {
  std::string file;
};

void cmd_parse(const ParseArgs& a, Output out) {
  out.require({"json", "text"});
  const auto n = load_network(a.file);
  out.emit(out.format == "text" ? canonical_text(n) : dump_json(network_json(n)) + "\n");
}

struct RateArgs {
  std::string file;
  std::vector<double> x0;
  double t = 10.0;
  double dt = 1e-3;
};

void cmd_rate_evolve(const RateArgs& a, const Output& out) {
  out.require({"csv", "json"});
  const auto n = load_network(a.file);
  const auto traj = integrate_rate(n, to_vector<RealVector>(a.x0), a.t, a.dt);
  if (out.format == "csv") {
    out.emit(trajectory_csv(n, traj));
    return;
  }
  Json states = Json::array();
  for (const auto& s : traj.states) states.push_back(real_array(s));
  Json j;
  j["species"] = n.species().names();
  j["times"] = traj.times;
  j["states"] = states;
  j["max_step_error"] = traj.max_step_error;
  out.emit(dump_json(j) + "\n");
}

struct EquilibriumArgs {
  std::string file;
  double tol = 1e-9;
};

void cmd_equilibrium(const EquilibriumArgs& a, const Output& out) {
  out.require({"json"});
  const auto n = load_network(a.file);
  Json j;
  j["species"] = n.species().names();
  const Json body = equilibrium_json(deficiency_zero_equilibrium(n, a.tol));
  for (const auto& [k, v] : body.items()) j[k] = v;
  out.emit(dump_json(j) + "\n");
}

struct MasterArgs {
  std::string file;
  std::vector<std::int64_t> n0;
  std::optional<std::int64_t> cap;
  std::optional<double> t;
  bool equilibrium = false;
  bool ssa = false;
  std::uint64_t seed = 1;
  long trials = 1000;
  int bins = 10;
  double tol = 1e-9;
};

void cmd_master(const MasterArgs& a, Output out) {
  const auto n = load_network(a.file);
  const IntVector n0 = to_vector<IntVector>(a.n0);
  if (static_cast<int>(a.equilibrium) + static_cast<int>(a.ssa) > 1) {
    throw InputError("--equilibrium and --ssa are mutually exclusive");
  }

  if (a.ssa) {
    out.require({"json"});
    if (!a.t) throw InputError("--ssa needs --t");
    const auto r = ssa_sample(n, n0, *a.t, a.seed, a.trials, a.bins, worker_threads());
    Json j;
    j["species"] = n.species().names();
    const Json body = ssa_json(r);
    for (const auto& [k, v] : body.items()) j[k] = v;
    out.emit(dump_json(j) + "\n");
    return;
  }

  if (!a.cap) throw InputError("--cap is required to enumerate the state space");
  const auto space = enumerate_states(n, n0, *a.cap);
  const auto h = master_hamiltonian(n, space);

  if (a.equilibrium) {
    if (a.t) throw InputError("--equilibrium does not take --t");
    const auto eq = deficiency_zero_equilibrium(n, a.tol);
    const auto psi = ack_state(n, eq.x, space, a.tol);
    if (out.format == "csv") {
      out.emit(distribution_csv(n, space, psi));
      return;
    }
    out.require({"json"});
    Json j;
    j["species"] = n.species().names();
    j["x"] = real_array(eq.x);
    j["states"] = space.size();
    j["closed"] = space.closed();
    j["boundary_truncated"] = h.boundary_truncated;
    j["residual"] = relative_residual(h, psi);
    j["mean"] = real_array(species_means(space, psi));
    out.emit(dump_json(j) + "\n");
    return;
  }

  if (!a.t) throw InputError("master needs one of --t, --equilibrium or --ssa");
  const auto psi = evolve(h, ProbabilityVector::point_mass(space, n0), *a.t);
  if (out.format == "csv") {
    out.emit(distribution_csv(n, space, psi));
    return;
  }
  out.require({"json"});
  Json j;
  j["species"] = n.species().names();
  j["t"] = *a.t;
  j["states"] = space.size();
  j["closed"] = space.closed();
  j["boundary_truncated"] = h.boundary_truncated;
  j["mean"] = real_array(species_means(space, psi));
  j["probabilities"] = real_array(psi.probs());
  out.emit(dump_json(j) + "\n");
}

struct GraphArgs {
  std::vector<std::string> gen;
  std::string file;
  bool file_is_operator = false;
  bool spectrum = false;
  bool dirichlet_check = false;
  bool dot = false;
  double group_tol = 1e-8;
  double tol = 1e-9;
};

void cmd_graph(const GraphArgs& a, const Output& out) {
  if (a.gen.empty() == a.file.empty()) throw InputError("give exactly one of --gen or --file");
  if (static_cast<int>(a.spectrum) + static_cast<int>(a.dirichlet_check) + static_cast<int>(a.dot) != 1) {
    throw InputError("give exactly one of --spectrum, --dirichlet-check or --dot");
  }

  std::optional<SimpleGraph> graph;
  Operator h;
  if (!a.gen.empty()) {
    std::string spec = a.gen.front();
    for (std::size_t i = 1; i < a.gen.size(); ++i) spec += ":" + a.gen[i];
    graph = generate_graph(spec);
    h = graph_laplacian(*graph);
  } else if (a.file_is_operator) {
    h = read_matrix(a.file);
  } else {
    graph = SimpleGraph::from_weights(read_matrix(a.file));
    h = graph_laplacian(*graph);
  }

  if (a.dot) {
    out.require({"json", "dot"});
    if (!graph) throw InputError("--dot needs a graph, not an operator");
    out.emit(to_dot(*graph));
    return;
  }
  out.require({"json"});
  if (a.spectrum) {
    if (!is_self_adjoint(h, a.tol)) throw PreconditionError("operator is not self-adjoint; no real spectrum");
    out.emit(dump_json(spectrum_json(symmetric_eigen(h), a.group_tol)) + "\n");
    return;
  }
  Json j;
  j["states"] = h.rows();
  j["self_adjoint"] = is_self_adjoint(h, a.tol);
  j["infinitesimal_stochastic"] = is_infinitesimal_stochastic(h, a.tol);
  j["dirichlet"] = is_dirichlet(h, a.tol);
  j["irreducible"] = is_irreducible_operator(h);
  if (is_dirichlet(h, a.tol)) {
    // Power identity on the probe psi_i = i: <psi, H psi> against the edge sum.
    RealVector psi(h.rows());
    for (Index i = 0; i < psi.size(); ++i) psi(i) = static_cast<double>(i);
    j["dirichlet_form"] = dirichlet_form(h, psi, a.tol);
    j["dissipated_power"] = dissipated_power(h, psi);
  }
  out.emit(dump_json(j) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction network analysis: structure, rate equation, master equation, graph spectra"};
  app.require_subcommand(1);
  Output out;
  std::map<CLI::App*, std::string> formats;
  const auto add_common = [&](CLI::App* sub, const std::string& default_format) {
    formats[sub] = default_format;
    sub->add_option("--format", formats[sub], "Output format")->capture_default_str();
    sub->add_option("--out", out.path, "Write to this path instead of stdout");
  };

  AnalyzeArgs analyze;
  auto* s_analyze = app.add_subcommand("analyze", "Deficiency, components, weak reversibility, conservation laws");
  s_analyze->add_option("file", analyze.file, "Network file")->required();

  ParseArgs parse;
  auto* s_parse = app.add_subcommand("parse", "Parse a network and print it as JSON or canonical text");
  s_parse->add_option("file", parse.file, "Network file")->required();

  RateArgs rate;
  auto* s_rate = app.add_subcommand("rate-evolve", "Integrate the mass-action rate equation (RK4)");
  s_rate->add_option("file", rate.file, "Network file")->required();
  s_rate->add_option("--x0", rate.x0, "Initial concentrations, comma separated")->delimiter(',')->required();
  s_rate->add_option("--t", rate.t, "End time")->capture_default_str();
  s_rate->add_option("--dt", rate.dt, "Step size")->capture_default_str();

  EquilibriumArgs equil;
  auto* s_equil = app.add_subcommand("equilibrium", "Complex-balanced equilibrium of a deficiency-zero network");
  s_equil->add_option("file", equil.file, "Network file")->required();
  s_equil->add_option("--tol", equil.tol, "Residual tolerance")->capture_default_str();

  MasterArgs master;
  double master_t = 0.0;
  auto* s_master = app.add_subcommand("master", "Master equation: evolve, equilibrium (ACK) or SSA");
  s_master->add_option("file", master.file, "Network file")->required();
  s_master->add_option("--n0", master.n0, "Initial population, comma separated")->delimiter(',')->required();
  s_master->add_option("--cap", master.cap, "Bound on total count during state enumeration");
  auto* t_opt = s_master->add_option("--t", master_t, "Time");
  s_master->add_flag("--equilibrium", master.equilibrium, "Anderson-Craciun-Kurtz state and its residual");
  s_master->add_flag("--ssa", master.ssa, "Gillespie sampling instead of the master equation");
  s_master->add_option("--seed", master.seed, "SSA seed")->capture_default_str();
  s_master->add_option("--trials", master.trials, "SSA trials")->capture_default_str()->check(CLI::PositiveNumber);
  s_master->add_option("--bins", master.bins, "SSA mean-trajectory bins")->capture_default_str();
  s_master->add_option("--tol", master.tol, "Complex-balance tolerance")->capture_default_str();

  GraphArgs graph;
  auto* s_graph = app.add_subcommand("graph", "Graph Laplacians and Dirichlet operators");
  s_graph->add_option("--gen", graph.gen, "Generator: desargues | petersen | cycle N | complete N | hypercube_levels N K")
      ->expected(1, 3);
  s_graph->add_option("--file", graph.file, "Square matrix file (weights unless --operator)");
  s_graph->add_flag("--operator", graph.file_is_operator, "Read --file as an operator H instead of edge weights");
  s_graph->add_flag("--spectrum", graph.spectrum, "Eigenvalues with multiplicities");
  s_graph->add_flag("--dirichlet-check", graph.dirichlet_check, "Self-adjoint / infinitesimal stochastic report");
  s_graph->add_flag("--dot", graph.dot, "Graphviz output");
  s_graph->add_option("--group-tol", graph.group_tol, "Eigenvalue grouping tolerance")->capture_default_str();
  s_graph->add_option("--tol", graph.tol, "Predicate tolerance")->capture_default_str();

  add_common(s_analyze, "json");
  add_common(s_parse, "json");
  add_common(s_rate, "csv");
  add_common(s_equil, "json");
  add_common(s_graph, "json");
  // master's default depends on the mode; resolved after parsing.
  std::string master_format;
  s_master->add_option("--format", master_format, "Output format (default csv for --t, json otherwise)");
  s_master->add_option("--out", out.path, "Write to this path instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    for (const auto& [sub, format] : formats)
      if (*sub) out.format = format;
    if (*s_analyze) cmd_analyze(analyze, out);
    if (*s_parse) cmd_parse(parse, out);
    if (*s_rate) cmd_rate_evolve(rate, out);
    if (*s_equil) cmd_equilibrium(equil, out);
    if (*s_graph) cmd_graph(graph, out);
    if (*s_master) {
      if (t_opt->count() > 0) master.t = master_t;
      out.format = !master_format.empty() ? master_format
                   : (master.t && !master.ssa && !master.equilibrium) ? "csv"
                                                                       : "json";
      cmd_master(master, out);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
