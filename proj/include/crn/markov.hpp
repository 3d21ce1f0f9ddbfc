#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "crn/network.hpp"
#include "crn/types.hpp"

namespace crn {

/// Dense generator or transition matrix on a finite set of states.
using Operator = RealMatrix;
/// Diagonal operator, stored as its values on each state.
using Observable = RealVector;

struct RateEdge {
  Index source;
  Index target;
  double rate;
};

/// A directed multigraph with a positive rate on each edge.
struct GraphWithRates {
  Index num_states = 0;
  std::vector<RateEdge> edges;

  /// Throws InputError on an invalid index or non-positive rate.
  void validate() const;
};

/// The complex graph of a network: states are complexes, edges are transitions.
GraphWithRates complex_graph(const ReactionNetwork& n);

/// Undirected simple graph with positive edge weights (conductances).
class SimpleGraph {
 public:
  explicit SimpleGraph(Index num_vertices = 0) : n_(num_vertices), labels_(static_cast<std::size_t>(num_vertices)) {}

  /// Throws InputError for loops, duplicate edges, bad indices or weight <= 0.
  void add_edge(Index a, Index b, double weight = 1.0);

  Index num_vertices() const { return n_; }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  Index degree(Index v) const;
  /// Edges keyed by (min, max) vertex.
  const std::map<std::pair<Index, Index>, double>& edges() const { return edges_; }

  void set_label(Index v, std::string label) { labels_.at(static_cast<std::size_t>(v)) = std::move(label); }
  const std::string& label(Index v) const { return labels_.at(static_cast<std::size_t>(v)); }

  /// Reads a symmetric nonnegative weight matrix with zero diagonal.
  static SimpleGraph from_weights(const RealMatrix& w, double tol = 1e-12);

 private:
  Index n_;
  std::map<std::pair<Index, Index>, double> edges_;
  std::vector<std::string> labels_;
};

/// H with off-diagonal H(i, j) = total rate j -> i and zero column sums.
///
/// Built entrywise and again as d s^+ (adjoint taken with transitions weighted
/// by 1 / rate); throws InternalError if the two disagree.
Operator hamiltonian(const GraphWithRates& g);
Operator hamiltonian_entrywise(const GraphWithRates& g);
Operator hamiltonian_factored(const GraphWithRates& g);

bool is_infinitesimal_stochastic(const Operator& h, double tol = 1e-9);
bool is_stochastic(const Operator& u, double tol = 1e-9);
bool is_self_adjoint(const Operator& h, double tol = 1e-9);
bool is_dirichlet(const Operator& h, double tol = 1e-9);

/// Strong connectivity of the graph with an edge j -> i wherever H(i, j) != 0.
bool is_irreducible_operator(const Operator& h);

/// Weighted Laplacian: H(x, y) = weight(x, y), H(x, x) = -sum of incident weights.
Operator graph_laplacian(const SimpleGraph& g);

/// <psi, H psi>, cross-checked against -1/2 sum_{i != j} H(i, j) (psi_i - psi_j)^2.
double dirichlet_form(const Operator& h, const RealVector& psi, double tol = 1e-9);
/// The right-hand side of the power identity, evaluated directly.
double dissipated_power(const Operator& h, const RealVector& psi);

/// Equilibria of the master equation on a graph with rates.
///
/// Returns one probability vector per terminal strong component (a strong
/// component no edge leaves), strictly positive on that component and zero
/// elsewhere. These span ker H. When g is weakly reversible the terminal
/// strong components are exactly the connected components.
std::vector<RealVector> component_equilibria(const GraphWithRates& g);

/// Indicator vectors of the connected components of the graph of h: a basis
/// of the observables commuting with h.
std::vector<Observable> conserved_observable_basis(const Operator& h);

struct NoetherReport {
  bool commutes = false;
  bool first_moment_conserved = false;
  bool second_moment_conserved = false;
};

/// Noether check for a Markov process generated by h.
NoetherReport noether_check_process(const Operator& h, const Observable& o, double tol = 1e-9);
/// Noether check for a Markov chain with transition matrix u.
NoetherReport noether_check_chain(const Operator& u, const Observable& o, double tol = 1e-9);

/// Named generators.
SimpleGraph cycle_graph(Index n);
SimpleGraph complete_graph(Index n);
/// Vertices are the k- and (k+1)-element subsets of {0..n-1}; edges are inclusions.
SimpleGraph hypercube_levels(Index n, Index k);
/// The Desargues graph: hypercube_levels(5, 2).
SimpleGraph desargues_graph();
/// The Petersen graph: 2-subsets of a 5-set, adjacent when disjoint.
SimpleGraph petersen_graph();

/// Parses "desargues", "petersen", "cycle:N", "complete:N", "hypercube_levels:N:K".
SimpleGraph generate_graph(const std::string& spec);

std::string to_dot(const SimpleGraph& g);

}  // namespace crn
