#include "crn/markov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crn/errors.hpp"
#include "crn/exactlin.hpp"
#include "crn/structure.hpp"

namespace crn {

void GraphWithRates::validate() const {
  for (const auto& e : edges) {
    if (e.source < 0 || e.source >= num_states || e.target < 0 || e.target >= num_states) {
      throw InputError("graph edge references an unknown state");
    }
    if (!(e.rate > 0.0) || !std::isfinite(e.rate)) throw InputError("graph edge has a non-positive rate");
  }
}

GraphWithRates complex_graph(const ReactionNetwork& n) {
  GraphWithRates g{n.num_complexes(), {}};
  for (const auto& t : n.transitions()) g.edges.push_back({t.source, t.target, t.rate});
  return g;
}

void SimpleGraph::add_edge(Index a, Index b, double weight) {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) throw InputError("edge references an unknown vertex");
  if (a == b) throw InputError("simple graphs have no loops");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw InputError("edge weight must be positive");
  const auto key = std::minmax(a, b);
  if (edges_.count(key)) throw InputError("duplicate edge");
  edges_.emplace(key, weight);
}

Index SimpleGraph::degree(Index v) const {
  Index d = 0;
  for (const auto& [e, w] : edges_) d += (e.first == v) + (e.second == v);
  return d;
}

SimpleGraph SimpleGraph::from_weights(const RealMatrix& w, double tol) {
  if (w.rows() != w.cols()) throw InputError("weight matrix must be square");
  if (!w.allFinite()) throw InputError("weight matrix has non-finite entries");
  SimpleGraph g(w.rows());
  for (Index i = 0; i < w.rows(); ++i) {
    if (std::abs(w(i, i)) > tol) throw InputError("weight matrix must have zero diagonal");
    for (Index j = i + 1; j < w.cols(); ++j) {
      if (std::abs(w(i, j) - w(j, i)) > tol) throw InputError("weight matrix must be symmetric");
      if (w(i, j) < -tol) throw InputError("weight matrix must be nonnegative");
      if (w(i, j) > tol) g.add_edge(i, j, w(i, j));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

Operator hamiltonian_entrywise(const GraphWithRates& g) {
  g.validate();
  Operator h = Operator::Zero(g.num_states, g.num_states);
  for (const auto& e : g.edges) {
    h(e.target, e.source) += e.rate;
    h(e.source, e.source) -= e.rate;
  }
  return h;
}

Operator hamiltonian_factored(const GraphWithRates& g) {
  g.validate();
  const Index k = g.num_states;
  const auto t = static_cast<Index>(g.edges.size());
  RealMatrix s = RealMatrix::Zero(k, t), boundary = RealMatrix::Zero(k, t);
  RealVector r(t);
  for (Index tau = 0; tau < t; ++tau) {
    const auto& e = g.edges[static_cast<std::size_t>(tau)];
    s(e.source, tau) = 1.0;
    boundary(e.target, tau) += 1.0;
    boundary(e.source, tau) -= 1.0;
    r(tau) = e.rate;
  }
  // s^+ under <tau, tau'> = delta / r(tau) is diag(r) s^T.
  const RealMatrix s_adjoint = r.asDiagonal() * s.transpose();
  return boundary * s_adjoint;
}

Operator hamiltonian(const GraphWithRates& g) {
  Operator h = hamiltonian_entrywise(g);
  const Operator f = hamiltonian_factored(g);
  const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
  if (h.size() && (h - f).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InternalError("hamiltonian: entrywise and factored constructions disagree");
  }
  return h;
}

bool is_infinitesimal_stochastic(const Operator& h, double tol) {
  if (h.rows() != h.cols()) return false;
  for (Index j = 0; j < h.cols(); ++j) {
    if (std::abs(h.col(j).sum()) > tol) return false;
    for (Index i = 0; i < h.rows(); ++i) {
      if (i != j && h(i, j) < -tol) return false;
    }
  }
  return true;
}

bool is_stochastic(const Operator& u, double tol) {
  if (u.rows() != u.cols()) return false;
  if ((u.array() < -tol).any()) return false;
  for (Index j = 0; j < u.cols(); ++j) {
    if (std::abs(u.col(j).sum() - 1.0) > tol) return false;
  }
  return true;
}

bool is_self_adjoint(const Operator& h, double tol) {
  return h.rows() == h.cols() && (h.size() == 0 || (h - h.transpose()).cwiseAbs().maxCoeff() <= tol);
}

bool is_dirichlet(const Operator& h, double tol) { return is_self_adjoint(h, tol) && is_infinitesimal_stochastic(h, tol); }

bool is_irreducible_operator(const Operator& h) { return is_irreducible(h); }

Operator graph_laplacian(const SimpleGraph& g) {
  const Index n = g.num_vertices();
  Operator h = Operator::Zero(n, n);
  for (const auto& [e, w] : g.edges()) {
    h(e.first, e.second) += w;
    h(e.second, e.first) += w;
    h(e.first, e.first) -= w;
    h(e.second, e.second) -= w;
  }
  return h;
}

double dissipated_power(const Operator& h, const RealVector& psi) {
  double sum = 0.0;
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = 0; j < h.cols(); ++j) {
      if (i != j) sum += h(i, j) * (psi(i) - psi(j)) * (psi(i) - psi(j));
    }
  }
  return -0.5 * sum;
}

double dirichlet_form(const Operator& h, const RealVector& psi, double tol) {
  if (!is_dirichlet(h, tol)) throw PreconditionError("dirichlet_form: operator is not a Dirichlet operator");
  if (psi.size() != h.rows()) throw InputError("dirichlet_form: vector length mismatch");
  const double lhs = psi.dot(h * psi);
  const double rhs = dissipated_power(h, psi);
  const double scale = std::max(psi.squaredNorm() * h.cwiseAbs().maxCoeff() * static_cast<double>(h.rows()), 1e-300);
  if (std::abs(lhs - rhs) > 1e-10 * scale) {
    throw InternalError("dirichlet_form: quadratic form disagrees with the dissipated power");
  }
  return lhs;
}

std::vector<RealVector> component_equilibria(const GraphWithRates& g) {
  const Operator h = hamiltonian(g);
  std::vector<std::pair<Index, Index>> edges;
  for (const auto& e : g.edges) edges.emplace_back(e.source, e.target);
  const auto strong = strong_components(g.num_states, edges);

  std::vector<char> leaves(static_cast<std::size_t>(strong.count()), 0);
  for (const auto& [a, b] : edges) {
    const Index ca = strong.component_of[static_cast<std::size_t>(a)];
    if (ca != strong.component_of[static_cast<std::size_t>(b)]) leaves[static_cast<std::size_t>(ca)] = 1;
  }

  const double hnorm = h.size() ? h.cwiseAbs().maxCoeff() : 0.0;
  std::vector<RealVector> out;
  for (Index c = 0; c < strong.count(); ++c) {
    if (leaves[static_cast<std::size_t>(c)]) continue;
    const auto& members = strong.members[static_cast<std::size_t>(c)];
    const auto m = static_cast<Index>(members.size());
    RealMatrix hc(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) hc(i, j) = h(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)]);

    // Bordered system {H_C psi = 0, sum psi = 1}.
    RealMatrix bordered(m + 1, m);
    bordered.topRows(m) = hc;
    bordered.row(m).setOnes();
    RealVector rhs = RealVector::Zero(m + 1);
    rhs(m) = 1.0;
    RealVector psi = least_squares(bordered, rhs).solution;

    // Perron-Frobenius on H_C + cI as an independent route.
    const double shift = 1.0 + (m ? hc.diagonal().cwiseAbs().maxCoeff() : 0.0);
    const RealMatrix t = hc + shift * RealMatrix::Identity(m, m);
    const auto pf = perron_frobenius(t);
    if ((pf.vector - psi).cwiseAbs().maxCoeff() > 1e-6 || std::abs(pf.value - shift) > 1e-8 * shift) {
      throw InternalError("component_equilibria: bordered solve and Perron-Frobenius disagree");
    }
    if ((psi.array() <= 0.0).any()) throw NumericalError("component_equilibria: equilibrium lost positivity");
    if ((hc * psi).cwiseAbs().maxCoeff() > 1e-12 * std::max(hnorm, 1.0)) {
      throw NumericalError("component_equilibria: residual above tolerance");
    }

    RealVector full = RealVector::Zero(g.num_states);
    for (Index i = 0; i < m; ++i) full(members[static_cast<std::size_t>(i)]) = psi(i);
    out.push_back(std::move(full));
  }
  return out;
}

std::vector<Observable> conserved_observable_basis(const Operator& h) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < h.rows(); ++i)
    for (Index j = 0; j < h.cols(); ++j)
      if (i != j && h(i, j) != 0.0) edges.emplace_back(j, i);
  const auto comps = connected_components(h.rows(), edges);
  std::vector<Observable> out;
  for (const auto& members : comps.members) {
    Observable o = Observable::Zero(h.rows());
    for (Index v : members) o(v) = 1.0;
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

NoetherReport noether_check(const Operator& m, const Observable& o, double tol, bool chain) {
  if (o.size() != m.rows()) throw InputError("noether check: observable length mismatch");
  NoetherReport r;
  double comm = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) comm = std::max(comm, std::abs((o(i) - o(j)) * m(i, j)));
  r.commutes = comm <= tol;
  const RealVector o2 = o.array().square();
  // Expected-value drift: O^T H for processes, O^T U - O^T for chains.
  RealVector d1 = m.transpose() * o, d2 = m.transpose() * o2;
  if (chain) {
    d1 -= o;
    d2 -= o2;
  }
  r.first_moment_conserved = d1.size() == 0 || d1.cwiseAbs().maxCoeff() <= tol;
  r.second_moment_conserved = d2.size() == 0 || d2.cwiseAbs().maxCoeff() <= tol;
  if (r.commutes != (r.first_moment_conserved && r.second_moment_conserved)) {
    throw InternalError("noether check: commutation and moment conservation disagree");
  }
  return r;
}

}  // namespace

NoetherReport noether_check_process(const Operator& h, const Observable& o, double tol) {
  if (!is_infinitesimal_stochastic(h, tol)) throw PreconditionError("noether_check_process: not infinitesimal stochastic");
  return noether_check(h, o, tol, false);
}

NoetherReport noether_check_chain(const Operator& u, const Observable& o, double tol) {
  if (!is_stochastic(u, tol)) throw PreconditionError("noether_check_chain: not stochastic");
  return noether_check(u, o, tol, true);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

std::vector<std::vector<Index>> subsets(Index n, Index k) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  auto rec = [&](auto&& self, Index start) -> void {
    if (static_cast<Index>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (Index i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::string subset_label(const std::vector<Index>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

bool includes(const std::vector<Index>& big, const std::vector<Index>& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool disjoint(const std::vector<Index>& a, const std::vector<Index>& b) {
  for (Index x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  return true;
}

}  // namespace

SimpleGraph cycle_graph(Index n) {
  if (n < 3) throw InputError("cycle graph needs at least 3 vertices");
  SimpleGraph g(n);
  for (Index i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

SimpleGraph complete_graph(Index n) {
  if (n < 1) throw InputError("complete graph needs at least 1 vertex");
  SimpleGraph g(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

SimpleGraph hypercube_levels(Index n, Index k) {
  if (n < 1 || k < 0 || k + 1 > n) throw InputError("hypercube_levels needs 0 <= k < n");
  const auto lower = subsets(n, k);
  const auto upper = subsets(n, k + 1);
  SimpleGraph g(static_cast<Index>(lower.size() + upper.size()));
  for (std::size_t i = 0; i < lower.size(); ++i) g.set_label(static_cast<Index>(i), subset_label(lower[i]));
  for (std::size_t j = 0; j < upper.size(); ++j) {
    const auto v = static_cast<Index>(lower.size() + j);
    g.set_label(v, subset_label(upper[j]));
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (includes(upper[j], lower[i])) g.add_edge(static_cast<Index>(i), v);
    }
  }
  return g;
}

SimpleGraph desargues_graph() { return hypercube_levels(5, 2); }

SimpleGraph petersen_graph() {
  const auto pairs = subsets(5, 2);
  SimpleGraph g(static_cast<Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    g.set_label(static_cast<Index>(i), subset_label(pairs[i]));
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if (disjoint(pairs[i], pairs[j])) g.add_edge(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return g;
}

SimpleGraph generate_graph(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw InputError("empty graph name");
  auto arg = [&](std::size_t i) -> Index {
    if (i >= parts.size()) throw InputError("graph '" + parts[0] + "' needs more parameters");
    try {
      std::size_t used = 0;
      const long long v = std::stoll(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
      return static_cast<Index>(v);
    } catch (const std::logic_error&) {
      throw InputError("bad graph parameter '" + parts[i] + "'");
    }
  };
  const auto& name = parts[0];
  std::size_t expected = 1;
  SimpleGraph g;
  if (name == "desargues") {
    g = desargues_graph();
  } else if (name == "petersen") {
    g = petersen_graph();
  } else if (name == "cycle") {
    g = cycle_graph(arg(1));
    expected = 2;
  } else if (name == "complete") {
    g = complete_graph(arg(1));
    expected = 2;
  } else if (name == "hypercube_levels") {
    g = hypercube_levels(arg(1), arg(2));
    expected = 3;
  } else {
    throw InputError("unknown graph '" + name + "'");
  }
  if (parts.size() != expected) throw InputError("wrong number of parameters for graph '" + name + "'");
  return g;
}

std::string to_dot(const SimpleGraph& g) {
  std::ostringstream out;
  out << "graph G {\n";
  for (Index v = 0; v < g.num_vertices(); ++v) {
    out << "  " << v;
    if (!g.label(v).empty()) out << " [label=\"" << g.label(v) << "\"]";
    out << ";\n";
  }
  for (const auto& [e, w] : g.edges()) {
    out << "  " << e.first << " -- " << e.second;
    if (w != 1.0) out << " [weight=" << w << "]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace crn
