#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "crn/errors.hpp"
#include "crn/exactlin.hpp"
#include "crn/markov.hpp"
#include "crn/masterdyn.hpp"
#include "fixtures.hpp"

using namespace crn;

namespace {

RealVector rv(std::initializer_list<double> xs) {
  RealVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

GraphWithRates random_graph(std::mt19937_64& rng, Index max_states, int max_edges) {
  std::uniform_int_distribution<Index> ns(1, max_states);
  std::uniform_int_distribution<int> ne(0, max_edges);
  std::uniform_real_distribution<double> rate(0.1, 3.0);
  GraphWithRates g;
  g.num_states = ns(rng);
  std::uniform_int_distribution<Index> v(0, g.num_states - 1);
  const int e = ne(rng);
  for (int i = 0; i < e; ++i) g.edges.push_back({v(rng), v(rng), rate(rng)});
  return g;
}

Operator random_dirichlet(std::mt19937_64& rng, Index n, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0), w(0.1, 2.0);
  RealMatrix weights = RealMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (u(rng) < density) weights(i, j) = weights(j, i) = w(rng);
  return graph_laplacian(SimpleGraph::from_weights(weights));
}

// Oracle: dimension of {diagonal O : [O, H] = 0} by counting free unknowns.
Index commutant_dimension(const Operator& h) {
  const Index n = h.rows();
  std::vector<RealVector> rows;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && h(i, j) != 0.0) {
        RealVector r = RealVector::Zero(n);
        r(i) = 1.0;
        r(j) = -1.0;
        rows.push_back(r);
      }
  if (rows.empty()) return n;
  RealMatrix a(static_cast<Index>(rows.size()), n);
  for (std::size_t k = 0; k < rows.size(); ++k) a.row(static_cast<Index>(k)) = rows[k].transpose();
  return n - Eigen::FullPivLU<RealMatrix>(a).rank();
}

// Oracle: some power (h + cI)^m with m <= n is entrywise positive.
bool has_positive_power(const Operator& h) {
  const Index n = h.rows();
  const double c = 1.0 + h.diagonal().cwiseAbs().maxCoeff();
  const RealMatrix t = h + c * RealMatrix::Identity(n, n);
  RealMatrix p = RealMatrix::Identity(n, n);
  for (Index m = 1; m <= n; ++m) {
    p = (p * t).eval();
    if ((p.array() > 0.0).all()) return true;
  }
  return false;
}

RealMatrix expm_uniformized(const Operator& h, double t) {
  const SparseOperator s = h.sparseView();
  RealMatrix out(h.rows(), h.cols());
  for (Index j = 0; j < h.cols(); ++j) out.col(j) = uniformize(s, RealVector::Unit(h.rows(), j), t).result;
  return out;
}

}  // namespace

TEST_CASE("hamiltonian: worked examples") {
  GraphWithRates one{2, {{0, 1, 2.5}}};
  const Operator h = hamiltonian(one);
  RealMatrix expected(2, 2);
  expected << -2.5, 0, 2.5, 0;
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-15);

  CHECK(hamiltonian(GraphWithRates{3, {}}).isZero());

  const Operator h17 = hamiltonian(complex_graph(parse_network(fixtures::part17_reversible())));
  CHECK(is_infinitesimal_stochastic(h17));
  CHECK(h17.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(hamiltonian(GraphWithRates{2, {{0, 2, 1.0}}}), InputError);
  CHECK_THROWS_AS(hamiltonian(GraphWithRates{2, {{0, 1, 0.0}}}), InputError);
}

TEST_CASE("property: hamiltonians of random graphs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = random_graph(rng, 7, 12);
    const Operator h = hamiltonian(g);
    CHECK(is_infinitesimal_stochastic(h));
    CHECK((hamiltonian_entrywise(g) - hamiltonian_factored(g)).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()));
    // Oracle: off-diagonal entries are the summed rates.
    RealMatrix rates = RealMatrix::Zero(g.num_states, g.num_states);
    for (const auto& e : g.edges)
      if (e.source != e.target) rates(e.target, e.source) += e.rate;
    for (Index i = 0; i < g.num_states; ++i)
      for (Index j = 0; j < g.num_states; ++j)
        if (i != j) CHECK(std::abs(h(i, j) - rates(i, j)) < 1e-12);
  }
}

TEST_CASE("operator predicates") {
  const Operator lap = graph_laplacian(petersen_graph());
  CHECK(is_dirichlet(lap));
  CHECK(is_self_adjoint(lap));

  RealMatrix perm = RealMatrix::Zero(3, 3);
  perm(1, 0) = perm(2, 1) = perm(0, 2) = 1.0;
  CHECK(is_stochastic(perm));
  CHECK_FALSE(is_infinitesimal_stochastic(perm));

  const RealMatrix diag = RealVector::Constant(3, -1.0).asDiagonal();
  CHECK_FALSE(is_infinitesimal_stochastic(diag));
  CHECK(is_infinitesimal_stochastic(RealMatrix::Zero(3, 3)));

  GraphWithRates one_way{2, {{0, 1, 1.0}}};
  CHECK(is_infinitesimal_stochastic(hamiltonian(one_way)));
  CHECK_FALSE(is_self_adjoint(hamiltonian(one_way)));
  CHECK_FALSE(is_dirichlet(hamiltonian(one_way)));
}

TEST_CASE("property: a 0/1 stochastic matrix has a stochastic inverse iff it is a permutation") {
  for (Index n = 1; n <= 3; ++n) {
    // Each column has exactly one 1: enumerate the target row of every column.
    Index total = 1;
    for (Index i = 0; i < n; ++i) total *= n;
    for (Index code = 0; code < total; ++code) {
      RealMatrix u = RealMatrix::Zero(n, n);
      std::vector<char> hit(static_cast<std::size_t>(n), 0);
      Index c = code;
      for (Index j = 0; j < n; ++j) {
        u(c % n, j) = 1.0;
        hit[static_cast<std::size_t>(c % n)] = 1;
        c /= n;
      }
      REQUIRE(is_stochastic(u));
      const bool permutation = std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
      Eigen::FullPivLU<RealMatrix> lu(u);
      bool inverse_stochastic = false;
      if (lu.isInvertible()) {
        const RealMatrix inv = lu.inverse();
        inverse_stochastic = is_stochastic(inv) && (inv.array() >= -1e-12).all();
      }
      CHECK(inverse_stochastic == permutation);
    }
  }
}

TEST_CASE("graph generators") {
  const auto d = desargues_graph();
  CHECK(d.num_vertices() == 20);
  CHECK(d.num_edges() == 30);
  for (Index v = 0; v < 20; ++v) CHECK(d.degree(v) == 3);
  // Bipartite: every edge joins a 2-subset label to a 3-subset label.
  for (const auto& [e, w] : d.edges()) CHECK(d.label(e.first).size() != d.label(e.second).size());

  const auto p = petersen_graph();
  CHECK(p.num_vertices() == 10);
  CHECK(p.num_edges() == 15);
  for (Index v = 0; v < 10; ++v) CHECK(p.degree(v) == 3);

  const auto tri = generate_graph("cycle:3");
  CHECK(tri.num_edges() == 3);
  CHECK(generate_graph("complete:4").num_edges() == 6);
  CHECK(generate_graph("hypercube_levels:5:2").num_edges() == 30);
  CHECK_THROWS_AS(generate_graph("cycle"), InputError);
  CHECK_THROWS_AS(generate_graph("cycle:x"), InputError);
  CHECK_THROWS_AS(generate_graph("moebius"), InputError);

  const auto dot = to_dot(tri);
  CHECK(dot.find("graph") != std::string::npos);
  CHECK(dot.find("--") != std::string::npos);

  SimpleGraph g(2);
  CHECK_THROWS_AS(g.add_edge(0, 0), InputError);
  g.add_edge(0, 1);
  CHECK_THROWS_AS(g.add_edge(1, 0), InputError);
  CHECK_THROWS_AS(g.add_edge(0, 1, -1.0), InputError);
}

TEST_CASE("laplacian spectra") {
  const auto desargues = symmetric_eigen(graph_laplacian(desargues_graph())).grouped(1e-8);
  const double values[] = {0, -1, -2, -4, -5, -6};
  const Index mult[] = {1, 4, 5, 5, 4, 1};
  REQUIRE(desargues.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(desargues[i].value - values[i]) < 1e-8);
    CHECK(desargues[i].multiplicity == mult[i]);
  }

  const Operator pl = graph_laplacian(petersen_graph());
  const RealVector oracle = Eigen::SelfAdjointEigenSolver<RealMatrix>(pl).eigenvalues().reverse();
  const auto petersen = symmetric_eigen(pl);
  CHECK((oracle - petersen.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
  const auto groups = petersen.grouped(1e-8);
  REQUIRE(groups.size() == 3);
  CHECK(groups[1].multiplicity == 5);
  CHECK(std::abs(groups[1].value + 2.0) < 1e-10);
  CHECK(groups[2].multiplicity == 4);
  CHECK(std::abs(groups[2].value + 5.0) < 1e-10);

  const auto tri = symmetric_eigen(graph_laplacian(cycle_graph(3))).eigenvalues;
  CHECK(std::abs(tri(0)) < 1e-12);
  CHECK(std::abs(tri(1) + 3.0) < 1e-12);
  CHECK(std::abs(tri(2) + 3.0) < 1e-12);

  CHECK(graph_laplacian(SimpleGraph(1)).isZero());
}

TEST_CASE("dirichlet_form: examples and precondition") {
  RealMatrix w(5, 5);
  w << 0, 2, 1, 0, 1,  //
      2, 0, 0, 1, 1,   //
      1, 0, 0, 2, 1,   //
      0, 1, 2, 0, 1,   //
      1, 1, 1, 1, 0;
  const Operator h = graph_laplacian(SimpleGraph::from_weights(w));
  CHECK((h.diagonal().array() == -4.0).all());
  CHECK(std::abs(dirichlet_form(h, RealVector::Ones(5))) < 1e-12);
  CHECK(std::abs(dirichlet_form(h, RealVector::Constant(5, 3.7))) < 1e-12);
  CHECK_THROWS_AS(dirichlet_form(hamiltonian(GraphWithRates{2, {{0, 1, 1.0}}}), rv({1, 0})), PreconditionError);
}

TEST_CASE("property: Dirichlet forms are nonpositive and equal the dissipated power") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 300; ++trial) {
    const Operator h = random_dirichlet(rng, 1 + trial % 8, 0.6);
    RealVector psi(h.rows());
    for (Index i = 0; i < psi.size(); ++i) psi(i) = g(rng);
    const double form = dirichlet_form(h, psi);
    const double oracle = psi.dot(h * psi);
    CHECK(form <= 1e-12);
    CHECK(std::abs(form - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
    CHECK(std::abs(dissipated_power(h, psi) - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("component_equilibria: examples") {
  RealMatrix w(5, 5);
  w << 0, 2, 1, 0, 1,  //
      2, 0, 0, 1, 1,   //
      1, 0, 0, 2, 1,   //
      0, 1, 2, 0, 1,   //
      1, 1, 1, 1, 0;
  GraphWithRates circuit{5, {}};
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j)
      if (w(i, j) > 0) circuit.edges.push_back({i, j, w(i, j)});
  const auto eq = component_equilibria(circuit);
  REQUIRE(eq.size() == 1);
  CHECK((eq[0].array() - 0.2).abs().maxCoeff() < 1e-12);

  GraphWithRates pairs{4, {{0, 1, 1.0}, {1, 0, 2.0}, {2, 3, 1.0}, {3, 2, 1.0}}};
  const auto two = component_equilibria(pairs);
  REQUIRE(two.size() == 2);
  CHECK(std::abs(two[0](0) - 2.0 / 3.0) < 1e-12);
  CHECK(two[0].tail(2).isZero());
  CHECK(two[1].head(2).isZero());

  // Both ends absorb: 1 -> 0 and 1 -> 2.
  GraphWithRates forked{3, {{1, 0, 1.0}, {1, 2, 1.0}}};
  const auto ends = component_equilibria(forked);
  REQUIRE(ends.size() == 2);
  CHECK((ends[0] - RealVector::Unit(3, 0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ends[1] - RealVector::Unit(3, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // A plain chain has one absorbing end.
  GraphWithRates chain{3, {{0, 1, 1.0}, {1, 2, 1.0}}};
  const auto last = component_equilibria(chain);
  REQUIRE(last.size() == 1);
  CHECK((last[0] - RealVector::Unit(3, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("property: component equilibria span ker H") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = random_graph(rng, 7, 10);
    const Operator h = hamiltonian(g);
    const auto eq = component_equilibria(g);
    const Index kernel_dim = g.num_states - Eigen::FullPivLU<RealMatrix>(h).rank();
    CHECK(static_cast<Index>(eq.size()) == kernel_dim);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    RealMatrix stacked(g.num_states, static_cast<Index>(eq.size()));
    for (std::size_t k = 0; k < eq.size(); ++k) {
      CHECK((h * eq[k]).cwiseAbs().maxCoeff() <= 1e-12 * scale);
      CHECK(std::abs(eq[k].sum() - 1.0) < 1e-12);
      CHECK(eq[k].minCoeff() >= 0.0);
      stacked.col(static_cast<Index>(k)) = eq[k];
    }
    if (!eq.empty()) CHECK(Eigen::FullPivLU<RealMatrix>(stacked).rank() == static_cast<Index>(eq.size()));
  }
}

TEST_CASE("noether checks: examples") {
  // Process: state 1 jumps to 0 or 2 at rate 1/2 each.
  GraphWithRates fork{3, {{1, 0, 0.5}, {1, 2, 0.5}}};
  const Operator h = hamiltonian(fork);
  const auto r = noether_check_process(h, rv({0, 1, 2}));
  CHECK(r.first_moment_conserved);
  CHECK_FALSE(r.second_moment_conserved);
  CHECK_FALSE(r.commutes);
  const auto c = noether_check_process(h, RealVector::Constant(3, 4.0));
  CHECK((c.commutes && c.first_moment_conserved && c.second_moment_conserved));

  // Chain: the same fork with probability 1/2 each way; 0 and 2 absorb.
  RealMatrix u = RealMatrix::Zero(3, 3);
  u(0, 0) = u(2, 2) = 1.0;
  u(0, 1) = u(2, 1) = 0.5;
  const auto rc = noether_check_chain(u, rv({0, 1, 2}));
  CHECK(rc.first_moment_conserved);
  CHECK_FALSE(rc.second_moment_conserved);
  CHECK_FALSE(rc.commutes);

  const auto id = noether_check_chain(RealMatrix::Identity(3, 3), rv({5, -1, 2}));
  CHECK((id.commutes && id.first_moment_conserved && id.second_moment_conserved));

  RealMatrix perm = RealMatrix::Zero(4, 4);
  perm(1, 0) = perm(0, 1) = perm(3, 2) = perm(2, 3) = 1.0;
  const auto orbits = noether_check_chain(perm, rv({7, 7, -3, -3}));
  CHECK((orbits.commutes && orbits.first_moment_conserved && orbits.second_moment_conserved));

  CHECK_THROWS_AS(noether_check_process(u, rv({0, 1, 2})), PreconditionError);
  CHECK_THROWS_AS(noether_check_chain(h, rv({0, 1, 2})), PreconditionError);
}

TEST_CASE("property: Noether biconditional on random block generators") {
  std::mt19937_64 rng(44);
  std::uniform_int_distribution<int> blocks(1, 3), size(1, 3);
  std::uniform_real_distribution<double> rate(0.2, 2.0), value(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    // Blocks of states with complete internal rates, no rates between blocks.
    std::vector<Index> block_of;
    const int nb = blocks(rng);
    for (int b = 0; b < nb; ++b)
      for (int k = size(rng); k > 0; --k) block_of.push_back(b);
    const auto n = static_cast<Index>(block_of.size());
    GraphWithRates g{n, {}};
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j && block_of[static_cast<std::size_t>(i)] == block_of[static_cast<std::size_t>(j)])
          g.edges.push_back({i, j, rate(rng)});
    const Operator h = hamiltonian(g);

    std::vector<double> per_block(static_cast<std::size_t>(nb));
    for (auto& v : per_block) v = value(rng);
    Observable constant(n), generic(n);
    for (Index i = 0; i < n; ++i) {
      constant(i) = per_block[static_cast<std::size_t>(block_of[static_cast<std::size_t>(i)])];
      generic(i) = value(rng);
    }
    const auto yes = noether_check_process(h, constant);
    CHECK((yes.commutes && yes.first_moment_conserved && yes.second_moment_conserved));
    const auto any = noether_check_process(h, generic);
    CHECK(any.commutes == (any.first_moment_conserved && any.second_moment_conserved));

    // The same through a chain: exp(H) is stochastic with the same blocks.
    const RealMatrix u = expm_uniformized(h, 1.0);
    const auto chain = noether_check_chain(u, constant, 1e-8);
    CHECK((chain.commutes && chain.first_moment_conserved && chain.second_moment_conserved));
  }
}

TEST_CASE("property: irreducibility, constant conserved quantities and positive powers agree") {
  std::mt19937_64 rng(45);
  int irreducible = 0, reducible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const Operator h = random_dirichlet(rng, 1 + trial % 5, 0.4);
    const bool irr = is_irreducible_operator(h);
    const auto basis = conserved_observable_basis(h);
    CHECK(static_cast<Index>(basis.size()) == commutant_dimension(h));
    CHECK(irr == (basis.size() == 1));
    CHECK(irr == has_positive_power(h));
    (irr ? irreducible : reducible)++;
  }
  CHECK(irreducible > 50);
  CHECK(reducible > 50);
}

TEST_CASE("property: exp(tH) is stochastic and contracts the 1-norm") {
  std::mt19937_64 rng(46);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 60; ++trial) {
    const Operator h = hamiltonian(random_graph(rng, 6, 12));
    for (double t : {0.1, 1.0, 10.0}) {
      const RealMatrix e = expm_uniformized(h, t);
      CHECK(is_stochastic(e));
      CHECK(e.minCoeff() >= -1e-12);
      RealVector psi(h.rows());
      for (Index i = 0; i < psi.size(); ++i) psi(i) = g(rng);
      CHECK((e * psi).lpNorm<1>() <= psi.lpNorm<1>() + 1e-9);
    }
  }
}
