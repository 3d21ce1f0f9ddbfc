#include <doctest.h>

#include <random>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <Eigen/Eigenvalues>

#include "crn/exactlin.hpp"
#include "crn/structure.hpp"
#include "fixtures.hpp"

using namespace crn;

namespace {

// Oracle: plain Gaussian elimination over exact rationals.
Index rational_rank(const IntMatrix& m) {
  using Q = boost::rational<boost::multiprecision::cpp_int>;
  std::vector<std::vector<Q>> a(static_cast<std::size_t>(m.rows()), std::vector<Q>(static_cast<std::size_t>(m.cols())));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) a[i][j] = Q(static_cast<long long>(m(i, j)));
  std::size_t rank = 0;
  for (std::size_t c = 0; c < static_cast<std::size_t>(m.cols()) && rank < a.size(); ++c) {
    std::size_t p = rank;
    while (p < a.size() && a[p][c].numerator() == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t i = rank + 1; i < a.size(); ++i) {
      const Q f = a[i][c] / a[rank][c];
      for (std::size_t j = c; j < a[i].size(); ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return static_cast<Index>(rank);
}

IntMatrix random_int_matrix(std::mt19937_64& rng, Index max_dim, int range) {
  std::uniform_int_distribution<Index> dim(0, max_dim);
  std::uniform_int_distribution<int> entry(-range, range), sparse(0, 3);
  const Index r = dim(rng), c = dim(rng);
  IntMatrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = sparse(rng) == 0 ? 0 : entry(rng);
  // Low-rank cases: copy a combination of earlier rows.
  if (r >= 3 && sparse(rng) == 0) m.row(r - 1) = 2 * m.row(0) - 3 * m.row(1);
  return m;
}

IntVector iv(std::initializer_list<std::int64_t> xs) {
  IntVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

RealMatrix circuit_dirichlet() {
  RealMatrix h(5, 5);
  h << -4, 2, 1, 0, 1,  //
      2, -4, 0, 1, 1,   //
      1, 0, -4, 2, 1,   //
      0, 1, 2, -4, 1,   //
      1, 1, 1, 1, -4;
  return h;
}

}  // namespace

TEST_CASE("int_rank: worked examples") {
  CHECK(int_rank(IntMatrix::Zero(3, 4)) == 0);
  CHECK(int_rank(IntMatrix(0, 0)) == 0);
  const auto maps = build_incidence(parse_network(fixtures::kPart17));
  CHECK(int_rank(maps.reaction_vectors()) == 3);
  CHECK(int_rank(maps.boundary) == 3);  // 5 complexes - 2 components
}

TEST_CASE("property: int_rank matches the rational oracle and its transpose") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const IntMatrix m = random_int_matrix(rng, 8, 9);
    const Index r = int_rank(m);
    CHECK(r == rational_rank(m));
    CHECK(r == int_rank(m.transpose()));
  }
}

TEST_CASE("int_kernel_basis: examples") {
  CHECK(int_kernel_basis(IntMatrix::Identity(4, 4)).empty());

  const auto diatomic = build_incidence(parse_network(fixtures::kDiatomic)).reaction_vectors();
  const auto laws = int_left_kernel_basis(diatomic);
  REQUIRE(laws.size() == 1);
  CHECK(laws[0] == iv({1, 2}));

  const auto si = build_incidence(parse_network(fixtures::kSi)).reaction_vectors();
  const auto si_laws = int_left_kernel_basis(si);
  REQUIRE(si_laws.size() == 1);
  CHECK(si_laws[0] == iv({1, 1}));

  IntMatrix row(1, 3);
  row << 2, -4, 6;
  const auto k = int_kernel_basis(row);
  CHECK(k.size() == 2);
  for (const auto& v : k) CHECK((row * v).isZero());
}

TEST_CASE("property: kernel vectors are annihilated, primitive and sign-normalized") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const IntMatrix m = random_int_matrix(rng, 7, 6);
    const auto basis = int_kernel_basis(m);
    CHECK(static_cast<Index>(basis.size()) == m.cols() - rational_rank(m));
    for (const auto& v : basis) {
      CHECK((m * v).isZero());
      std::int64_t g = 0;
      for (Index i = 0; i < v.size(); ++i) g = std::gcd(g, v(i));
      CHECK(g == 1);
      Index lead = 0;
      while (v(lead) == 0) ++lead;
      CHECK(v(lead) > 0);
    }
    if (!basis.empty()) CHECK(int_rank(columns_to_matrix(basis, m.cols())) == static_cast<Index>(basis.size()));
  }
}

TEST_CASE("integer overflow is reported, not wrapped") {
  IntMatrix m(2, 2);
  m << (std::int64_t{1} << 62), 3, 5, (std::int64_t{1} << 62);
  CHECK_THROWS_AS(int_rank(m), NumericalError);
}

TEST_CASE("symmetric_eigen: small cases") {
  RealMatrix one(1, 1);
  one << 2.5;
  const auto s1 = symmetric_eigen(one);
  CHECK(s1.eigenvalues(0) == doctest::Approx(2.5));

  const auto s = symmetric_eigen(circuit_dirichlet());
  // Trace is -20; the spectrum is {0, -3, -5, -5, -7}.
  const double expected[] = {0, -3, -5, -5, -7};
  for (int i = 0; i < 5; ++i) CHECK(std::abs(s.eigenvalues(i) - expected[i]) < 1e-10);
  const auto groups = s.grouped(1e-8);
  REQUIRE(groups.size() == 4);
  CHECK(groups[2].multiplicity == 2);
  CHECK(std::abs(s.eigenvectors.col(0).cwiseAbs().minCoeff() - s.eigenvectors.col(0).cwiseAbs().maxCoeff()) < 1e-10);

  RealMatrix bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(symmetric_eigen(bad), InputError);
}

TEST_CASE("symmetric_eigen is templated on the scalar") {
  Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> m(2, 2);
  m << 2, 1, 1, 2;
  const auto s = symmetric_eigen(m);
  CHECK(static_cast<double>(s.eigenvalues(0)) == doctest::Approx(3.0));
  CHECK(static_cast<double>(s.eigenvalues(1)) == doctest::Approx(1.0));
}

TEST_CASE("property: Jacobi eigensolver against the library eigensolver") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dim(1, 12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng);
    RealMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    a = (a + a.transpose()).eval();
    const auto s = symmetric_eigen(a);
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(std::abs(s.eigenvalues.sum() - a.trace()) <= 1e-9 * norm);
    CHECK((s.eigenvectors.transpose() * s.eigenvectors - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-9);
    const RealMatrix rebuilt = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
    CHECK((rebuilt - a).cwiseAbs().rowwise().sum().maxCoeff() <= 1e-10 * norm);
    for (int i = 1; i < n; ++i) CHECK(s.eigenvalues(i) <= s.eigenvalues(i - 1));

    Eigen::SelfAdjointEigenSolver<RealMatrix> oracle(a);
    const RealVector ref = oracle.eigenvalues().reverse();
    CHECK((ref - s.eigenvalues).cwiseAbs().maxCoeff() <= 1e-9 * norm);
  }
}

TEST_CASE("least_squares: examples") {
  const RealVector b = RealVector::LinSpaced(4, -1.0, 2.0);
  const auto id = least_squares(RealMatrix::Identity(4, 4), b);
  CHECK((id.solution - b).norm() < 1e-14);
  CHECK(id.residual < 1e-14);

  RealMatrix a(2, 1);
  a << 1, 1;
  const auto mean = least_squares(a, RealVector((RealVector(2) << 0, 2).finished()));
  CHECK(mean.solution(0) == doctest::Approx(1.0));
  CHECK(mean.residual == doctest::Approx(std::sqrt(2.0)));

  // Rank deficient: minimum-norm solution.
  RealMatrix wide(1, 2);
  wide << 1, 1;
  const auto mn = least_squares(wide, RealVector::Constant(1, 2.0));
  CHECK(mn.solution(0) == doctest::Approx(1.0));
  CHECK(mn.solution(1) == doctest::Approx(1.0));

  CHECK_THROWS_AS(least_squares(RealMatrix(2, 0), RealVector::Zero(2)), InputError);
}

TEST_CASE("property: least_squares recovers forward-generated right-hand sides") {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> dim(1, 8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int cols = dim(rng), rows = cols + dim(rng) - 1;
    RealMatrix a(rows, cols);
    RealVector x0(cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = g(rng);
    for (int j = 0; j < cols; ++j) x0(j) = g(rng);
    const auto r = least_squares(a, RealVector(a * x0));
    CHECK(r.residual <= 1e-10);
  }
}

TEST_CASE("perron_frobenius: examples") {
  RealMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const auto p = perron_frobenius(swap);
  CHECK(p.value == doctest::Approx(1.0));
  CHECK(p.vector(0) == doctest::Approx(0.5));
  CHECK(p.vector(1) == doctest::Approx(0.5));

  RealMatrix c(1, 1);
  c << 3.5;
  const auto pc = perron_frobenius(c);
  CHECK(pc.value == doctest::Approx(3.5));
  CHECK(pc.vector(0) == doctest::Approx(1.0));

  const RealMatrix a = circuit_dirichlet() + 4.0 * RealMatrix::Identity(5, 5);
  const auto pa = perron_frobenius(a);
  CHECK(std::abs(pa.value - 4.0) < 1e-10);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(pa.vector(i) - 0.2) < 1e-10);

  RealMatrix reducible(2, 2);
  reducible << 1, 0, 1, 1;
  CHECK_THROWS_AS(perron_frobenius(reducible), PreconditionError);
  RealMatrix negative(1, 1);
  negative << -1;
  CHECK_THROWS_AS(perron_frobenius(negative), PreconditionError);
  CHECK_THROWS_AS(perron_frobenius(RealMatrix::Zero(1, 1)), PreconditionError);
}

TEST_CASE("property: Perron-Frobenius dominance, positivity and uniqueness") {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> dim(1, 6), coin(0, 2);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  int tested = 0;
  while (tested < 200) {
    const int n = dim(rng);
    RealMatrix t = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (coin(rng) == 0) t(i, j) = u(rng);
    if (!is_irreducible(t) || (n == 1 && t(0, 0) == 0.0)) continue;
    ++tested;
    const auto p = perron_frobenius(t);
    CHECK(p.value > 0.0);
    CHECK((p.vector.array() > 0.0).all());
    CHECK(std::abs(p.vector.sum() - 1.0) < 1e-12);
    Eigen::EigenSolver<RealMatrix> oracle(t, false);
    for (int i = 0; i < n; ++i) CHECK(std::abs(oracle.eigenvalues()(i)) <= p.value * (1.0 + 1e-9));
    RealVector start(n);
    for (int i = 0; i < n; ++i) start(i) = u(rng);
    const auto again = perron_frobenius(t, start);
    CHECK((again.vector - p.vector).cwiseAbs().maxCoeff() <= 1e-8);
  }
}
