#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include "crn/errors.hpp"
#include "crn/types.hpp"

namespace crn {

// ---------------------------------------------------------------------------
// Exact integer linear algebra
//
// All routines use 64-bit entries with checked arithmetic; an overflow throws
// NumericalError instead of returning a wrong answer.

/// Rank over the rationals by Bareiss fraction-free elimination.
Index int_rank(const IntMatrix& m);

/// Integer basis of the right kernel. Each vector has content 1 and a
/// positive leading nonzero entry.
std::vector<IntVector> int_kernel_basis(const IntMatrix& m);

/// Kernel of the transpose: row vectors w with w * m = 0.
inline std::vector<IntVector> int_left_kernel_basis(const IntMatrix& m) {
  return int_kernel_basis(m.transpose());
}

/// Divides by the gcd of the entries and makes the first nonzero entry positive.
IntVector normalize_content(IntVector v);

/// Stacks integer vectors as the columns of a matrix with `rows` rows.
IntMatrix columns_to_matrix(const std::vector<IntVector>& cols, Index rows);

// ---------------------------------------------------------------------------
// Spectra

/// Eigenvalues sorted descending, optionally with matching eigenvector columns.
template <typename Scalar>
struct Spectrum {
  Vector<Scalar> eigenvalues;
  Matrix<Scalar> eigenvectors;

  struct Group {
    Scalar value;
    Index multiplicity;
  };

  /// Clusters consecutive eigenvalues closer than `tol` (absolute). The group
  /// value is the mean of its members.
  std::vector<Group> grouped(Scalar tol = Scalar(1e-8)) const {
    std::vector<Group> out;
    Index start = 0;
    for (Index i = 1; i <= eigenvalues.size(); ++i) {
      if (i == eigenvalues.size() || std::abs(eigenvalues(i) - eigenvalues(i - 1)) > tol) {
        const Index count = i - start;
        out.push_back({eigenvalues.segment(start, count).mean(), count});
        start = i;
      }
    }
    return out;
  }
};

/// Max-abs asymmetry relative to the infinity norm.
template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar rel_tol) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().rowwise().sum().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

/// Cyclic Jacobi eigensolver for real symmetric matrices.
///
/// Sweeps over every off-diagonal pair until the off-diagonal mass is below
/// working precision. Throws InputError if `m` is not symmetric.
template <typename Derived>
Spectrum<typename Derived::Scalar> symmetric_eigen(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (!is_symmetric(m, Scalar(1e-12))) throw InputError("symmetric_eigen: matrix is not symmetric");
  const Index n = m.rows();
  Matrix<Scalar> a = Scalar(0.5) * (m + m.transpose());
  Matrix<Scalar> v = Matrix<Scalar>::Identity(n, n);

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar total = a.squaredNorm();
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    // Summed directly; |a|^2 - |diag a|^2 cancels to zero too early.
    Scalar off(0);
    for (Index j = 1; j < n; ++j) off += Scalar(2) * a.col(j).head(j).squaredNorm();
    if (off <= eps * eps * total || off == Scalar(0)) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        a(p, q) = a(q, p) = Scalar(0);
        v.applyOnTheRight(p, q, rot);
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
  Spectrum<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Least squares

template <typename Scalar>
struct LeastSquaresResult {
  Vector<Scalar> solution;
  Scalar residual;
};

/// Minimum-norm minimizer of |a x - b|_2 (QR with column pivoting followed by
/// a complete orthogonal reduction of the rank-deficient part).
template <typename DerivedA, typename DerivedB>
LeastSquaresResult<typename DerivedA::Scalar> least_squares(const Eigen::MatrixBase<DerivedA>& a,
                                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() < 1) throw InputError("least_squares: matrix has no columns");
  if (a.rows() != b.rows()) throw InputError("least_squares: dimension mismatch");
  Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(a);
  LeastSquaresResult<Scalar> out;
  out.solution = cod.solve(b);
  out.residual = (a * out.solution - b).norm();
  return out;
}

// ---------------------------------------------------------------------------
// Perron-Frobenius

/// True iff the directed graph with an edge i -> j whenever t(j, i) != 0 is
/// strongly connected.
template <typename Derived>
bool is_irreducible(const Eigen::MatrixBase<Derived>& t) {
  const Index n = t.rows();
  if (n != t.cols()) return false;
  if (n <= 1) return true;
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    Index count = 1;
    while (!stack.empty()) {
      const Index i = stack.back();
      stack.pop_back();
      for (Index j = 0; j < n; ++j) {
        const auto w = transpose ? t(i, j) : t(j, i);
        if (j != i && w != 0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

template <typename Scalar>
struct PerronResult {
  Scalar value;
  Vector<Scalar> vector;  // positive, sums to 1
  long iterations;
};

/// Dominant eigenpair of a nonnegative irreducible matrix.
///
/// Iterates on t + I, which is primitive whenever t is irreducible, so the
/// iteration converges even when t has other eigenvalues of modulus r.
/// Stops when |t v - r v|_inf <= 1e-12 r.
template <typename Derived>
PerronResult<typename Derived::Scalar> perron_frobenius(
    const Eigen::MatrixBase<Derived>& t, std::optional<Vector<typename Derived::Scalar>> start = std::nullopt,
    long max_iterations = 1'000'000) {
  using Scalar = typename Derived::Scalar;
  const Index n = t.rows();
  if (n != t.cols() || n == 0) throw InputError("perron_frobenius: matrix must be square and nonempty");
  if ((t.array() < Scalar(0)).any()) throw PreconditionError("perron_frobenius: matrix has a negative entry");
  if (!is_irreducible(t)) throw PreconditionError("perron_frobenius: matrix is not irreducible");
  // A lone zero entry is strongly connected as a graph but has no positive eigenvalue.
  if (n == 1 && t(0, 0) == Scalar(0)) throw PreconditionError("perron_frobenius: 1x1 zero matrix has r = 0");

  Vector<Scalar> v = start ? *start : Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  if (v.size() != n || (v.array() <= Scalar(0)).any()) throw InputError("perron_frobenius: start must be positive");
  v /= v.sum();
  const Matrix<Scalar> shifted = t + Matrix<Scalar>::Identity(n, n);
  for (long it = 1; it <= max_iterations; ++it) {
    const Vector<Scalar> tv = t * v;
    const Scalar r = tv.sum();  // v sums to 1
    if ((tv - r * v).cwiseAbs().maxCoeff() <= Scalar(1e-12) * r) return {r, v, it};
    v = shifted * v;
    v /= v.sum();
  }
  throw NumericalError("perron_frobenius: no convergence within iteration cap");
}

}  // namespace crn
