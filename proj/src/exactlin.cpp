#include "crn/exactlin.hpp"

#include <cstdlib>
#include <limits>

namespace crn {
namespace {

using Wide = __int128;

std::int64_t narrow(Wide x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min()) {
    throw NumericalError("integer overflow in exact elimination; needs big-integer path");
  }
  return static_cast<std::int64_t>(x);
}

std::int64_t gcd_abs(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

}  // namespace

Index int_rank(const IntMatrix& m) {
  IntMatrix a = m;
  const Index rows = a.rows();
  const Index cols = a.cols();
  std::int64_t prev = 1;
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index piv = r;
    while (piv < rows && a(piv, c) == 0) ++piv;
    if (piv == rows) continue;
    a.row(r).swap(a.row(piv));
    for (Index i = r + 1; i < rows; ++i) {
      for (Index j = c + 1; j < cols; ++j) {
        const Wide num = Wide(a(r, c)) * a(i, j) - Wide(a(i, c)) * a(r, j);
        a(i, j) = narrow(num / prev);
      }
      a(i, c) = 0;
    }
    prev = a(r, c);
    ++r;
  }
  return r;
}

IntVector normalize_content(IntVector v) {
  std::int64_t g = 0;
  for (Index i = 0; i < v.size(); ++i) g = gcd_abs(g, v(i));
  if (g > 1) v /= g;
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return v;
}

std::vector<IntVector> int_kernel_basis(const IntMatrix& m) {
  // Fraction-free Gauss-Jordan: each row update is an integer combination
  // followed by removal of the row content, so entries stay small and exact.
  IntMatrix a = m;
  const Index rows = a.rows();
  const Index cols = a.cols();
  std::vector<Index> pivot_cols;
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index piv = r;
    while (piv < rows && a(piv, c) == 0) ++piv;
    if (piv == rows) continue;
    a.row(r).swap(a.row(piv));
    if (a(r, c) < 0) a.row(r) = -a.row(r);
    for (Index i = 0; i < rows; ++i) {
      if (i == r || a(i, c) == 0) continue;
      const std::int64_t g = gcd_abs(a(r, c), a(i, c));
      const std::int64_t fi = a(r, c) / g;
      const std::int64_t fr = a(i, c) / g;
      for (Index j = 0; j < cols; ++j) a(i, j) = narrow(Wide(fi) * a(i, j) - Wide(fr) * a(r, j));
      IntVector row = a.row(i).transpose();
      std::int64_t content = 0;
      for (Index j = 0; j < cols; ++j) content = gcd_abs(content, row(j));
      if (content > 1) a.row(i) /= content;
    }
    pivot_cols.push_back(c);
    ++r;
  }

  std::vector<char> is_pivot(static_cast<std::size_t>(cols), 0);
  for (Index c : pivot_cols) is_pivot[static_cast<std::size_t>(c)] = 1;
  std::int64_t lcm = 1;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    lcm = narrow(Wide(lcm) / std::gcd(lcm, a(static_cast<Index>(i), pivot_cols[i])) *
                 a(static_cast<Index>(i), pivot_cols[i]));
  }

  std::vector<IntVector> basis;
  for (Index f = 0; f < cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    IntVector v = IntVector::Zero(cols);
    v(f) = lcm;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
      const Index row = static_cast<Index>(i);
      v(pivot_cols[i]) = narrow(-Wide(a(row, f)) * (lcm / a(row, pivot_cols[i])));
    }
    basis.push_back(normalize_content(std::move(v)));
  }
  return basis;
}

IntMatrix columns_to_matrix(const std::vector<IntVector>& cols, Index rows) {
  IntMatrix out(rows, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = cols[j];
  return out;
}

}  // namespace crn
