#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "crn/markov.hpp"
#include "crn/network.hpp"
#include "crn/types.hpp"

namespace crn {

struct IntVectorHash {
  std::size_t operator()(const IntVector& v) const noexcept;
};
struct IntVectorEqual {
  bool operator()(const IntVector& a, const IntVector& b) const noexcept {
    return a.size() == b.size() && a == b;
  }
};

/// An enumerated set of population vectors with a reverse index.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(std::vector<IntVector> states, std::int64_t cap, bool closed);

  Index size() const { return static_cast<Index>(states_.size()); }
  const IntVector& state(Index i) const { return states_.at(static_cast<std::size_t>(i)); }
  const std::vector<IntVector>& states() const { return states_; }
  std::optional<Index> find(const IntVector& s) const;

  /// Total-count bound used during enumeration (negative if none).
  std::int64_t cap() const { return cap_; }
  /// True iff no transition leads out of the set.
  bool closed() const { return closed_; }

 private:
  std::vector<IntVector> states_;
  std::unordered_map<IntVector, Index, IntVectorHash, IntVectorEqual> index_;
  std::int64_t cap_ = -1;
  bool closed_ = true;
};

/// Breadth-first closure of `seeds` under the transitions, keeping successors
/// whose total count is at most `cap`. Order: seeds first, then discovery order.
StateSpace enumerate_states(const ReactionNetwork& n, const std::vector<IntVector>& seeds, std::int64_t cap);
StateSpace enumerate_states(const ReactionNetwork& n, const IntVector& n0, std::int64_t cap);

/// All population vectors with 0 <= l_i <= caps_i. `closed` is computed
/// against the network.
StateSpace box_space(const ReactionNetwork& n, const IntVector& caps);

/// Falling power l (l - 1) ... (l - m + 1); 1 for m = 0, 0 when m > l.
double falling_power(std::int64_t l, std::int64_t m);
/// Product of falling powers over species: the number of ordered ways to pick
/// the reactant multiset from population l.
double falling_power(const IntVector& l, const IntVector& m);

/// Propensity r * l^{m falling} of transition tau at population l.
double propensity(const ReactionNetwork& n, Index tau, const IntVector& l);

using SparseOperator = Eigen::SparseMatrix<double>;

struct MasterOperator {
  SparseOperator matrix;
  /// Some applicable transition was dropped because its target lies outside the space.
  bool boundary_truncated = false;
};

/// Master-equation generator on `space`:
///   H(l + n - m, l) += r l^{m falling},  H(l, l) -= r l^{m falling}.
/// A transition whose target is outside the space is dropped entirely, so
/// every column sums to zero. Each diagonal entry is the negated sum of the
/// column's off-diagonal entries taken in row order, so the cancellation is
/// exact in that order; other summation orders may leave a few ulps.
MasterOperator master_hamiltonian(const ReactionNetwork& n, const StateSpace& space);

/// The same generator assembled from truncated creation/annihilation
/// matrices, H = sum_tau r (a+^n - a+^m) a^m. Agrees with
/// master_hamiltonian on every column none of whose transitions leaves the space.
SparseOperator master_hamiltonian_ladder(const ReactionNetwork& n, const StateSpace& space);

/// Per-species annihilation (a_i |l> = l_i |l - e_i>) and creation
/// (a+_i |l> = |l + e_i>) matrices; moves leaving the space are dropped.
SparseOperator annihilation(const StateSpace& space, Index species);
SparseOperator creation(const StateSpace& space, Index species);

/// A probability distribution over the states of a StateSpace.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  /// Normalizes `weights` to sum 1; throws InputError for negative entries
  /// (below -1e-12) or zero total mass.
  explicit ProbabilityVector(RealVector weights);

  static ProbabilityVector point_mass(const StateSpace& space, const IntVector& state);
  /// Wraps a vector already summing to 1 (within 1e-9) without rescaling it.
  static ProbabilityVector assume_normalized(RealVector probs);

  const RealVector& probs() const { return probs_; }
  Index size() const { return probs_.size(); }
  double operator()(Index i) const { return probs_(i); }

 private:
  RealVector probs_;
};

double total_variation(const RealVector& p, const RealVector& q);

struct UniformizationReport {
  RealVector result;
  double rate = 0.0;        // uniformization rate Lambda
  long terms = 0;           // series terms used
  double drift = 0.0;       // |sum(result) - sum(input)| before any renormalization
};

/// exp(t h) v by uniformization, for any vector v. The Poisson series is cut
/// once the remaining weight is below 1e-12.
UniformizationReport uniformize(const SparseOperator& h, const RealVector& v, double t);

/// Probability evolution under the master equation. Renormalizes only if the
/// mass drift exceeds 1e-12.
ProbabilityVector evolve(const MasterOperator& h, const ProbabilityVector& psi0, double t);

/// sum_l (o . l)^order psi_l.
double moment(const StateSpace& space, const ProbabilityVector& psi, const RealVector& weights, int order);

/// Per-species means of a distribution.
RealVector species_means(const StateSpace& space, const ProbabilityVector& psi);

/// Product of Poissons with means x, restricted to `space` and normalized.
/// Requires x to be complex balanced for `n` (tolerance `tol`).
ProbabilityVector ack_state(const ReactionNetwork& n, const RealVector& x, const StateSpace& space, double tol = 1e-9);
/// Product-Poisson weights without the complex-balance precondition.
ProbabilityVector product_poisson(const RealVector& x, const StateSpace& space);

/// |H psi|_inf / |H|_inf with |H|_inf the largest absolute entry.
double relative_residual(const MasterOperator& h, const ProbabilityVector& psi);

/// Values w . l on every state.
Observable observable_from_weights(const StateSpace& space, const RealVector& weights);

/// Restriction to {l : w . l = k}, renormalized. Throws PreconditionError if
/// the class carries no probability in `space`.
ProbabilityVector condition_on_class(const StateSpace& space, const ProbabilityVector& psi, const IntVector& w,
                                     std::int64_t k);

/// psi_l <- exp(s O_l) psi_l, renormalized. Computed in log space; throws
/// NumericalError if the scaled weights are not representable.
ProbabilityVector symmetry_scale(const ProbabilityVector& psi, const Observable& o, double s);

struct SsaResult {
  std::uint64_t seed = 0;
  double t_end = 0.0;
  std::vector<IntVector> end_states;   // by trial index
  std::vector<double> bin_times;
  std::vector<RealVector> bin_means;   // mean counts at each bin time
  RealVector mean;                     // mean of end states
  RealVector variance;                 // population variance of end states
};

/// Gillespie direct-method sampling. Trial i draws from its own generator
/// seeded from (seed, i), so results do not depend on `threads`.
SsaResult ssa_sample(const ReactionNetwork& n, const IntVector& n0, double t_end, std::uint64_t seed, long trials,
                     int bins = 10, int threads = 1);

/// Empirical distribution of SSA end states over `space` (states outside are ignored).
RealVector empirical_distribution(const StateSpace& space, const std::vector<IntVector>& samples);

}  // namespace crn
