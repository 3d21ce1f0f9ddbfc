#include "crn/masterdyn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <random>
#include <thread>

#include "crn/errors.hpp"
#include "crn/ratedyn.hpp"

namespace crn {

std::size_t IntVectorHash::operator()(const IntVector& v) const noexcept {
  std::size_t h = static_cast<std::size_t>(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    h ^= std::hash<std::int64_t>{}(v(i)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

StateSpace::StateSpace(std::vector<IntVector> states, std::int64_t cap, bool closed)
    : states_(std::move(states)), cap_(cap), closed_(closed) {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!index_.emplace(states_[i], static_cast<Index>(i)).second) throw InputError("state space has duplicate states");
  }
}

std::optional<Index> StateSpace::find(const IntVector& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool applicable(const IntVector& l, const IntVector& m) { return (l.array() >= m.array()).all(); }

}  // namespace

StateSpace enumerate_states(const ReactionNetwork& n, const std::vector<IntVector>& seeds, std::int64_t cap) {
  std::vector<IntVector> states;
  std::unordered_map<IntVector, Index, IntVectorHash, IntVectorEqual> seen;
  std::deque<IntVector> queue;
  for (const auto& s : seeds) {
    if (s.size() != n.num_species()) throw InputError("initial state length does not match species count");
    if ((s.array() < 0).any()) throw InputError("initial state has a negative count");
    if (s.sum() > cap) throw InputError("cap is below the initial total count");
    if (seen.emplace(s, static_cast<Index>(states.size())).second) {
      states.push_back(s);
      queue.push_back(s);
    }
  }
  bool closed = true;
  while (!queue.empty()) {
    const IntVector l = queue.front();
    queue.pop_front();
    for (Index tau = 0; tau < n.num_transitions(); ++tau) {
      if (!applicable(l, n.reactant(tau))) continue;
      IntVector next = l + n.product(tau) - n.reactant(tau);
      if (next.sum() > cap) {
        closed = false;
        continue;
      }
      if (seen.emplace(next, static_cast<Index>(states.size())).second) {
        states.push_back(next);
        queue.push_back(std::move(next));
      }
    }
  }
  return StateSpace(std::move(states), cap, closed);
}

StateSpace enumerate_states(const ReactionNetwork& n, const IntVector& n0, std::int64_t cap) {
  return enumerate_states(n, std::vector<IntVector>{n0}, cap);
}

StateSpace box_space(const ReactionNetwork& n, const IntVector& caps) {
  if (caps.size() != n.num_species() || (caps.array() < 0).any()) throw InputError("box_space: bad caps");
  std::vector<IntVector> states;
  IntVector l = IntVector::Zero(caps.size());
  while (true) {
    states.push_back(l);
    Index i = 0;
    while (i < l.size() && l(i) == caps(i)) l(i++) = 0;
    if (i == l.size()) break;
    ++l(i);
  }
  StateSpace probe(states, caps.sum(), true);
  bool closed = true;
  for (const auto& s : states) {
    for (Index tau = 0; tau < n.num_transitions() && closed; ++tau) {
      if (applicable(s, n.reactant(tau)) && !probe.find(s + n.product(tau) - n.reactant(tau))) closed = false;
    }
  }
  return StateSpace(std::move(states), caps.sum(), closed);
}

double falling_power(std::int64_t l, std::int64_t m) {
  double p = 1.0;
  for (std::int64_t j = 0; j < m; ++j) p *= static_cast<double>(l - j);
  return m > l ? 0.0 : p;
}

double falling_power(const IntVector& l, const IntVector& m) {
  double p = 1.0;
  for (Index i = 0; i < l.size(); ++i) p *= falling_power(l(i), m(i));
  return p;
}

double propensity(const ReactionNetwork& n, Index tau, const IntVector& l) {
  return n.rate(tau) * falling_power(l, n.reactant(tau));
}

MasterOperator master_hamiltonian(const ReactionNetwork& n, const StateSpace& space) {
  MasterOperator out;
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index j = 0; j < space.size(); ++j) {
    const IntVector& l = space.state(j);
    for (Index tau = 0; tau < n.num_transitions(); ++tau) {
      if (!applicable(l, n.reactant(tau))) continue;
      const double p = propensity(n, tau, l);
      if (p == 0.0) continue;
      const auto target = space.find(l + n.product(tau) - n.reactant(tau));
      if (!target) {
        out.boundary_truncated = true;
        continue;
      }
      if (*target != j) triplets.emplace_back(*target, j, p);
    }
  }
  // Off-diagonals first; each diagonal is then the negated column sum taken in
  // row order, so the two agree bit for bit.
  SparseOperator off(space.size(), space.size());
  off.setFromTriplets(triplets.begin(), triplets.end());
  triplets.clear();
  for (Index j = 0; j < off.outerSize(); ++j) {
    double sum = 0.0;
    for (SparseOperator::InnerIterator it(off, j); it; ++it) {
      sum += it.value();
      triplets.emplace_back(it.row(), j, it.value());
    }
    if (sum != 0.0) triplets.emplace_back(j, j, -sum);
  }
  out.matrix.resize(space.size(), space.size());
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseOperator annihilation(const StateSpace& space, Index species) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index j = 0; j < space.size(); ++j) {
    const IntVector& l = space.state(j);
    if (l(species) == 0) continue;
    IntVector down = l;
    --down(species);
    if (auto i = space.find(down)) triplets.emplace_back(*i, j, static_cast<double>(l(species)));
  }
  SparseOperator a(space.size(), space.size());
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

SparseOperator creation(const StateSpace& space, Index species) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index j = 0; j < space.size(); ++j) {
    IntVector up = space.state(j);
    ++up(species);
    if (auto i = space.find(up)) triplets.emplace_back(*i, j, 1.0);
  }
  SparseOperator c(space.size(), space.size());
  c.setFromTriplets(triplets.begin(), triplets.end());
  return c;
}

SparseOperator master_hamiltonian_ladder(const ReactionNetwork& n, const StateSpace& space) {
  const Index s = n.num_species();
  const Index dim = space.size();
  std::vector<SparseOperator> a, c;
  for (Index i = 0; i < s; ++i) {
    a.push_back(annihilation(space, i));
    c.push_back(creation(space, i));
  }
  SparseOperator identity(dim, dim);
  identity.setIdentity();
  auto power_product = [&](const std::vector<SparseOperator>& ops, const IntVector& exps) {
    SparseOperator p = identity;
    for (Index i = 0; i < s; ++i)
      for (std::int64_t e = 0; e < exps(i); ++e) p = SparseOperator(ops[static_cast<std::size_t>(i)] * p);
    return p;
  };
  SparseOperator h(dim, dim);
  for (Index tau = 0; tau < n.num_transitions(); ++tau) {
    const SparseOperator lower = power_product(a, n.reactant(tau));
    const SparseOperator term =
        SparseOperator(power_product(c, n.product(tau)) * lower) - SparseOperator(power_product(c, n.reactant(tau)) * lower);
    h += n.rate(tau) * term;
  }
  h.prune(0.0);
  return h;
}

// ---------------------------------------------------------------------------

ProbabilityVector::ProbabilityVector(RealVector weights) {
  if (!weights.allFinite()) throw InputError("probability weights must be finite");
  if (weights.size() && weights.minCoeff() < -1e-12) throw InputError("probability weights must be nonnegative");
  const double total = weights.sum();
  if (!(total > 0.0)) throw InputError("probability weights have zero mass");
  probs_ = weights / total;
}

ProbabilityVector ProbabilityVector::point_mass(const StateSpace& space, const IntVector& state) {
  auto i = space.find(state);
  if (!i) throw InputError("point mass: state not in space");
  RealVector w = RealVector::Zero(space.size());
  w(*i) = 1.0;
  return ProbabilityVector(std::move(w));
}

ProbabilityVector ProbabilityVector::assume_normalized(RealVector probs) {
  if (!probs.allFinite() || (probs.size() && probs.minCoeff() < -1e-12) || std::abs(probs.sum() - 1.0) > 1e-9) {
    throw InputError("vector is not a normalized probability distribution");
  }
  ProbabilityVector p;
  p.probs_ = std::move(probs);
  return p;
}

double total_variation(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size()) throw InputError("total_variation: length mismatch");
  return 0.5 * (p - q).lpNorm<1>();
}

UniformizationReport uniformize(const SparseOperator& h, const RealVector& v, double t) {
  if (!(t >= 0.0)) throw InputError("evolve: t must be nonnegative");
  if (h.rows() != h.cols() || h.rows() != v.size()) throw InputError("evolve: dimension mismatch");
  UniformizationReport out;
  double max_diag = 0.0;
  for (Index j = 0; j < h.outerSize(); ++j) max_diag = std::max(max_diag, std::abs(h.coeff(j, j)));
  if (t == 0.0 || max_diag == 0.0) {
    out.result = v;
    return out;
  }
  const double lambda = max_diag * (1.0 + 1e-12);
  out.rate = lambda;
  const double mean = lambda * t;
  const double log_mean = std::log(mean);
  const long hard_cap = static_cast<long>(mean + 60.0 * std::sqrt(mean) + 200.0);

  RealVector term = v;
  out.result = RealVector::Zero(v.size());
  double accumulated = 0.0;
  long k = 0;
  for (;; ++k) {
    const double w = std::exp(-mean + static_cast<double>(k) * log_mean - std::lgamma(static_cast<double>(k) + 1.0));
    out.result += w * term;
    accumulated += w;
    if ((static_cast<double>(k) > mean && 1.0 - accumulated < 1e-12) || k >= hard_cap) break;
    term += (h * term) / lambda;
  }
  if (1.0 - accumulated >= 1e-12) throw NumericalError("uniformization did not reach the tail bound");
  out.terms = k + 1;
  out.drift = std::abs(out.result.sum() - v.sum());
  return out;
}

ProbabilityVector evolve(const MasterOperator& h, const ProbabilityVector& psi0, double t) {
  auto rep = uniformize(h.matrix, psi0.probs(), t);
  if (rep.drift <= 1e-12) return ProbabilityVector::assume_normalized(std::move(rep.result));
  return ProbabilityVector(rep.result.cwiseMax(0.0));
}

double moment(const StateSpace& space, const ProbabilityVector& psi, const RealVector& weights, int order) {
  if (order != 1 && order != 2) throw InputError("moment order must be 1 or 2");
  if (psi.size() != space.size()) throw InputError("moment: distribution does not match space");
  double sum = 0.0;
  for (Index i = 0; i < space.size(); ++i) {
    const double v = weights.dot(space.state(i).cast<double>());
    sum += (order == 1 ? v : v * v) * psi(i);
  }
  return sum;
}

RealVector species_means(const StateSpace& space, const ProbabilityVector& psi) {
  RealVector m = RealVector::Zero(space.size() ? space.state(0).size() : 0);
  for (Index i = 0; i < space.size(); ++i) m += psi(i) * space.state(i).cast<double>();
  return m;
}

ProbabilityVector product_poisson(const RealVector& x, const StateSpace& space) {
  if ((x.array() <= 0.0).any()) throw InputError("product_poisson: means must be positive");
  RealVector logw(space.size());
  for (Index i = 0; i < space.size(); ++i) {
    const IntVector& l = space.state(i);
    if (l.size() != x.size()) throw InputError("product_poisson: length mismatch");
    double s = 0.0;
    for (Index j = 0; j < l.size(); ++j) {
      s += static_cast<double>(l(j)) * std::log(x(j)) - std::lgamma(static_cast<double>(l(j)) + 1.0);
    }
    logw(i) = s;
  }
  const double top = logw.size() ? logw.maxCoeff() : 0.0;
  return ProbabilityVector((logw.array() - top).exp().matrix());
}

ProbabilityVector ack_state(const ReactionNetwork& n, const RealVector& x, const StateSpace& space, double tol) {
  if (!is_complex_balanced(n, x, tol)) throw PreconditionError("ack_state: concentrations are not complex balanced");
  return product_poisson(x, space);
}

double relative_residual(const MasterOperator& h, const ProbabilityVector& psi) {
  const RealVector r = h.matrix * psi.probs();
  double hmax = 0.0;
  for (Index k = 0; k < h.matrix.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(h.matrix, k); it; ++it) hmax = std::max(hmax, std::abs(it.value()));
  if (hmax == 0.0) return 0.0;
  return (r.size() ? r.cwiseAbs().maxCoeff() : 0.0) / hmax;
}

Observable observable_from_weights(const StateSpace& space, const RealVector& weights) {
  Observable o(space.size());
  for (Index i = 0; i < space.size(); ++i) o(i) = weights.dot(space.state(i).cast<double>());
  return o;
}

ProbabilityVector condition_on_class(const StateSpace& space, const ProbabilityVector& psi, const IntVector& w,
                                     std::int64_t k) {
  if (psi.size() != space.size()) throw InputError("condition_on_class: distribution does not match space");
  RealVector out = RealVector::Zero(space.size());
  bool any = false;
  for (Index i = 0; i < space.size(); ++i) {
    if (w.dot(space.state(i)) == k) {
      out(i) = psi(i);
      any = true;
    }
  }
  if (!any || !(out.sum() > 0.0)) throw PreconditionError("condition_on_class: class is empty");
  return ProbabilityVector(std::move(out));
}

ProbabilityVector symmetry_scale(const ProbabilityVector& psi, const Observable& o, double s) {
  if (o.size() != psi.size()) throw InputError("symmetry_scale: observable does not match distribution");
  RealVector logw(psi.size());
  double top = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < psi.size(); ++i) {
    logw(i) = psi(i) > 0.0 ? std::log(psi(i)) + s * o(i) : -std::numeric_limits<double>::infinity();
    if (std::isnan(logw(i)) || logw(i) == std::numeric_limits<double>::infinity()) {
      throw NumericalError("symmetry_scale: exp(s O) overflows");
    }
    top = std::max(top, logw(i));
  }
  if (!std::isfinite(top)) throw NumericalError("symmetry_scale: no representable mass");
  return ProbabilityVector((logw.array() - top).exp().matrix());
}

// ---------------------------------------------------------------------------
// SSA

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct TrialOutput {
  IntVector end;
  std::vector<IntVector> bins;
};

TrialOutput run_trial(const ReactionNetwork& n, const IntVector& n0, double t_end, std::uint64_t seed, long trial,
                      const std::vector<double>& bin_times) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial))));
  TrialOutput out;
  IntVector l = n0;
  double t = 0.0;
  std::size_t next_bin = 0;
  std::vector<double> props(static_cast<std::size_t>(n.num_transitions()));
  while (true) {
    double total = 0.0;
    for (Index tau = 0; tau < n.num_transitions(); ++tau) {
      const double p = applicable(l, n.reactant(tau)) ? propensity(n, tau, l) : 0.0;
      props[static_cast<std::size_t>(tau)] = p;
      total += p;
    }
    const double wait = total > 0.0 ? -std::log1p(-uniform01(rng)) / total : std::numeric_limits<double>::infinity();
    const double t_next = t + wait;
    while (next_bin < bin_times.size() && bin_times[next_bin] < t_next) {
      out.bins.push_back(l);
      ++next_bin;
    }
    if (t_next > t_end) break;
    double pick = uniform01(rng) * total;
    Index chosen = n.num_transitions() - 1;
    for (Index tau = 0; tau < n.num_transitions(); ++tau) {
      pick -= props[static_cast<std::size_t>(tau)];
      if (pick < 0.0 && props[static_cast<std::size_t>(tau)] > 0.0) {
        chosen = tau;
        break;
      }
    }
    while (props[static_cast<std::size_t>(chosen)] == 0.0) --chosen;  // guard against rounding at the top end
    l += n.product(chosen) - n.reactant(chosen);
    t = t_next;
  }
  while (next_bin < bin_times.size()) {
    out.bins.push_back(l);
    ++next_bin;
  }
  out.end = l;
  return out;
}

}  // namespace

SsaResult ssa_sample(const ReactionNetwork& n, const IntVector& n0, double t_end, std::uint64_t seed, long trials,
                     int bins, int threads) {
  if (trials < 1) throw InputError("ssa: trials must be at least 1");
  if (!(t_end >= 0.0)) throw InputError("ssa: t must be nonnegative");
  if (bins < 1) throw InputError("ssa: bins must be at least 1");
  if (n0.size() != n.num_species() || (n0.array() < 0).any()) throw InputError("ssa: bad initial state");

  SsaResult r;
  r.seed = seed;
  r.t_end = t_end;
  for (int j = 0; j <= bins; ++j) r.bin_times.push_back(t_end * j / bins);

  std::vector<TrialOutput> outputs(static_cast<std::size_t>(trials));
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long i; (i = next.fetch_add(1)) < trials;) {
      outputs[static_cast<std::size_t>(i)] = run_trial(n, n0, t_end, seed, i, r.bin_times);
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(trials)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const Index s = n.num_species();
  r.mean = RealVector::Zero(s);
  r.variance = RealVector::Zero(s);
  r.bin_means.assign(r.bin_times.size(), RealVector::Zero(s));
  for (auto& o : outputs) {
    r.mean += o.end.cast<double>();
    for (std::size_t b = 0; b < o.bins.size(); ++b) r.bin_means[b] += o.bins[b].cast<double>();
  }
  const auto count = static_cast<double>(trials);
  r.mean /= count;
  for (auto& b : r.bin_means) b /= count;
  for (auto& o : outputs) r.variance += (o.end.cast<double>() - r.mean).array().square().matrix();
  r.variance /= count;
  r.end_states.reserve(outputs.size());
  for (auto& o : outputs) r.end_states.push_back(std::move(o.end));
  return r;
}

RealVector empirical_distribution(const StateSpace& space, const std::vector<IntVector>& samples) {
  RealVector counts = RealVector::Zero(space.size());
  for (const auto& s : samples) {
    if (auto i = space.find(s)) counts(*i) += 1.0;
  }
  if (!samples.empty()) counts /= static_cast<double>(samples.size());
  return counts;
}

}  // namespace crn
