#include "crn/ratedyn.hpp"

#include <algorithm>
#include <cmath>

#include "crn/errors.hpp"
#include "crn/exactlin.hpp"
#include "crn/markov.hpp"
#include "crn/structure.hpp"

namespace crn {
namespace {

double monomial(const RealVector& x, const IntVector& exponents) {
  double p = 1.0;
  for (Index i = 0; i < x.size(); ++i) {
    for (std::int64_t e = 0; e < exponents(i); ++e) p *= x(i);
  }
  return p;
}

void check_state(const ReactionNetwork& n, const RealVector& x) {
  if (x.size() != n.num_species()) throw InputError("state length does not match species count");
  if (!x.allFinite()) throw NumericalError("state has non-finite entries");
}

}  // namespace

RealVector x_pow_Y(const RealVector& x, const IntMatrix& y) {
  if (y.rows() != x.size()) throw InputError("x_pow_Y: dimension mismatch");
  RealVector out(y.cols());
  for (Index k = 0; k < y.cols(); ++k) out(k) = monomial(x, y.col(k));
  return out;
}

RealVector rate_rhs_sum(const ReactionNetwork& n, const RealVector& x) {
  RealVector dx = RealVector::Zero(n.num_species());
  for (Index tau = 0; tau < n.num_transitions(); ++tau) {
    const IntVector change = n.product(tau) - n.reactant(tau);
    dx += n.rate(tau) * monomial(x, n.reactant(tau)) * change.cast<double>();
  }
  return dx;
}

RealVector rate_rhs_factored(const ReactionNetwork& n, const RealVector& x) {
  const auto maps = build_incidence(n);
  const Operator h = hamiltonian(complex_graph(n));
  return maps.stoich.cast<double>() * (h * x_pow_Y(x, maps.stoich));
}

RealVector rate_rhs(const ReactionNetwork& n, const RealVector& x) {
  check_state(n, x);
  if ((x.array() < 0.0).any()) throw InputError("rate_rhs: negative concentration");
  RealVector sum = rate_rhs_sum(n, x);
  const RealVector factored = rate_rhs_factored(n, x);
  // Relative to the magnitude of the largest individual term.
  double scale = 0.0;
  for (Index tau = 0; tau < n.num_transitions(); ++tau) {
    const double change = static_cast<double>((n.product(tau) - n.reactant(tau)).cwiseAbs().maxCoeff());
    scale = std::max(scale, n.rate(tau) * monomial(x, n.reactant(tau)) * change);
  }
  if (sum.size() && (sum - factored).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300) * 4.0) {
    throw InternalError("rate_rhs: transition sum and Y H x^Y disagree");
  }
  return sum;
}

Trajectory integrate_rate(const ReactionNetwork& n, const RealVector& x0, double t_end, double dt) {
  check_state(n, x0);
  if (!(dt > 0.0)) throw InputError("integrate_rate: dt must be positive");
  if (!(t_end >= 0.0)) throw InputError("integrate_rate: t_end must be nonnegative");
  if ((x0.array() < 0.0).any()) throw InputError("integrate_rate: negative initial state");

  auto f = [&](const RealVector& x) { return rate_rhs_sum(n, x); };
  auto rk4 = [&](const RealVector& x, double h) {
    const RealVector k1 = f(x);
    const RealVector k2 = f(x + 0.5 * h * k1);
    const RealVector k3 = f(x + 0.5 * h * k2);
    const RealVector k4 = f(x + h * k3);
    return RealVector(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  RealVector x = x0;
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double t0 = static_cast<double>(k - 1) * dt;
    const double t1 = (k == steps) ? t_end : static_cast<double>(k) * dt;
    const double h = t1 - t0;
    const RealVector full = rk4(x, h);
    const RealVector half = rk4(rk4(x, 0.5 * h), 0.5 * h);
    // Richardson estimate of the local error of the full step.
    traj.max_step_error = std::max(traj.max_step_error, (full - half).cwiseAbs().maxCoeff() * (16.0 / 15.0));
    x = full;
    if (!x.allFinite()) throw NumericalError("integrate_rate: state became non-finite at t = " + std::to_string(t1));
    if (x.size() && x.minCoeff() < -1e-9) {
      throw NumericalError("integrate_rate: state left the nonnegative orthant at t = " + std::to_string(t1) +
                           " (dt too large?)");
    }
    traj.times.push_back(t1);
    traj.states.push_back(x);
  }
  return traj;
}

bool is_complex_balanced(const ReactionNetwork& n, const RealVector& c, double tol) {
  check_state(n, c);
  if ((c.array() <= 0.0).any()) throw InputError("is_complex_balanced: concentrations must be positive");
  RealVector produced = RealVector::Zero(n.num_complexes());
  RealVector consumed = RealVector::Zero(n.num_complexes());
  for (Index tau = 0; tau < n.num_transitions(); ++tau) {
    const auto& tr = n.transitions()[static_cast<std::size_t>(tau)];
    const double flux = tr.rate * monomial(c, n.reactant(tau));
    consumed(tr.source) += flux;
    produced(tr.target) += flux;
  }
  for (Index k = 0; k < n.num_complexes(); ++k) {
    const double scale = std::max(produced(k), consumed(k));
    if (std::abs(produced(k) - consumed(k)) > tol * scale) return false;
  }
  return true;
}

EquilibriumResult deficiency_zero_equilibrium(const ReactionNetwork& n, double tol) {
  const auto report = analyze_structure(n);
  if (!report.weakly_reversible) throw PreconditionError("network is not weakly reversible");
  if (report.deficiency != 0) {
    throw PreconditionError("network has deficiency " + std::to_string(report.deficiency) + ", not 0");
  }

  const auto graph = complex_graph(n);
  const Operator h = hamiltonian(graph);
  const auto maps = build_incidence(n);
  const RealMatrix y = maps.stoich.cast<double>();
  const RealMatrix boundary = maps.boundary.cast<double>();
  const Index k = n.num_complexes();

  RealVector psi = RealVector::Zero(k);
  for (const auto& v : component_equilibria(graph)) psi += v;
  if ((psi.array() <= 0.0).any()) throw InternalError("component equilibria do not cover every complex");
  const RealVector log_psi = psi.array().log();

  EquilibriumResult out;
  out.psi = psi;
  RealVector beta = RealVector::Zero(n.num_species());
  if (n.num_species() > 0 && n.num_transitions() > 0) {
    const RealMatrix a = (y * boundary).transpose();
    beta = least_squares(a, RealVector(boundary.transpose() * log_psi)).solution;
  }
  out.alpha = log_psi - y.transpose() * beta;
  out.residual_boundary = n.num_transitions() ? (boundary.transpose() * out.alpha).cwiseAbs().maxCoeff() : 0.0;
  if (out.residual_boundary > tol) {
    throw NumericalError("deficiency-zero solve left residual " + std::to_string(out.residual_boundary));
  }
  out.x = beta.array().exp();

  const RealVector monomials = x_pow_Y(out.x, maps.stoich);
  const RealVector hx = h * monomials;
  out.residual_master = k ? hx.cwiseAbs().maxCoeff() : 0.0;
  out.residual_rate = n.num_species() ? (y * hx).cwiseAbs().maxCoeff() : 0.0;
  const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 0.0) *
                       std::max(1.0, monomials.size() ? monomials.maxCoeff() : 0.0);
  if (out.residual_master > tol * scale) {
    throw NumericalError("equilibrium residual |H x^Y| = " + std::to_string(out.residual_master));
  }

  const auto comps = connected_components(n);
  for (const auto& members : comps.members) {
    for (Index v : members) {
      if (std::abs(out.alpha(v) - out.alpha(members.front())) > tol * std::max(1.0, std::abs(out.alpha(v)))) {
        throw InternalError("alpha is not constant on a connected component");
      }
    }
  }
  return out;
}

}  // namespace crn
