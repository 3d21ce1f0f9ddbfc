#pragma once

#include <vector>

#include "crn/network.hpp"
#include "crn/types.hpp"

namespace crn {

/// Right-hand side of the mass-action rate equation,
///   dx/dt = sum_tau r(tau) (n(tau) - m(tau)) x^{m(tau)},
/// cross-checked against the factored form Y H x^Y.
RealVector rate_rhs(const ReactionNetwork& n, const RealVector& x);
/// The transition sum alone.
RealVector rate_rhs_sum(const ReactionNetwork& n, const RealVector& x);
/// The factored form Y H x^Y alone, with H the complex-space generator.
RealVector rate_rhs_factored(const ReactionNetwork& n, const RealVector& x);

/// Componentwise monomials x^{Y(k)} with 0^0 = 1.
RealVector x_pow_Y(const RealVector& x, const IntMatrix& y);

struct Trajectory {
  std::vector<double> times;
  std::vector<RealVector> states;
  /// Largest step-doubling error estimate seen along the run.
  double max_step_error = 0.0;
};

/// Fixed-step classical RK4 from 0 to t_end. The last step is shortened to
/// land exactly on t_end. Throws NumericalError if the state goes below -1e-9
/// or becomes non-finite.
Trajectory integrate_rate(const ReactionNetwork& n, const RealVector& x0, double t_end, double dt);

/// Per-complex balance of production and consumption at concentrations c.
bool is_complex_balanced(const ReactionNetwork& n, const RealVector& c, double tol = 1e-9);

struct EquilibriumResult {
  RealVector x;       // positive equilibrium concentrations
  RealVector alpha;   // ln psi - Y^T ln x, constant on each component
  RealVector psi;     // positive complex-space equilibrium of H
  double residual_master = 0.0;  // |H x^Y|_inf
  double residual_rate = 0.0;    // |Y H x^Y|_inf
  double residual_boundary = 0.0;  // |d^T (ln psi - Y^T ln x)|_inf
};

/// Positive complex-balanced equilibrium of a weakly reversible
/// deficiency-zero network.
///
/// Steps: per-component kernel vectors of H summed into psi; least-squares
/// solve of (Yd)^T b = d^T ln psi; x = exp(b). Throws PreconditionError if the
/// network is not weakly reversible or has nonzero deficiency, and
/// NumericalError if a residual exceeds tol.
EquilibriumResult deficiency_zero_equilibrium(const ReactionNetwork& n, double tol = 1e-9);

}  // namespace crn
