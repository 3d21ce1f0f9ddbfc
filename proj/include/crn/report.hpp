#pragma once

#include <string>

#include <json.hpp>

#include "crn/exactlin.hpp"
#include "crn/masterdyn.hpp"
#include "crn/network.hpp"
#include "crn/ratedyn.hpp"
#include "crn/structure.hpp"

namespace crn {

using Json = nlohmann::ordered_json;

/// Compact JSON with every floating-point number printed with 17 significant digits.
std::string dump_json(const Json& j);
std::string format_real(double v);

Json network_json(const ReactionNetwork& n);
Json structure_json(const StructureReport& r);
Json equilibrium_json(const EquilibriumResult& e);
Json spectrum_json(const Spectrum<double>& s, double group_tol);
Json ssa_json(const SsaResult& r);

/// "t,<species...>" header followed by one row per sample.
std::string trajectory_csv(const ReactionNetwork& n, const Trajectory& traj);
/// "state_index,<species...>,probability" rows.
std::string distribution_csv(const ReactionNetwork& n, const StateSpace& space, const ProbabilityVector& psi);

}  // namespace crn
