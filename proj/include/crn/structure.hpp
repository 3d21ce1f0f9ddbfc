#pragma once

#include <vector>

#include "crn/network.hpp"
#include "crn/types.hpp"

namespace crn {

/// The source, target, boundary and stoichiometry maps as integer matrices.
struct IncidenceMaps {
  IntMatrix source;    // |K| x |T|, column tau = indicator of s(tau)
  IntMatrix target;    // |K| x |T|
  IntMatrix boundary;  // target - source
  IntMatrix stoich;    // |S| x |K|, column k = Y(k)

  /// Y * boundary: column tau is the net species change of tau.
  IntMatrix reaction_vectors() const { return stoich * boundary; }
};

IncidenceMaps build_incidence(const ReactionNetwork& n);

/// Partition of vertices into components, numbered by smallest member.
struct Partition {
  std::vector<Index> component_of;
  std::vector<std::vector<Index>> members;

  Index count() const { return static_cast<Index>(members.size()); }
};

/// Undirected connectivity of the complex graph.
Partition connected_components(const ReactionNetwork& n);
/// Directed (Tarjan) strong connectivity of the complex graph.
Partition strong_components(const ReactionNetwork& n);

/// Same operations on a bare directed edge list over `num_vertices` vertices.
Partition connected_components(Index num_vertices, const std::vector<std::pair<Index, Index>>& edges);
Partition strong_components(Index num_vertices, const std::vector<std::pair<Index, Index>>& edges);

bool weakly_reversible(const ReactionNetwork& n);

struct StructureReport {
  Index num_complexes = 0;
  Index num_components = 0;
  Index num_strong_components = 0;
  bool weakly_reversible = false;
  Index stoich_dim = 0;
  Index deficiency = 0;
  std::vector<IntVector> conservation_laws;
  std::vector<Index> component_of;
};

/// Computes the deficiency as dim(im d ∩ ker Y) and as |K| - #components -
/// dim im Yd; throws InternalError if they disagree.
StructureReport analyze_structure(const ReactionNetwork& n);

inline Index deficiency(const ReactionNetwork& n) { return analyze_structure(n).deficiency; }

/// dim(im d ∩ ker Y), from integer bases of both subspaces.
Index deficiency_by_intersection(const IncidenceMaps& maps);

/// Integer basis of the left kernel of Yd.
std::vector<IntVector> conservation_laws(const ReactionNetwork& n);

/// True iff x - y lies in the stoichiometric subspace.
bool same_compatibility_class(const ReactionNetwork& n, const RealVector& x, const RealVector& y, double tol = 1e-9);

}  // namespace crn
