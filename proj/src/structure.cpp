#include "crn/structure.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "crn/errors.hpp"
#include "crn/exactlin.hpp"

namespace crn {
namespace {

std::vector<std::pair<Index, Index>> edge_list(const ReactionNetwork& n) {
  std::vector<std::pair<Index, Index>> edges;
  for (const auto& t : n.transitions()) edges.emplace_back(t.source, t.target);
  return edges;
}

// Renumbers arbitrary labels so that component ids follow their smallest member.
Partition canonical_partition(const std::vector<Index>& label) {
  Partition p;
  const auto n = label.size();
  p.component_of.assign(n, -1);
  std::vector<Index> remap(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    auto& id = remap[static_cast<std::size_t>(label[v])];
    if (id < 0) {
      id = p.count();
      p.members.emplace_back();
    }
    p.component_of[v] = id;
    p.members[static_cast<std::size_t>(id)].push_back(static_cast<Index>(v));
  }
  return p;
}

}  // namespace

IncidenceMaps build_incidence(const ReactionNetwork& n) {
  const Index k = n.num_complexes();
  const Index t = n.num_transitions();
  IncidenceMaps m;
  m.source = IntMatrix::Zero(k, t);
  m.target = IntMatrix::Zero(k, t);
  for (Index tau = 0; tau < t; ++tau) {
    const auto& tr = n.transitions()[static_cast<std::size_t>(tau)];
    m.source(tr.source, tau) = 1;
    m.target(tr.target, tau) = 1;
  }
  m.boundary = m.target - m.source;
  m.stoich.resize(n.num_species(), k);
  for (Index c = 0; c < k; ++c) m.stoich.col(c) = n.complex(c);
  return m;
}

Partition connected_components(Index num_vertices, const std::vector<std::pair<Index, Index>>& edges) {
  std::vector<Index> parent(static_cast<std::size_t>(num_vertices));
  std::iota(parent.begin(), parent.end(), Index{0});
  std::function<Index(Index)> find = [&](Index v) {
    auto& p = parent[static_cast<std::size_t>(v)];
    if (p != v) p = find(p);
    return p;
  };
  for (auto [a, b] : edges) {
    const Index ra = find(a), rb = find(b);
    if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
  }
  std::vector<Index> label(static_cast<std::size_t>(num_vertices));
  for (Index v = 0; v < num_vertices; ++v) label[static_cast<std::size_t>(v)] = find(v);
  return canonical_partition(label);
}

Partition strong_components(Index num_vertices, const std::vector<std::pair<Index, Index>>& edges) {
  const auto n = static_cast<std::size_t>(num_vertices);
  std::vector<std::vector<Index>> adj(n);
  for (auto [a, b] : edges) adj[static_cast<std::size_t>(a)].push_back(b);

  // Tarjan
  std::vector<Index> index(n, -1), low(n, 0), label(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  Index counter = 0, next_label = 0;
  std::function<void(Index)> visit = [&](Index v) {
    const auto vi = static_cast<std::size_t>(v);
    index[vi] = low[vi] = counter++;
    stack.push_back(v);
    on_stack[vi] = 1;
    for (Index w : adj[vi]) {
      const auto wi = static_cast<std::size_t>(w);
      if (index[wi] < 0) {
        visit(w);
        low[vi] = std::min(low[vi], low[wi]);
      } else if (on_stack[wi]) {
        low[vi] = std::min(low[vi], index[wi]);
      }
    }
    if (low[vi] == index[vi]) {
      Index w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[static_cast<std::size_t>(w)] = 0;
        label[static_cast<std::size_t>(w)] = next_label;
      } while (w != v);
      ++next_label;
    }
  };
  for (Index v = 0; v < num_vertices; ++v) {
    if (index[static_cast<std::size_t>(v)] < 0) visit(v);
  }
  return canonical_partition(label);
}

Partition connected_components(const ReactionNetwork& n) {
  return connected_components(n.num_complexes(), edge_list(n));
}

Partition strong_components(const ReactionNetwork& n) { return strong_components(n.num_complexes(), edge_list(n)); }

bool weakly_reversible(const ReactionNetwork& n) {
  const auto strong = strong_components(n);
  for (const auto& t : n.transitions()) {
    if (strong.component_of[static_cast<std::size_t>(t.source)] !=
        strong.component_of[static_cast<std::size_t>(t.target)]) {
      return false;
    }
  }
  return true;
}

Index deficiency_by_intersection(const IncidenceMaps& maps) {
  const Index k = maps.boundary.rows();
  if (k == 0) return 0;
  // Basis of im d: the columns of d picked out by its column echelon pivots,
  // i.e. a maximal independent subset found greedily by rank growth.
  std::vector<IntVector> image;
  for (Index c = 0; c < maps.boundary.cols(); ++c) {
    image.push_back(maps.boundary.col(c));
    if (int_rank(columns_to_matrix(image, k)) < static_cast<Index>(image.size())) image.pop_back();
  }
  const auto kernel = int_kernel_basis(maps.stoich);
  std::vector<IntVector> both = image;
  both.insert(both.end(), kernel.begin(), kernel.end());
  const Index joint = both.empty() ? 0 : int_rank(columns_to_matrix(both, k));
  return static_cast<Index>(image.size() + kernel.size()) - joint;
}

std::vector<IntVector> conservation_laws(const ReactionNetwork& n) {
  return int_left_kernel_basis(build_incidence(n).reaction_vectors());
}

StructureReport analyze_structure(const ReactionNetwork& n) {
  const auto maps = build_incidence(n);
  const auto comps = connected_components(n);
  const auto strong = strong_components(n);
  StructureReport r;
  r.num_complexes = n.num_complexes();
  r.num_components = comps.count();
  r.num_strong_components = strong.count();
  r.weakly_reversible = weakly_reversible(n);
  const IntMatrix yd = maps.reaction_vectors();
  r.stoich_dim = int_rank(yd);
  r.deficiency = r.num_complexes - r.num_components - r.stoich_dim;
  r.conservation_laws = int_left_kernel_basis(yd);
  r.component_of = comps.component_of;

  const Index by_definition = deficiency_by_intersection(maps);
  if (by_definition != r.deficiency) {
    throw InternalError("deficiency mismatch: dim(im d ∩ ker Y) = " + std::to_string(by_definition) +
                        " but |K| - components - stoich_dim = " + std::to_string(r.deficiency));
  }
  if (r.weakly_reversible != (r.num_components == r.num_strong_components)) {
    throw InternalError("weak reversibility disagrees with component counts");
  }
  return r;
}

bool same_compatibility_class(const ReactionNetwork& n, const RealVector& x, const RealVector& y, double tol) {
  if (x.size() != n.num_species() || y.size() != n.num_species()) {
    throw InputError("same_compatibility_class: vector length does not match species count");
  }
  if (x.size() == 0) return true;
  const RealVector diff = x - y;
  const double scale = std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
  for (const auto& w : conservation_laws(n)) {
    const RealVector wd = w.cast<double>();
    if (std::abs(wd.dot(diff)) > tol * scale * wd.lpNorm<1>()) return false;
  }
  return true;
}

}  // namespace crn
