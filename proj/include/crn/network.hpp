#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crn/types.hpp"

namespace crn {

/// Ordered set of species names with reverse lookup.
class SpeciesTable {
 public:
  SpeciesTable() = default;
  explicit SpeciesTable(const std::vector<std::string>& names);

  /// Returns the index of `name`, appending it if absent.
  Index add(std::string_view name);
  std::optional<Index> find(std::string_view name) const;

  Index size() const { return static_cast<Index>(names_.size()); }
  const std::string& name(Index i) const { return names_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const SpeciesTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> index_;
};

/// A multiset of species: the vector Y(k) of stoichiometric counts.
struct Complex {
  IntVector counts;

  Index total() const { return counts.sum(); }
  bool operator==(const Complex& other) const {
    return counts.size() == other.counts.size() && counts == other.counts;
  }
};

struct Transition {
  Index source = 0;
  Index target = 0;
  double rate = 0.0;
};

/// Species, complexes and rate-labelled transitions between complexes.
///
/// Complexes are pairwise distinct. Self-loops and parallel transitions are
/// kept as given; they are harmless to every downstream operator.
class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  /// Validates the invariants; throws InputError on violation.
  ReactionNetwork(SpeciesTable species, std::vector<Complex> complexes, std::vector<Transition> transitions);

  const SpeciesTable& species() const { return species_; }
  const std::vector<Complex>& complexes() const { return complexes_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  Index num_species() const { return species_.size(); }
  Index num_complexes() const { return static_cast<Index>(complexes_.size()); }
  Index num_transitions() const { return static_cast<Index>(transitions_.size()); }

  const IntVector& complex(Index k) const { return complexes_.at(static_cast<std::size_t>(k)).counts; }
  const IntVector& reactant(Index tau) const { return complex(transitions_.at(static_cast<std::size_t>(tau)).source); }
  const IntVector& product(Index tau) const { return complex(transitions_.at(static_cast<std::size_t>(tau)).target); }
  double rate(Index tau) const { return transitions_.at(static_cast<std::size_t>(tau)).rate; }

  std::optional<Index> find_complex(const IntVector& counts) const;

  /// Same network with every rate replaced; `rates.size()` must equal the transition count.
  ReactionNetwork with_rates(const std::vector<double>& rates) const;

 private:
  SpeciesTable species_;
  std::vector<Complex> complexes_;
  std::vector<Transition> transitions_;
};

/// Incremental construction with complex deduplication.
class NetworkBuilder {
 public:
  NetworkBuilder() = default;
  explicit NetworkBuilder(SpeciesTable species) : species_(std::move(species)) {}

  Index add_complex(const IntVector& counts);
  void add_transition(const IntVector& input, const IntVector& output, double rate);
  /// Convenience for hand-written networks: "2A + B" style complex strings.
  void add_reaction(std::string_view input, std::string_view output, double rate);

  ReactionNetwork build() const;

 private:
  IntVector complex_from_text(std::string_view text);

  SpeciesTable species_;
  std::vector<Complex> complexes_;
  std::vector<Transition> transitions_;
};

struct PetriTransition {
  IntVector input;
  IntVector output;
  double rate = 0.0;
};

struct PetriNet {
  SpeciesTable species;
  std::vector<PetriTransition> transitions;
};

/// Parses the line-oriented network DSL. Throws ParseError with line and column.
ReactionNetwork parse_network(std::string_view text);

/// Text that `parse_network` maps back to a structurally identical network.
std::string canonical_text(const ReactionNetwork& n);
std::string format_complex(const SpeciesTable& species, const IntVector& counts);

ReactionNetwork from_petri(const PetriNet& p);
PetriNet to_petri(const ReactionNetwork& n);

/// Equality up to a permutation of the complex list (species order and
/// transition order must match).
bool equivalent(const ReactionNetwork& a, const ReactionNetwork& b);

}  // namespace crn
