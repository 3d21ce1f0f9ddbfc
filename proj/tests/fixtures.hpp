#pragma once

#include <random>
#include <string>

#include "crn/network.hpp"

namespace crn::fixtures {

inline const char* kDiatomic =
    "species A B\n"
    "B -> 2 A @ 1.0\n"
    "2 A -> B @ 1.0\n";

inline const char* kPart17 =
    "species A B C D E\n"
    "A -> B @ 1\n"
    "B -> A @ 1\n"
    "A + C -> D @ 1\n"
    "B + E -> A + C @ 1\n"
    "B + E -> D @ 1\n";

inline std::string part17_reversible() { return std::string(kPart17) + "D -> B + E @ 1\n"; }

// Six complexes {A, B, E, A+C, D, B+E} in two components.
inline const char* kSixComplexes =
    "species A B C D E\n"
    "A -> B @ 1\n"
    "B -> A @ 1\n"
    "B -> E @ 1\n"
    "E -> A @ 1\n"
    "A + C -> D @ 1\n"
    "D -> B + E @ 1\n"
    "B + E -> A + C @ 1\n";

// Same complexes, wired so that the species-level changes span B-A, E, D-A-C, D-B.
inline const char* kSixComplexesAlt =
    "species A B C D E\n"
    "A -> B @ 1\n"
    "E -> B @ 1\n"
    "A + C -> D @ 1\n"
    "B + E -> D @ 1\n"
    "B + E -> A + C @ 1\n";

inline const char* kTriangle =
    "species A B\n"
    "2 A -> A + B @ 1\n"
    "A + B -> 2 B @ 1\n"
    "2 B -> 2 A @ 1\n";

inline std::string amoeba(double fission, double competition) {
  return "species A\nA -> 2 A @ " + std::to_string(fission) + "\n2 A -> A @ " + std::to_string(competition) + "\n";
}

inline std::string isomer(double forward, double backward) {
  return "A <-> B @ " + std::to_string(forward) + " " + std::to_string(backward) + "\n";
}

inline const char* kSirs =
    "species S I R\n"
    "S + I -> 2 I @ 1\n"
    "I -> R @ 1\n"
    "R -> S @ 1\n";

inline const char* kSi = "species S I\nS + I -> 2 I @ 1\n";

inline const char* kLotkaVolterra =
    "species rabbit wolf\n"
    "rabbit -> 2 rabbit @ 1\n"
    "rabbit + wolf -> 2 wolf @ 1\n"
    "wolf -> 0 @ 1\n";

/// Random network with at most `max_species` species, complexes drawn with
/// entries in [0, max_coeff], `max_transitions` transitions and rates in [0.1, 3].
inline ReactionNetwork random_network(std::mt19937_64& rng, int max_species, int max_complexes, int max_transitions,
                                      int max_coeff = 2) {
  std::uniform_int_distribution<int> ns(1, max_species), nk(1, max_complexes), nt(0, max_transitions),
      coeff(0, max_coeff);
  std::uniform_real_distribution<double> rate(0.1, 3.0);
  const int s = ns(rng);
  std::vector<std::string> names;
  for (int i = 0; i < s; ++i) names.push_back("S" + std::to_string(i));
  NetworkBuilder b{SpeciesTable(names)};
  std::vector<IntVector> pool;
  const int k = nk(rng);
  for (int c = 0; c < k; ++c) {
    IntVector v(s);
    for (int i = 0; i < s; ++i) v(i) = coeff(rng);
    pool.push_back(v);
  }
  std::uniform_int_distribution<int> pick(0, k - 1);
  const int t = nt(rng);
  for (int i = 0; i < t; ++i) b.add_transition(pool[static_cast<std::size_t>(pick(rng))], pool[static_cast<std::size_t>(pick(rng))], rate(rng));
  return b.build();
}

}  // namespace crn::fixtures
