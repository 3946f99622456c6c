// Structural (rate-independent) model of a reaction network: species,
// complexes, directed reactions, the stoichiometric matrix, and the
// derived invariants (rank, deficiency, linkage classes, reversibility,
// conservation, molecularity).
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crnosc/rational.hpp"

namespace crn {

// Formal nonnegative-integer combination of species, stored sparsely as
// (species index, coefficient) pairs sorted by species index.
struct Complex {
  std::vector<std::pair<int, int>> terms;

  int molecularity() const;
  int coeff(int species) const;
  void add(int species, int coefficient);

  friend bool operator==(const Complex& a, const Complex& b) { return a.terms == b.terms; }
};

struct Reaction {
  int reactant = -1;  // complex index
  int product = -1;   // complex index
  std::string rate_label;
};

struct ReactionNetwork {
  std::string name;
  std::vector<std::string> species;
  std::vector<Complex> complexes;
  std::vector<Reaction> reactions;

  int num_species() const { return static_cast<int>(species.size()); }
  int num_complexes() const { return static_cast<int>(complexes.size()); }
  int num_reactions() const { return static_cast<int>(reactions.size()); }

  int species_index(const std::string& name) const;  // -1 if absent
  int intern_species(const std::string& name);
  int intern_complex(const Complex& c);

  // Reaction vector (product minus reactant) of reaction j over species.
  Eigen::VectorXi reaction_vector(int j) const;

  // Reorders the species list; complexes are re-canonicalised accordingly.
  void reorder_species(const std::vector<std::string>& order);

  // Throws std::invalid_argument on self-loops, duplicate complexes,
  // orphan complexes, or missing/duplicate rate labels.
  void validate() const;

  friend bool operator==(const ReactionNetwork& a, const ReactionNetwork& b);
};

// Species x reactions integer matrix whose columns are the reaction vectors.
Eigen::MatrixXi stoichiometric_matrix(const ReactionNetwork& net);

int network_rank(const ReactionNetwork& net);       // exact rational rank
int num_linkage_classes(const ReactionNetwork& net);  // weak components of (V,E)
int deficiency(const ReactionNetwork& net);         // |V| - l - rank

bool is_reversible(const ReactionNetwork& net);
bool is_bimolecular(const ReactionNetwork& net);
// True iff every linkage class is strongly connected.
bool is_strongly_connected(const ReactionNetwork& net);
// True iff the undirected collapse (reversible pairs merged to one edge)
// is acyclic.
bool undirected_collapse_is_forest(const ReactionNetwork& net);

// Strictly positive d with d^T Gamma = 0, smallest entry normalised to 1.
std::optional<std::vector<Rational>> conservation_vector(const ReactionNetwork& net);

enum class StructureFlag {
  NoPeriodicOrbits,              // deficiency zero
  UniquePositiveEquilibrium,     // deficiency one, strongly connected, full rank
  PermanentByStrongConnectivity  // every linkage class strongly connected
};
std::string to_string(StructureFlag f);

struct StructureReport {
  int num_species = 0;
  int num_reactions = 0;
  int num_complexes = 0;
  int num_linkage_classes = 0;
  int rank = 0;
  int deficiency = 0;
  bool reversible = false;
  bool strongly_connected = false;
  bool bimolecular = false;
  bool mass_conserving = false;
  std::optional<std::vector<Rational>> conservation;
  std::set<StructureFlag> flags;
  std::vector<std::string> lint;
};

StructureReport structural_report(const ReactionNetwork& net);

}  // namespace crn
